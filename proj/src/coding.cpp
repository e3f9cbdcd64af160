#include "mimo/coding.hpp"

#include <bit>
#include <limits>
#include <stdexcept>

namespace mimo {

namespace {

// Generator taps applied LSB-first: bit 0 of the polynomial weights the
// newest input bit.
constexpr std::uint32_t kG1 = 0133;
constexpr std::uint32_t kG2 = 0171;
constexpr int kMemory = 6;
constexpr int kStates = 64;

inline int parity(std::uint32_t x) { return std::popcount(x) & 1; }

int trellis_steps(const CodeSpec& spec) {
    if (spec.block_info_bits < 1) throw std::invalid_argument("code: block_info_bits < 1");
    const int steps = spec.block_info_bits + kMemory;
    if (spec.rate == CodeSpec::Rate::three_quarters && steps % 3 != 0)
        throw std::invalid_argument("code: rate 3/4 needs block_info_bits + 6 divisible by 3");
    return steps;
}

// Puncture pattern for rate 3/4 over a period of three trellis steps:
// keep (c1, c2), (c1), (c2).
inline bool keep_c1(const CodeSpec& spec, int step) {
    return spec.rate == CodeSpec::Rate::half || step % 3 != 2;
}
inline bool keep_c2(const CodeSpec& spec, int step) {
    return spec.rate == CodeSpec::Rate::half || step % 3 != 1;
}

}  // namespace

std::size_t coded_length(const CodeSpec& spec) {
    const int steps = trellis_steps(spec);
    if (spec.rate == CodeSpec::Rate::half) return 2u * static_cast<std::size_t>(steps);
    return 4u * static_cast<std::size_t>(steps) / 3u;
}

std::vector<std::uint8_t> conv_encode(std::span<const std::uint8_t> info_bits, const CodeSpec& spec) {
    const int steps = trellis_steps(spec);
    if (info_bits.size() != static_cast<std::size_t>(spec.block_info_bits))
        throw std::invalid_argument("conv_encode: info length does not match block_info_bits");

    std::vector<std::uint8_t> out;
    out.reserve(coded_length(spec));
    std::uint32_t state = 0;
    for (int t = 0; t < steps; ++t) {
        const std::uint32_t u = t < spec.block_info_bits ? info_bits[static_cast<std::size_t>(t)] & 1u : 0u;
        const std::uint32_t w = (state << 1) | u;
        if (keep_c1(spec, t)) out.push_back(static_cast<std::uint8_t>(parity(w & kG1)));
        if (keep_c2(spec, t)) out.push_back(static_cast<std::uint8_t>(parity(w & kG2)));
        state = w & (kStates - 1);
    }
    return out;
}

std::vector<std::uint8_t> viterbi_decode_soft(std::span<const double> llr, const CodeSpec& spec) {
    const int steps = trellis_steps(spec);
    if (llr.size() != coded_length(spec))
        throw std::invalid_argument("viterbi_decode_soft: llr count does not match punctured codeword length");

    // Depuncture: missing positions carry zero reliability.
    std::vector<double> l1(static_cast<std::size_t>(steps), 0.0);
    std::vector<double> l2(static_cast<std::size_t>(steps), 0.0);
    std::size_t pos = 0;
    for (int t = 0; t < steps; ++t) {
        if (keep_c1(spec, t)) l1[static_cast<std::size_t>(t)] = llr[pos++];
        if (keep_c2(spec, t)) l2[static_cast<std::size_t>(t)] = llr[pos++];
    }

    // Output tables per (state, input).
    std::uint8_t c1_tab[kStates][2], c2_tab[kStates][2];
    for (int s = 0; s < kStates; ++s)
        for (int u = 0; u < 2; ++u) {
            const std::uint32_t w = (static_cast<std::uint32_t>(s) << 1) | static_cast<std::uint32_t>(u);
            c1_tab[s][u] = static_cast<std::uint8_t>(parity(w & kG1));
            c2_tab[s][u] = static_cast<std::uint8_t>(parity(w & kG2));
        }

    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> pm(kStates, neg_inf), pm_next(kStates, neg_inf);
    pm[0] = 0.0;  // trellis starts in state 0
    std::vector<std::uint8_t> pred(static_cast<std::size_t>(steps) * kStates);

    for (int t = 0; t < steps; ++t) {
        std::fill(pm_next.begin(), pm_next.end(), neg_inf);
        const double a1 = l1[static_cast<std::size_t>(t)];
        const double a2 = l2[static_cast<std::size_t>(t)];
        for (int s = 0; s < kStates; ++s) {
            if (pm[static_cast<std::size_t>(s)] == neg_inf) continue;
            for (int u = 0; u < 2; ++u) {
                const int ns = ((s << 1) | u) & (kStates - 1);
                // Correlation metric: positive reliability favors binary 0.
                const double bm = (c1_tab[s][u] ? -a1 : a1) + (c2_tab[s][u] ? -a2 : a2);
                const double cand = pm[static_cast<std::size_t>(s)] + bm;
                if (cand > pm_next[static_cast<std::size_t>(ns)]) {
                    pm_next[static_cast<std::size_t>(ns)] = cand;
                    pred[static_cast<std::size_t>(t) * kStates + static_cast<std::size_t>(ns)] =
                        static_cast<std::uint8_t>(s);
                }
            }
        }
        pm.swap(pm_next);
    }

    // Terminated: trace back from state 0. The newest input of each state is
    // its least significant bit.
    std::vector<std::uint8_t> decoded(static_cast<std::size_t>(steps));
    int state = 0;
    for (int t = steps - 1; t >= 0; --t) {
        decoded[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(state & 1);
        state = pred[static_cast<std::size_t>(t) * kStates + static_cast<std::size_t>(state)];
    }
    decoded.resize(static_cast<std::size_t>(spec.block_info_bits));
    return decoded;
}

}  // namespace mimo
