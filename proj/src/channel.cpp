#include "mimo/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mimo {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t trial, std::uint64_t salt) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s ^= trial * 0xd1342543de82ef95ull;
    a ^= splitmix64(s);
    s ^= salt * 0xaf251af3b0f025b5ull;
    a ^= splitmix64(s);
    return a;
}

cx Rng::cgaussian(double var) {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1)) * std::sqrt(var / 2.0);
    const double th = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(th), r * std::sin(th)};
}

double sigma2_from_snr_db(double snr_db, int k) {
    return static_cast<double>(k) / std::pow(10.0, snr_db / 10.0);
}

CMatrix draw_flat(int m, int k, Rng& rng) {
    CMatrix h(static_cast<std::size_t>(m), static_cast<std::size_t>(k));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) h(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = rng.cgaussian(1.0);
    return h;
}

std::vector<CMatrix> draw_multitap(const ChannelModel& model, Rng& rng) {
    const int m = model.m, k = model.k, t = model.taps, nsc = model.subcarriers;
    if (t < 1 || nsc < 1) throw std::invalid_argument("draw_multitap: invalid model");

    // Taps drawn in a fixed order (antenna pair row-major, then tap index).
    std::vector<cx> taps(static_cast<std::size_t>(m) * k * t);
    for (std::size_t i = 0; i < taps.size(); ++i) taps[i] = rng.cgaussian(1.0 / t);

    std::vector<CMatrix> out(static_cast<std::size_t>(nsc));
    for (int f = 0; f < nsc; ++f) {
        CMatrix h(static_cast<std::size_t>(m), static_cast<std::size_t>(k));
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < k; ++j) {
                cx acc = 0.0;
                const std::size_t base = (static_cast<std::size_t>(i) * k + j) * t;
                for (int p = 0; p < t; ++p) {
                    const double ph = -2.0 * std::numbers::pi * f * p / nsc;
                    acc += taps[base + static_cast<std::size_t>(p)] * cx(std::cos(ph), std::sin(ph));
                }
                h(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = acc;
            }
        }
        out[static_cast<std::size_t>(f)] = std::move(h);
    }
    return out;
}

std::vector<CMatrix> draw_channel(const ChannelModel& model, Rng& rng) {
    if (model.kind == ChannelModel::Kind::rayleigh_flat) {
        if (model.taps != 1) throw std::invalid_argument("draw_channel: flat model requires taps == 1");
        std::vector<CMatrix> out;
        out.push_back(draw_flat(model.m, model.k, rng));
        return out;
    }
    return draw_multitap(model, rng);
}

std::vector<int> transmit_indices(std::span<const int8_t> bits, const Constellation& c, int k) {
    const int bps = c.bits_per_symbol();
    if (bits.size() != static_cast<std::size_t>(k) * bps)
        throw std::invalid_argument("transmit: bit count does not match k * log2(order)");
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int s = 0; s < k; ++s)
        idx[static_cast<std::size_t>(s)] = c.index_of_label(bits.data() + static_cast<std::size_t>(s) * bps);
    return idx;
}

CVector transmit(std::span<const int8_t> bits, const Constellation& c, int k) {
    const std::vector<int> idx = transmit_indices(bits, c, k);
    CVector s(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = c.point(idx[static_cast<std::size_t>(i)]);
    return s;
}

CVector add_awgn(const CVector& x, double sigma, Rng& rng) {
    if (sigma < 0.0) throw std::invalid_argument("add_awgn: negative sigma");
    CVector y(x);
    if (sigma == 0.0) return y;
    const double var = sigma * sigma;
    for (cx& v : y) v += rng.cgaussian(var);
    return y;
}

}  // namespace mimo
