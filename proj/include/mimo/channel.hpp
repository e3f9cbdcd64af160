#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "mimo/constellation.hpp"
#include "mimo/linalg.hpp"

namespace mimo {

/// Counter-free substream derivation: every (seed, trial, salt) triple maps
/// to an independent generator seed, so trials can run in any order on any
/// number of threads and still draw identical values.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t trial, std::uint64_t salt = 0);

/// Deterministic random source. Gaussians come from an explicit Box-Muller
/// transform (two uniforms per complex draw), keeping the stream independent
/// of standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }  // [0, 1)

    /// Circularly symmetric complex Gaussian with total variance var.
    cx cgaussian(double var);

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

struct ChannelModel {
    enum class Kind { rayleigh_flat, rayleigh_multitap };
    Kind kind = Kind::rayleigh_flat;
    int taps = 1;        ///< 1 for flat
    int subcarriers = 1; ///< frequency grid for the multitap model
    int m = 0, k = 0;
};

/// sigma^2 = K / 10^(snr_db/10): per-receive-antenna SNR with unit-energy
/// symbols and unit-variance channel entries (E{||Hs||^2}/M = K).
double sigma2_from_snr_db(double snr_db, int k);

/// M x K i.i.d. CN(0,1) entries, drawn row-major.
CMatrix draw_flat(int m, int k, Rng& rng);

/// Per-subcarrier frequency response of `taps` i.i.d. CN(0,1/taps) taps per
/// antenna pair; unit average entry energy.
std::vector<CMatrix> draw_multitap(const ChannelModel& model, Rng& rng);

std::vector<CMatrix> draw_channel(const ChannelModel& model, Rng& rng);

/// Gray-map bipolar bits (k * bits_per_symbol of them) to point indices.
std::vector<int> transmit_indices(std::span<const int8_t> bits, const Constellation& c, int k);

/// Gray-map bipolar bits to a K-vector of constellation points.
CVector transmit(std::span<const int8_t> bits, const Constellation& c, int k);

/// x + n with n i.i.d. circularly symmetric complex Gaussian, per-entry
/// variance sigma^2.
CVector add_awgn(const CVector& x, double sigma, Rng& rng);

}  // namespace mimo
