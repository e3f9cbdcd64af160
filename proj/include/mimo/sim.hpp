#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mimo/channel.hpp"
#include "mimo/coding.hpp"
#include "mimo/detectors.hpp"

namespace mimo {

enum class DetectorKind { dare, lmmse, mmse_sic, ml, maxlog };

const char* detector_name(DetectorKind d);
std::optional<DetectorKind> detector_from_name(const std::string& name);

/// One Monte-Carlo experiment. All fields except `threads` determine the
/// output bit for bit; `threads` only selects how trials are scheduled
/// (1 = serial reference path, 0 = all available cores).
struct SimConfig {
    int m = 0, k = 0;
    int modulation = 16;
    DetectorKind detector = DetectorKind::dare;
    DareConfig dare;
    ChannelModel channel;
    std::vector<double> snr_grid_db;
    std::uint64_t min_trials = 1000;
    std::uint64_t min_errors = 100;
    std::uint64_t max_trials = 10'000'000;
    std::uint64_t seed = 12345;
    std::optional<CodeSpec> code;
    std::vector<double> r_diag;  ///< fixed R diagonal for the closed-form bound mode
    int threads = 0;
};

struct CurvePoint {
    double snr_db = 0.0;
    std::string metric;
    double value = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    double std_error = 0.0;
    bool capped = false;  ///< trial cap hit before the stopping rule was met
};

/// Uncoded bit error rate, one row per SNR point.
std::vector<CurvePoint> run_ber(const SimConfig& cfg);

/// Coded throughput fraction (1 - FER) and FER, per SNR point. Blocks are
/// interleaved across the subcarriers of the channel model.
std::vector<CurvePoint> run_throughput(const SimConfig& cfg);

/// Per-bit sign agreement and clamped mean absolute error against the
/// exhaustive max-log reference.
std::vector<CurvePoint> run_llr_fidelity(const SimConfig& cfg);

/// Real-multiplication statistics of the tree detector and the ratio to the
/// per-vector cost of the linear MMSE filter application.
std::vector<CurvePoint> run_complexity(const SimConfig& cfg);

/// Closed-form exclusion bound: with r_diag set, evaluates the formula on the
/// fixed diagonal; otherwise runs trials measuring how often the transmitted
/// vector is missing from the final candidate list, next to the mean bound.
std::vector<CurvePoint> run_bound(const SimConfig& cfg);

/// CSV with a '#' header block echoing the configuration, the SNR convention
/// and the coding scheme. Identical configs produce identical bytes
/// regardless of thread count.
std::string to_csv(const SimConfig& cfg, const std::string& tool, const std::vector<CurvePoint>& pts);

}  // namespace mimo
