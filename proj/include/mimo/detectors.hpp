#pragma once

#include <cstdint>
#include <vector>

#include "mimo/constellation.hpp"
#include "mimo/linalg.hpp"

namespace mimo {

/// Tuning knobs of the breadth-limited tree detector.
struct DareConfig {
    int n_c = 4;                    ///< maximum surviving candidates per layer
    double delta_d = 0.0;           ///< pruning slack; <= 0 selects the default rule
    double llr_clamp = 8.0;         ///< L_T, also the magnitude for bits with no counter-hypothesis
    double region_threshold = 0.0;  ///< sub-square half-width; <= 0 selects d_qam / 8
};

/// Real-multiplication counters for one detector invocation. matched_filter
/// covers the 4MK observable transform, layer_metrics the per-layer
/// interference sums, normalizations and metric evaluations, misc the small
/// per-layer constants. The total never exceeds max_complexity_bound.
struct ComplexityReport {
    std::uint64_t matched_filter = 0;
    std::uint64_t layer_metrics = 0;
    std::uint64_t misc = 0;
    std::uint64_t real_mults() const { return matched_filter + layer_metrics + misc; }
};

/// Surviving candidate vectors after the traversal. Column n (n < active)
/// holds one full K-symbol vector as point indices, its accumulated metric,
/// and its concatenated bipolar bit label (stream 1 bits first).
struct CandidateList {
    int k = 0;
    int n_c = 0;
    int active = 0;
    int bits_per_symbol = 0;

    std::vector<int> symbols;     ///< k x n_c, column-major; -1 when unused
    std::vector<double> metrics;  ///< n_c, +inf when unused
    std::vector<int8_t> labels;   ///< (k * bits_per_symbol) x n_c, column-major

    int symbol(int layer, int n) const {  // layer is 1-based
        return symbols[static_cast<std::size_t>(n) * k + (layer - 1)];
    }
    int8_t label(int bit, int n) const {
        return labels[static_cast<std::size_t>(n) * k * bits_per_symbol + bit];
    }
    bool contains(const std::vector<int>& symbol_indices) const;
};

using LlrVector = std::vector<double>;

struct DareResult {
    LlrVector llr;
    CandidateList candidates;
    ComplexityReport complexity;
};

/// Breadth-limited, sort-free tree detection with approximate per-bit
/// reliabilities. qr must come from regularized_qr for the same sigma and
/// constellation.
DareResult dare_detect(const QrFactors& qr, const CVector& y, const Constellation& c, double sigma,
                       const DareConfig& cfg);

/// Exact max-log reliabilities by exhaustive enumeration (unclamped).
/// Guarded to |O|^K <= 2^20.
LlrVector maxlog_llr_exact(const CMatrix& h, const CVector& y, const Constellation& c, double sigma);

/// Exhaustive hard maximum-likelihood decision, returned as per-stream point
/// indices. Ties resolve to the first vector in odometer order (stream 1
/// fastest, point index 0 first). Guarded to |O|^K <= 2^20.
std::vector<int> ml_detect(const CMatrix& h, const CVector& y, const Constellation& c);

struct LinearDetectorResult {
    LlrVector llr;
    ComplexityReport complexity;
};

/// Per-channel MMSE equalizer state: W = (H^H H + sigma^2 I)^-1 H^H plus the
/// per-stream bias and effective noise terms for the scalar LLR model.
struct LmmseFilter {
    CMatrix w;               ///< K x M
    std::vector<double> mu;  ///< (WH)_kk
    std::vector<double> nu;  ///< (1 - mu) / mu, post-equalization noise variance
    int m = 0, k = 0;
};

LmmseFilter make_lmmse_filter(const CMatrix& h, double sigma);
LinearDetectorResult lmmse_apply(const LmmseFilter& f, const CVector& y, const Constellation& c);
LinearDetectorResult lmmse_detect(const CMatrix& h, const CVector& y, const Constellation& c, double sigma);

/// Per-channel successive-cancellation state: stages ordered by decreasing
/// post-equalization SINR, each with its filter row and column to cancel.
struct SicFilter {
    struct Stage {
        int stream = 0;      ///< original stream index
        CVector w;           ///< filter row for this stage, length M
        CVector h_col;       ///< channel column used for cancellation
        double mu = 0.0;
        double nu = 0.0;
    };
    std::vector<Stage> stages;
    int m = 0, k = 0;
};

SicFilter make_sic_filter(const CMatrix& h, double sigma);
LinearDetectorResult mmse_sic_apply(const SicFilter& f, const CVector& y, const Constellation& c);
LinearDetectorResult mmse_sic_detect(const CMatrix& h, const CVector& y, const Constellation& c, double sigma,
                                     std::vector<int>* detection_order = nullptr);

/// Closed-form estimate of the probability that the transmitted vector is
/// dropped by threshold pruning: 1 - prod_l (1 - exp(-delta_d |R_ll|^2 / sigma^2)).
double exclusion_probability_bound(const CMatrix& r, double sigma, double delta_d);

/// Default pruning slack: (n_c + 1) / 8 * d_qam^2.
double default_delta_d(const Constellation& c, int n_c);

/// Worst-case real multiplications per received vector:
/// 4MK + 2K(K+2)N_C + 12KN_C.
std::uint64_t max_complexity_bound(int m, int k, int n_c);

}  // namespace mimo
