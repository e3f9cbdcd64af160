#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "mimo/detectors.hpp"

namespace mimo {

bool CandidateList::contains(const std::vector<int>& symbol_indices) const {
    if (symbol_indices.size() != static_cast<std::size_t>(k)) return false;
    for (int n = 0; n < active; ++n) {
        bool same = true;
        for (int l = 0; l < k; ++l)
            if (symbols[static_cast<std::size_t>(n) * k + l] != symbol_indices[static_cast<std::size_t>(l)]) {
                same = false;
                break;
            }
        if (same) return true;
    }
    return false;
}

double default_delta_d(const Constellation& c, int n_c) {
    if (n_c < 1) throw std::invalid_argument("default_delta_d: n_c < 1");
    return (n_c + 1) / 8.0 * c.d_qam * c.d_qam;
}

std::uint64_t max_complexity_bound(int m, int k, int n_c) {
    if (m < 1 || k < 1 || n_c < 1) throw std::invalid_argument("max_complexity_bound: arguments must be positive");
    const std::uint64_t mu = static_cast<std::uint64_t>(m);
    const std::uint64_t ku = static_cast<std::uint64_t>(k);
    const std::uint64_t nu = static_cast<std::uint64_t>(n_c);
    return 4 * mu * ku + 2 * ku * (ku + 2) * nu + 12 * ku * nu;
}

double exclusion_probability_bound(const CMatrix& r, double sigma, double delta_d) {
    if (sigma <= 0.0) throw std::invalid_argument("exclusion_probability_bound: sigma must be positive");
    if (delta_d <= 0.0) throw std::invalid_argument("exclusion_probability_bound: delta_d must be positive");
    const std::size_t k = r.cols();
    const double inv_sigma2 = 1.0 / (sigma * sigma);
    double prod = 1.0;
    for (std::size_t l = 0; l < k; ++l) {
        const double rll2 = std::norm(r(l, l));
        if (rll2 == 0.0) throw std::invalid_argument("exclusion_probability_bound: zero diagonal entry");
        prod *= 1.0 - std::exp(-delta_d * rll2 * inv_sigma2);
    }
    return 1.0 - prod;
}

namespace {

// Per-parent traversal state for one layer. A parent leaves the sweep once
// its pending child is rejected (later children are farther) or once its
// last child has been accepted; each child is dispositioned at most once.
struct Parent {
    double base_d = 0.0;    // accumulated metric of the parent path
    double metric = 0.0;    // metric including the pending child at this layer
    cx yhat;                // normalized observable
    NeighborOrdering ord;
    int child = 0;          // 0-based index of the pending child
    int jmax = 1;
    bool live = true;
};

inline int region_children(cx delta, double threshold) {
    const bool re_out = std::abs(delta.real()) > threshold;
    const bool im_out = std::abs(delta.imag()) > threshold;
    if (re_out && im_out) return 4;
    return (re_out || im_out) ? 2 : 1;
}

}  // namespace

DareResult dare_detect(const QrFactors& qr, const CVector& y, const Constellation& c, double sigma,
                       const DareConfig& cfg) {
    const int k = static_cast<int>(qr.k);
    const int m = static_cast<int>(qr.m);
    if (sigma <= 0.0) throw std::invalid_argument("dare_detect: sigma must be positive (metrics divide by sigma^2)");
    if (cfg.n_c < 1) throw std::invalid_argument("dare_detect: n_c < 1");
    if (cfg.llr_clamp <= 0.0) throw std::invalid_argument("dare_detect: llr_clamp must be positive");
    if (y.size() != static_cast<std::size_t>(m)) throw std::invalid_argument("dare_detect: dimension mismatch");
    if (!vec_finite(y)) throw std::invalid_argument("dare_detect: non-finite input");

    const int nc = cfg.n_c;
    const double delta_d = cfg.delta_d > 0.0 ? cfg.delta_d : default_delta_d(c, nc);
    const double t_region = cfg.region_threshold > 0.0 ? cfg.region_threshold : c.d_qam / 8.0;
    const double inv_sigma2 = 1.0 / (sigma * sigma);

    ComplexityReport rep;
    const CVector ytilde = matched_observable(qr.q, y, &rep.matched_filter);

    // lambda^2 / sigma^2 is a per-channel constant; the two products here are
    // the only multiplications it costs this invocation.
    const double lam2_over_sigma2 = qr.lambda * qr.lambda * inv_sigma2;
    rep.misc += 2;

    // |yhat - s|^2 * (R_ll^2/sigma^2) - (lambda^2/sigma^2) * |s|^2, with the
    // squared point norms taken from the constellation table: 4 real
    // multiplications per evaluation.
    double a_l = 0.0;
    auto child_metric = [&](cx yhat, int point_idx) {
        const cx d = yhat - c.point(point_idx);
        rep.layer_metrics += 4;
        return (d.real() * d.real() + d.imag() * d.imag()) * a_l -
               lam2_over_sigma2 * c.norms2[static_cast<std::size_t>(point_idx)];
    };

    std::vector<Parent> parents(static_cast<std::size_t>(nc));
    std::vector<int> cur_sym(static_cast<std::size_t>(nc) * k, -1);
    std::vector<int> next_sym(static_cast<std::size_t>(nc) * k, -1);
    std::vector<double> cur_d(static_cast<std::size_t>(nc), 0.0);
    std::vector<double> next_d(static_cast<std::size_t>(nc), 0.0);
    int n_active = 1;

    for (int l = k; l >= 1; --l) {
        const double rll = qr.r(static_cast<std::size_t>(l - 1), static_cast<std::size_t>(l - 1)).real();
        const double inv_rll = 1.0 / rll;  // R is fixed per channel; the reciprocal is preprocessing
        a_l = rll * rll * inv_sigma2;
        rep.misc += 2;

        // Threshold from the metric vector as it stood before this layer.
        double dmin = cur_d[0];
        for (int n = 1; n < n_active; ++n) dmin = std::min(dmin, cur_d[static_cast<std::size_t>(n)]);
        const double m_tp = dmin + delta_d * a_l;
        rep.misc += 1;

        int jmax_layer = 1;
        for (int n = 0; n < n_active; ++n) {
            Parent& p = parents[static_cast<std::size_t>(n)];
            // Interference of the already-decided layers, then normalize.
            cx acc = ytilde[static_cast<std::size_t>(l - 1)];
            const int* col = cur_sym.data() + static_cast<std::size_t>(n) * k;
            for (int k2 = l + 1; k2 <= k; ++k2)
                acc -= qr.r(static_cast<std::size_t>(l - 1), static_cast<std::size_t>(k2 - 1)) *
                       c.point(col[k2 - 1]);
            rep.layer_metrics += 4ull * static_cast<std::uint64_t>(k - l);
            p.yhat = acc * inv_rll;
            rep.layer_metrics += 2;

            const int s1 = c.slice_index(p.yhat);
            p.ord = order_neighbors(p.yhat, s1, c);
            const int region = region_children(p.yhat - c.point(s1), t_region);
            p.jmax = std::min({region, nc, p.ord.count});
            p.child = 0;
            p.live = true;
            p.base_d = cur_d[static_cast<std::size_t>(n)];
            p.metric = child_metric(p.yhat, p.ord.idx[0]) + p.base_d;
            jmax_layer = std::max(jmax_layer, p.jmax);
        }

        // Sweep children breadth-first: first children of every parent, then
        // second children, and so on, accepting in encounter order until the
        // candidate budget is filled. No sorting anywhere.
        int accepted = 0;
        for (int j = 1; j <= jmax_layer && accepted < nc; ++j) {
            for (int n = 0; n < n_active && accepted < nc; ++n) {
                Parent& p = parents[static_cast<std::size_t>(n)];
                if (!p.live || p.child != j - 1) continue;
                if (p.metric < m_tp) {
                    int* dst = next_sym.data() + static_cast<std::size_t>(accepted) * k;
                    const int* src = cur_sym.data() + static_cast<std::size_t>(n) * k;
                    std::memcpy(dst + l, src + l, static_cast<std::size_t>(k - l) * sizeof(int));
                    dst[l - 1] = p.ord.idx[static_cast<std::size_t>(p.child)];
                    next_d[static_cast<std::size_t>(accepted)] = p.metric;
                    ++accepted;
                    if (p.child + 1 < p.jmax) {
                        ++p.child;
                        p.metric = child_metric(p.yhat, p.ord.idx[static_cast<std::size_t>(p.child)]) + p.base_d;
                    } else {
                        p.live = false;
                    }
                } else {
                    p.live = false;  // children come in distance order, the rest fail too
                }
            }
        }

        if (accepted > 0) {
            cur_sym.swap(next_sym);
            cur_d.swap(next_d);
            n_active = accepted;
        } else {
            // Nothing beat the threshold: carry each parent's first-child
            // expansion forward unchanged in count.
            for (int n = 0; n < n_active; ++n) {
                Parent& p = parents[static_cast<std::size_t>(n)];
                cur_sym[static_cast<std::size_t>(n) * k + (l - 1)] = p.ord.idx[0];
                cur_d[static_cast<std::size_t>(n)] = p.metric;
            }
        }
    }

    const int bps = c.bits_per_symbol();
    const int nbits = k * bps;

    CandidateList cl;
    cl.k = k;
    cl.n_c = nc;
    cl.active = n_active;
    cl.bits_per_symbol = bps;
    cl.symbols = cur_sym;
    cl.metrics = cur_d;
    for (int n = n_active; n < nc; ++n) {
        cl.metrics[static_cast<std::size_t>(n)] = std::numeric_limits<double>::infinity();
        for (int l = 0; l < k; ++l) cl.symbols[static_cast<std::size_t>(n) * k + l] = -1;
    }
    cl.labels.assign(static_cast<std::size_t>(nbits) * nc, 0);
    for (int n = 0; n < n_active; ++n)
        for (int l = 0; l < k; ++l) {
            const int sym = cl.symbols[static_cast<std::size_t>(n) * k + l];
            for (int b = 0; b < bps; ++b)
                cl.labels[static_cast<std::size_t>(n) * nbits + static_cast<std::size_t>(l) * bps + b] =
                    c.label_bit(sym, b);
        }

    int best = 0;
    for (int n = 1; n < n_active; ++n)
        if (cl.metrics[static_cast<std::size_t>(n)] < cl.metrics[static_cast<std::size_t>(best)]) best = n;
    const double d1 = cl.metrics[static_cast<std::size_t>(best)];

    // Per-bit reliability: gap between the best candidate and the best one
    // whose bit differs, clamped; bits with no counter-hypothesis in the list
    // get the full clamp magnitude.
    LlrVector llr(static_cast<std::size_t>(nbits));
    for (int b = 0; b < nbits; ++b) {
        const int8_t xb1 = cl.label(b, best);
        double dmin = std::numeric_limits<double>::infinity();
        for (int n = 0; n < n_active; ++n)
            if (cl.label(b, n) != xb1) dmin = std::min(dmin, cl.metrics[static_cast<std::size_t>(n)]);
        const double mag = std::isfinite(dmin) ? std::min(dmin - d1, cfg.llr_clamp) : cfg.llr_clamp;
        llr[static_cast<std::size_t>(b)] = xb1 * mag;
    }

    return {std::move(llr), std::move(cl), rep};
}

}  // namespace mimo
