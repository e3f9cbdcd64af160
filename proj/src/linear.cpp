#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mimo/detectors.hpp"

namespace mimo {

namespace {

// Max-log bit reliabilities of one unbiased scalar observation with
// effective noise variance nu. Axis separability of square QAM lets each
// axis be scanned independently.
void scalar_llrs(cx shat, double nu, const Constellation& c, double* out) {
    const double inv_nu = 1.0 / nu;
    const int bpa = c.bits_per_axis;
    const int l = c.levels_per_axis;
    auto axis = [&](double u, double* bits_out) {
        for (int t = 0; t < bpa; ++t) {
            double min_pos = std::numeric_limits<double>::infinity();
            double min_neg = std::numeric_limits<double>::infinity();
            for (int i = 0; i < l; ++i) {
                const int rank = l - 1 - i;
                const int g = rank ^ (rank >> 1);
                const int bit = (g >> (bpa - 1 - t)) & 1;
                const double d = u - c.axis_levels[static_cast<std::size_t>(i)];
                const double metric = d * d * inv_nu;
                if (bit == 0)
                    min_pos = std::min(min_pos, metric);
                else
                    min_neg = std::min(min_neg, metric);
            }
            bits_out[t] = min_neg - min_pos;
        }
    };
    axis(shat.real(), out);
    axis(shat.imag(), out + bpa);
}

}  // namespace

LmmseFilter make_lmmse_filter(const CMatrix& h, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("make_lmmse_filter: sigma must be positive");
    const std::size_t m = h.rows(), k = h.cols();
    const CMatrix hh = hermitian(h);
    CMatrix g = mat_mul(hh, h);
    const double s2 = sigma * sigma;
    for (std::size_t i = 0; i < k; ++i) g(i, i) += s2;
    const Cholesky chol(g);  // throws when the regularized Gram matrix is singular

    LmmseFilter f;
    f.m = static_cast<int>(m);
    f.k = static_cast<int>(k);
    f.w = chol.solve(hh);
    f.mu.resize(k);
    f.nu.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        cx acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += f.w(i, j) * h(j, i);
        const double mu = acc.real();
        if (!(mu > 0.0) || !(mu < 1.0))
            throw std::runtime_error("make_lmmse_filter: degenerate per-stream bias");
        f.mu[i] = mu;
        f.nu[i] = (1.0 - mu) / mu;
    }
    return f;
}

LinearDetectorResult lmmse_apply(const LmmseFilter& f, const CVector& y, const Constellation& c) {
    if (y.size() != static_cast<std::size_t>(f.m)) throw std::invalid_argument("lmmse_apply: dimension mismatch");
    LinearDetectorResult out;
    // Per-vector cost is the filter application alone; the filter itself is
    // recomputed only when the channel changes.
    out.complexity.matched_filter = 4ull * static_cast<std::uint64_t>(f.m) * static_cast<std::uint64_t>(f.k);
    const int bps = c.bits_per_symbol();
    out.llr.resize(static_cast<std::size_t>(f.k) * bps);
    for (int i = 0; i < f.k; ++i) {
        cx z = 0.0;
        for (int j = 0; j < f.m; ++j)
            z += f.w(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) * y[static_cast<std::size_t>(j)];
        const cx shat = z / f.mu[static_cast<std::size_t>(i)];
        scalar_llrs(shat, f.nu[static_cast<std::size_t>(i)], c,
                    out.llr.data() + static_cast<std::size_t>(i) * bps);
    }
    return out;
}

LinearDetectorResult lmmse_detect(const CMatrix& h, const CVector& y, const Constellation& c, double sigma) {
    return lmmse_apply(make_lmmse_filter(h, sigma), y, c);
}

SicFilter make_sic_filter(const CMatrix& h, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("make_sic_filter: sigma must be positive");
    const std::size_t m = h.rows(), k = h.cols();
    SicFilter f;
    f.m = static_cast<int>(m);
    f.k = static_cast<int>(k);

    std::vector<int> remaining(k);
    for (std::size_t i = 0; i < k; ++i) remaining[i] = static_cast<int>(i);

    CMatrix hcur = h;
    while (!remaining.empty()) {
        const std::size_t r = remaining.size();
        const LmmseFilter stage_filter = make_lmmse_filter(hcur, sigma);

        // Highest post-equalization SINR next; mu/(1-mu) is monotone in mu.
        std::size_t pick = 0;
        for (std::size_t i = 1; i < r; ++i)
            if (stage_filter.mu[i] > stage_filter.mu[pick]) pick = i;

        SicFilter::Stage st;
        st.stream = remaining[pick];
        st.mu = stage_filter.mu[pick];
        st.nu = stage_filter.nu[pick];
        st.w.resize(m);
        st.h_col.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            st.w[j] = stage_filter.w(pick, j);
            st.h_col[j] = hcur(j, pick);
        }
        f.stages.push_back(std::move(st));

        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
        CMatrix next(m, r - 1);
        for (std::size_t j = 0, dst = 0; j < r; ++j) {
            if (j == pick) continue;
            for (std::size_t i = 0; i < m; ++i) next(i, dst) = hcur(i, j);
            ++dst;
        }
        hcur = std::move(next);
    }
    return f;
}

LinearDetectorResult mmse_sic_apply(const SicFilter& f, const CVector& y, const Constellation& c) {
    if (y.size() != static_cast<std::size_t>(f.m)) throw std::invalid_argument("mmse_sic_apply: dimension mismatch");
    const int bps = c.bits_per_symbol();
    LinearDetectorResult out;
    out.llr.resize(static_cast<std::size_t>(f.k) * bps);

    CVector yres = y;
    for (std::size_t t = 0; t < f.stages.size(); ++t) {
        const SicFilter::Stage& st = f.stages[t];
        cx z = 0.0;
        for (int j = 0; j < f.m; ++j) z += st.w[static_cast<std::size_t>(j)] * yres[static_cast<std::size_t>(j)];
        out.complexity.matched_filter += 4ull * static_cast<std::uint64_t>(f.m);
        const cx shat = z / st.mu;
        out.complexity.misc += 2;
        scalar_llrs(shat, st.nu, c, out.llr.data() + static_cast<std::size_t>(st.stream) * bps);

        if (t + 1 < f.stages.size()) {
            const cx hard = c.slice(shat);
            for (int j = 0; j < f.m; ++j) yres[static_cast<std::size_t>(j)] -= st.h_col[static_cast<std::size_t>(j)] * hard;
            out.complexity.misc += 4ull * static_cast<std::uint64_t>(f.m);
        }
    }
    return out;
}

LinearDetectorResult mmse_sic_detect(const CMatrix& h, const CVector& y, const Constellation& c, double sigma,
                                     std::vector<int>* detection_order) {
    const SicFilter f = make_sic_filter(h, sigma);
    if (detection_order) {
        detection_order->clear();
        for (const auto& st : f.stages) detection_order->push_back(st.stream);
    }
    return mmse_sic_apply(f, y, c);
}

}  // namespace mimo
