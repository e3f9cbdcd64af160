// Test-side reference implementations, kept independent of the library code
// paths they check.
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "mimo/channel.hpp"
#include "mimo/constellation.hpp"
#include "mimo/detectors.hpp"
#include "mimo/linalg.hpp"

namespace testref {

using mimo::CMatrix;
using mimo::CVector;
using mimo::cx;

inline CMatrix random_matrix(int m, int k, mimo::Rng& rng) {
    CMatrix h(static_cast<std::size_t>(m), static_cast<std::size_t>(k));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) h(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = rng.cgaussian(1.0);
    return h;
}

inline CVector random_vector(int m, mimo::Rng& rng) {
    CVector y(static_cast<std::size_t>(m));
    for (auto& v : y) v = rng.cgaussian(1.0);
    return y;
}

// Upper-triangular inverse by back substitution (columns of R^-1).
inline CMatrix upper_tri_inverse(const CMatrix& r) {
    const std::size_t k = r.rows();
    CMatrix inv(k, k);
    for (std::size_t c = 0; c < k; ++c) {
        CVector x(k, cx{0.0, 0.0});
        x[c] = 1.0;
        for (std::size_t i = k; i-- > 0;) {
            cx s = x[i];
            for (std::size_t j = i + 1; j < k; ++j) s -= r(i, j) * x[j];
            x[i] = s / r(i, i);
        }
        for (std::size_t i = 0; i < k; ++i) inv(i, c) = x[i];
    }
    return inv;
}

// Plain odometer enumeration of all symbol vectors with full-recompute
// distances; deliberately structured unlike the library enumerators.
inline mimo::LlrVector maxlog_odometer(const CMatrix& h, const CVector& y, const mimo::Constellation& c,
                                       double sigma) {
    const int m = static_cast<int>(h.rows());
    const int k = static_cast<int>(h.cols());
    const int bps = c.bits_per_symbol();
    const int nbits = k * bps;
    const double inv_sigma2 = 1.0 / (sigma * sigma);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> min_pos(static_cast<std::size_t>(nbits), inf), min_neg(static_cast<std::size_t>(nbits), inf);

    long long total = 1;
    for (int i = 0; i < k; ++i) total *= c.order;
    for (long long v = 0; v < total; ++v) {
        long long rem = v;
        std::vector<int> idx(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            idx[static_cast<std::size_t>(i)] = static_cast<int>(rem % c.order);
            rem /= c.order;
        }
        double d = 0.0;
        for (int row = 0; row < m; ++row) {
            cx acc = y[static_cast<std::size_t>(row)];
            for (int col = 0; col < k; ++col)
                acc -= h(static_cast<std::size_t>(row), static_cast<std::size_t>(col)) *
                       c.point(idx[static_cast<std::size_t>(col)]);
            d += std::norm(acc);
        }
        d *= inv_sigma2;
        for (int stream = 0; stream < k; ++stream)
            for (int b = 0; b < bps; ++b) {
                const int bit = stream * bps + b;
                auto& slot = c.label_bit(idx[static_cast<std::size_t>(stream)], b) > 0
                                 ? min_pos[static_cast<std::size_t>(bit)]
                                 : min_neg[static_cast<std::size_t>(bit)];
                slot = std::min(slot, d);
            }
    }
    mimo::LlrVector llr(static_cast<std::size_t>(nbits));
    for (int b = 0; b < nbits; ++b)
        llr[static_cast<std::size_t>(b)] = min_neg[static_cast<std::size_t>(b)] - min_pos[static_cast<std::size_t>(b)];
    return llr;
}

// Direct recomputation of one candidate's accumulated metric from the
// returned symbols, independent of the traversal bookkeeping.
inline double recompute_metric(const mimo::QrFactors& qr, const CVector& y, const mimo::Constellation& c,
                               double sigma, const mimo::CandidateList& cl, int n) {
    const int k = cl.k;
    const double inv_sigma2 = 1.0 / (sigma * sigma);
    const CVector ytilde = mimo::matched_observable(qr.q, y);
    double total = 0.0;
    for (int l = 1; l <= k; ++l) {
        cx acc = ytilde[static_cast<std::size_t>(l - 1)];
        for (int k2 = l + 1; k2 <= k; ++k2)
            acc -= qr.r(static_cast<std::size_t>(l - 1), static_cast<std::size_t>(k2 - 1)) *
                   c.point(cl.symbol(k2, n));
        const double rll = qr.r(static_cast<std::size_t>(l - 1), static_cast<std::size_t>(l - 1)).real();
        const cx yhat = acc / rll;
        const cx s = c.point(cl.symbol(l, n));
        total += (std::norm(yhat - s) * rll * rll - qr.lambda * qr.lambda * std::norm(s)) * inv_sigma2;
    }
    return total;
}

// Textbook MMSE: explicit Gauss-Jordan inverse of (H^H H + sigma^2 I), then
// per-stream slicing of the unbiased estimates.
inline std::vector<int> mmse_reference_hard(const CMatrix& h, const CVector& y, const mimo::Constellation& c,
                                            double sigma) {
    const std::size_t m = h.rows(), k = h.cols();
    CMatrix g(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            cx acc = i == j ? cx{sigma * sigma, 0.0} : cx{0.0, 0.0};
            for (std::size_t r = 0; r < m; ++r) acc += std::conj(h(r, i)) * h(r, j);
            g(i, j) = acc;
        }
    // Gauss-Jordan with the identity appended.
    CMatrix inv = CMatrix::identity(k);
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(g(r, col)) > std::abs(g(piv, col))) piv = r;
        if (piv != col)
            for (std::size_t cc = 0; cc < k; ++cc) {
                std::swap(g(col, cc), g(piv, cc));
                std::swap(inv(col, cc), inv(piv, cc));
            }
        const cx p = g(col, col);
        for (std::size_t cc = 0; cc < k; ++cc) {
            g(col, cc) /= p;
            inv(col, cc) /= p;
        }
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const cx f = g(r, col);
            if (f == cx{0.0, 0.0}) continue;
            for (std::size_t cc = 0; cc < k; ++cc) {
                g(r, cc) -= f * g(col, cc);
                inv(r, cc) -= f * inv(col, cc);
            }
        }
    }
    // shat = inv * H^H y, unbiased by mu_k = (inv * H^H H)_kk.
    CVector hy(k);
    for (std::size_t i = 0; i < k; ++i) {
        cx acc = 0.0;
        for (std::size_t r = 0; r < m; ++r) acc += std::conj(h(r, i)) * y[r];
        hy[i] = acc;
    }
    std::vector<int> hard(k);
    for (std::size_t i = 0; i < k; ++i) {
        cx z = 0.0;
        for (std::size_t j = 0; j < k; ++j) z += inv(i, j) * hy[j];
        // mu_i = e_i^T inv (H^H H) e_i = e_i^T inv (G - sigma^2 I) e_i
        cx mu = -inv(i, i) * sigma * sigma;
        mu += 1.0;  // inv * G = I
        hard[i] = c.slice_index(z / mu.real());
    }
    return hard;
}

}  // namespace testref
