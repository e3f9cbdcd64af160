#include "mimo/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace mimo {

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool CMatrix::finite() const {
    for (const cx& v : e_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

bool vec_finite(const CVector& v) {
    for (const cx& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

CVector mat_vec(const CMatrix& a, const CVector& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("mat_vec: dimension mismatch");
    CVector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cx acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

CMatrix mat_mul(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("mat_mul: dimension mismatch");
    CMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cx aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

CMatrix hermitian(const CMatrix& a) {
    CMatrix h(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) h(j, i) = std::conj(a(i, j));
    return h;
}

double frobenius_norm(const CMatrix& a) {
    double s = 0.0;
    for (const cx& v : a.data()) s += std::norm(v);
    return std::sqrt(s);
}

QrFactors regularized_qr(const CMatrix& h, double sigma, double symbol_energy) {
    const std::size_t m = h.rows(), k = h.cols();
    if (m < k) throw std::invalid_argument("regularized_qr: M < K");
    if (k == 0) throw std::invalid_argument("regularized_qr: empty matrix");
    if (!h.finite()) throw std::invalid_argument("regularized_qr: non-finite input");
    if (sigma < 0.0) throw std::invalid_argument("regularized_qr: negative sigma");
    if (symbol_energy <= 0.0) throw std::invalid_argument("regularized_qr: symbol_energy <= 0");

    const double lambda = sigma / symbol_energy;
    const std::size_t n = m + k;

    // Stacked matrix [H; lambda*I].
    CMatrix a(n, k);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j) a(i, j) = h(i, j);
    for (std::size_t j = 0; j < k; ++j) a(m + j, j) = lambda;

    // Householder reflectors, one per column.
    std::vector<CVector> reflectors(k);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t len = n - j;
        CVector v(len);
        double normx2 = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            v[i] = a(j + i, j);
            normx2 += std::norm(v[i]);
        }
        const double normx = std::sqrt(normx2);
        if (normx > 0.0) {
            // alpha = -phase(x0) * ||x|| keeps the reflection well conditioned.
            const cx x0 = v[0];
            const cx phase = (std::abs(x0) > 0.0) ? x0 / std::abs(x0) : cx(1.0, 0.0);
            const cx alpha = -phase * normx;
            v[0] -= alpha;
            double vnorm2 = 0.0;
            for (const cx& e : v) vnorm2 += std::norm(e);
            if (vnorm2 > 0.0) {
                const double beta = 2.0 / vnorm2;
                for (std::size_t c = j; c < k; ++c) {
                    cx w = 0.0;
                    for (std::size_t i = 0; i < len; ++i) w += std::conj(v[i]) * a(j + i, c);
                    w *= beta;
                    for (std::size_t i = 0; i < len; ++i) a(j + i, c) -= w * v[i];
                }
            }
            a(j, j) = alpha;  // guard against residual rounding in the pivot
            for (std::size_t i = 1; i < len; ++i) a(j + i, j) = 0.0;
        }
        reflectors[j] = std::move(v);
    }

    // Thin orthonormal factor: apply reflectors in reverse to [I_K; 0].
    CMatrix qbar(n, k);
    for (std::size_t j = 0; j < k; ++j) qbar(j, j) = 1.0;
    for (std::size_t j = k; j-- > 0;) {
        const CVector& v = reflectors[j];
        double vnorm2 = 0.0;
        for (const cx& e : v) vnorm2 += std::norm(e);
        if (vnorm2 == 0.0) continue;
        const double beta = 2.0 / vnorm2;
        for (std::size_t c = 0; c < k; ++c) {
            cx w = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) w += std::conj(v[i]) * qbar(j + i, c);
            w *= beta;
            for (std::size_t i = 0; i < v.size(); ++i) qbar(j + i, c) -= w * v[i];
        }
    }

    // Sign-normalize: rotate each column/row pair so diag(R) is real positive.
    CMatrix r(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) r(i, j) = a(i, j);
    for (std::size_t l = 0; l < k; ++l) {
        const cx d = r(l, l);
        const double mag = std::abs(d);
        if (mag == 0.0) continue;  // rank-deficient and lambda == 0
        const cx phase = d / mag;
        const cx conj_phase = std::conj(phase);
        for (std::size_t j = l; j < k; ++j) r(l, j) *= conj_phase;
        r(l, l) = mag;
        for (std::size_t i = 0; i < n; ++i) qbar(i, l) *= phase;
    }

    QrFactors out;
    out.q = CMatrix(m, k);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j) out.q(i, j) = qbar(i, j);
    out.r = std::move(r);
    out.lambda = lambda;
    out.m = m;
    out.k = k;
    return out;
}

CVector matched_observable(const CMatrix& q, const CVector& y, std::uint64_t* real_mults) {
    const std::size_t m = q.rows(), k = q.cols();
    if (y.size() != m) throw std::invalid_argument("matched_observable: dimension mismatch");
    CVector yt(k);
    for (std::size_t j = 0; j < k; ++j) {
        cx acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += std::conj(q(i, j)) * y[i];
        yt[j] = acc;
    }
    if (real_mults) *real_mults += 4ull * m * k;  // one complex multiply = 4 real multiplies
    return yt;
}

Cholesky::Cholesky(const CMatrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("Cholesky: matrix not square");
    l_ = CMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            cx s = a(i, j);
            for (std::size_t p = 0; p < j; ++p) s -= l_(i, p) * std::conj(l_(j, p));
            if (i == j) {
                const double d = s.real();
                if (!(d > 0.0)) throw std::runtime_error("Cholesky: matrix not positive definite");
                l_(i, i) = std::sqrt(d);
            } else {
                l_(i, j) = s / l_(j, j).real();
            }
        }
    }
}

CVector Cholesky::solve(const CVector& b) const {
    const std::size_t n = l_.rows();
    if (b.size() != n) throw std::invalid_argument("Cholesky::solve: dimension mismatch");
    CVector x(b);
    for (std::size_t i = 0; i < n; ++i) {
        cx s = x[i];
        for (std::size_t p = 0; p < i; ++p) s -= l_(i, p) * x[p];
        x[i] = s / l_(i, i).real();
    }
    for (std::size_t i = n; i-- > 0;) {
        cx s = x[i];
        for (std::size_t p = i + 1; p < n; ++p) s -= std::conj(l_(p, i)) * x[p];
        x[i] = s / l_(i, i).real();
    }
    return x;
}

CMatrix Cholesky::solve(const CMatrix& b) const {
    CMatrix x(b.rows(), b.cols());
    CVector col(b.rows());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, c);
        CVector sol = solve(col);
        for (std::size_t i = 0; i < b.rows(); ++i) x(i, c) = sol[i];
    }
    return x;
}

}  // namespace mimo
