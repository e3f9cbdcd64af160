#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace mimo {

using cx = std::complex<double>;
using CVector = std::vector<cx>;

/// Dense complex matrix, row-major storage.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols) {}

    static CMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cx& operator()(std::size_t r, std::size_t c) { return e_[r * cols_ + c]; }
    const cx& operator()(std::size_t r, std::size_t c) const { return e_[r * cols_ + c]; }

    const std::vector<cx>& data() const { return e_; }
    std::vector<cx>& data() { return e_; }

    bool finite() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cx> e_;
};

CVector mat_vec(const CMatrix& a, const CVector& x);
CMatrix mat_mul(const CMatrix& a, const CMatrix& b);
CMatrix hermitian(const CMatrix& a);
double frobenius_norm(const CMatrix& a);
bool vec_finite(const CVector& v);

/// Output of the regularized decomposition of [H; lambda*I].
/// Only the top M rows of the stacked orthonormal factor are kept;
/// the bottom K x K block can be recovered as lambda * inv(R) when needed.
struct QrFactors {
    CMatrix q;      ///< M x K
    CMatrix r;      ///< K x K upper triangular, real strictly positive diagonal
    double lambda = 0.0;
    std::size_t m = 0, k = 0;
};

/// Householder QR of the stacked (M+K) x K matrix [H; lambda*I] with
/// lambda = sigma / symbol_energy (symbol_energy = E{|s|} of the constellation).
/// Columns are sign-normalized so that diag(R) is real and positive.
QrFactors regularized_qr(const CMatrix& h, double sigma, double symbol_energy);

/// q^H * y. Charges exactly 4*M*K real multiplications to *real_mults when given.
CVector matched_observable(const CMatrix& q, const CVector& y, std::uint64_t* real_mults = nullptr);

/// Cholesky factorization of a Hermitian positive definite matrix.
/// Throws on a non-positive pivot instead of silently pseudo-inverting.
class Cholesky {
public:
    explicit Cholesky(const CMatrix& a);
    CVector solve(const CVector& b) const;
    CMatrix solve(const CMatrix& b) const;

private:
    CMatrix l_;
};

}  // namespace mimo
