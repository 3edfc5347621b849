#include "dgheat/banded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

extern "C" {
void dpbtrf_(const char* uplo, const int* n, const int* kd, double* ab, const int* ldab,
             int* info);
void dpbtrs_(const char* uplo, const int* n, const int* kd, const int* nrhs,
             const double* ab, const int* ldab, double* b, const int* ldb, int* info);
void dgbtrf_(const int* m, const int* n, const int* kl, const int* ku, double* ab,
             const int* ldab, int* ipiv, int* info);
void dgbtrs_(const char* trans, const int* n, const int* kl, const int* ku,
             const int* nrhs, const double* ab, const int* ldab, const int* ipiv,
             double* b, const int* ldb, int* info);
}

namespace dgheat {

double BandedSym::get(int i, int j) const {
    if (i > j) std::swap(i, j);
    if (j - i > kd_) return 0.0;
    return at(i, j);
}

void BandedSym::apply(std::span<const double> x, std::span<double> y, double alpha) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (int j = 0; j < n_; ++j) {
        const int i0 = std::max(0, j - kd_);
        for (int i = i0; i < j; ++i) {
            const double v = at(i, j);
            y[i] += alpha * v * x[j];
            y[j] += alpha * v * x[i];
        }
        y[j] += alpha * at(j, j) * x[j];
    }
}

BandedSym& BandedSym::axpy(double alpha, const BandedSym& other) {
    for (std::size_t i = 0; i < ab_.size(); ++i) ab_[i] += alpha * other.ab_[i];
    return *this;
}

BandedCholesky::BandedCholesky(const BandedSym& a, int lo, int hi)
    : n_(hi - lo), kd_(a.kd()), ab_(static_cast<std::size_t>(kd_ + 1) * n_) {
    if (n_ <= 0) throw std::invalid_argument("empty slice in banded factorization");
    for (int j = 0; j < n_; ++j)
        for (int i = std::max(0, j - kd_); i <= j; ++i)
            ab_[static_cast<std::size_t>(j) * (kd_ + 1) + kd_ + i - j] = a.get(lo + i, lo + j);
    int info = 0;
    const int ldab = kd_ + 1;
    dpbtrf_("U", &n_, &kd_, ab_.data(), &ldab, &info);
    if (info != 0) throw std::runtime_error("banded Cholesky failed: matrix not positive definite");
}

void BandedCholesky::solve(std::span<double> rhs) const {
    if (static_cast<int>(rhs.size()) != n_)
        throw std::invalid_argument("right-hand side size mismatch");
    int info = 0;
    const int one = 1, ldab = kd_ + 1;
    dpbtrs_("U", &n_, &kd_, &one, ab_.data(), &ldab, rhs.data(), &n_, &info);
    if (info != 0) throw std::runtime_error("banded triangular solve failed");
}

BandedLU::BandedLU(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
      ab_(static_cast<std::size_t>(ldab_) * n, 0.0), ipiv_(n, 0) {}

void BandedLU::factorize() {
    int info = 0;
    dgbtrf_(&n_, &n_, &kl_, &ku_, ab_.data(), &ldab_, ipiv_.data(), &info);
    if (info != 0) throw std::runtime_error("banded LU factorization failed");
    factored_ = true;
}

void BandedLU::solve(std::span<double> rhs) const {
    if (!factored_) throw std::logic_error("solve before factorize");
    if (static_cast<int>(rhs.size()) != n_)
        throw std::invalid_argument("right-hand side size mismatch");
    int info = 0;
    const int one = 1;
    dgbtrs_("N", &n_, &kl_, &ku_, &one, ab_.data(), &ldab_, ipiv_.data(), rhs.data(), &n_,
            &info);
    if (info != 0) throw std::runtime_error("banded LU solve failed");
}

} // namespace dgheat
