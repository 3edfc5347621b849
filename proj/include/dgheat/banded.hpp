#ifndef DGHEAT_BANDED_HPP
#define DGHEAT_BANDED_HPP

#include <span>
#include <vector>

namespace dgheat {

// Symmetric banded matrix (upper storage, column major as LAPACK expects).
// at(i,j) addresses the entry with i <= j, |i-j| <= kd.
class BandedSym {
  public:
    BandedSym() = default;
    BandedSym(int n, int kd) : n_(n), kd_(kd), ab_(static_cast<std::size_t>(kd + 1) * n, 0.0) {}

    int n() const { return n_; }
    int kd() const { return kd_; }

    double& at(int i, int j) { return ab_[static_cast<std::size_t>(j) * (kd_ + 1) + kd_ + i - j]; }
    double at(int i, int j) const {
        return ab_[static_cast<std::size_t>(j) * (kd_ + 1) + kd_ + i - j];
    }
    double get(int i, int j) const; // 0 outside the band, symmetric access

    // y = alpha * A * x (full symmetric multiply).
    void apply(std::span<const double> x, std::span<double> y, double alpha = 1.0) const;

    BandedSym& axpy(double alpha, const BandedSym& other); // this += alpha * other

    const std::vector<double>& data() const { return ab_; }

  private:
    int n_ = 0;
    int kd_ = 0;
    std::vector<double> ab_;
};

// Cholesky factorization of a contiguous principal slice A[lo..hi) of a
// BandedSym; fails if the slice is not positive definite.
class BandedCholesky {
  public:
    BandedCholesky() = default;
    BandedCholesky(const BandedSym& a, int lo, int hi);

    // Solve in place on the slice-sized right-hand side.
    void solve(std::span<double> rhs) const;

    int n() const { return n_; }

  private:
    int n_ = 0;
    int kd_ = 0;
    std::vector<double> ab_;
};

// General banded LU (LAPACK dgbtrf/dgbtrs) for the nonsymmetric slab system.
class BandedLU {
  public:
    BandedLU() = default;
    BandedLU(int n, int kl, int ku);

    double& at(int i, int j) {
        return ab_[static_cast<std::size_t>(j) * ldab_ + kl_ + ku_ + i - j];
    }
    void add(int i, int j, double v) { at(i, j) += v; }

    void factorize();
    void solve(std::span<double> rhs) const;

    int n() const { return n_; }

  private:
    int n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 0;
    bool factored_ = false;
    std::vector<double> ab_;
    std::vector<int> ipiv_;
};

} // namespace dgheat

#endif
