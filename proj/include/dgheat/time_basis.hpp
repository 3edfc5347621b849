#ifndef DGHEAT_TIME_BASIS_HPP
#define DGHEAT_TIME_BASIS_HPP

#include <functional>
#include <span>
#include <vector>

namespace dgheat {

// Legendre polynomial L_i on [-1,1] by the three-term recurrence.
double legendre(int i, double xhat);

// Values (and optionally first/second derivatives) of L_0..L_n at xhat.
// Pass empty spans to skip derivative output.
void legendre_all(int n, double xhat, std::span<double> vals,
                  std::span<double> d1 = {}, std::span<double> d2 = {});

// Affine map between the reference interval [-1,1] and a time slab.
struct IntervalMap {
    double t0 = 0.0;
    double t1 = 1.0;

    double k() const { return t1 - t0; }
    double from_ref(double xhat) const { return 0.5 * (k() * xhat + (t0 + t1)); }
    double to_ref(double t) const { return (2.0 * t - (t0 + t1)) / k(); }
};

// Gauss-Legendre rule on [-1,1]; n points integrate degree <= 2n-1 exactly.
struct RefQuadrature {
    std::vector<double> points;
    std::vector<double> weights;

    static RefQuadrature gauss(int n);
    int size() const { return static_cast<int>(points.size()); }
};

// Lifting polynomial of degree r+1 on the slab: value -1 at the left node,
// 0 at the right node, for every degree r.
double lifting(int r, double t, const IntervalMap& map);
double lifting_dt(int r, double t, const IntervalMap& map);
double lifting_dtt(int r, double t, const IntervalMap& map);

// Scaled Legendre basis, orthonormal in L2(I): B_j(t) = sqrt((2j+1)/k) L_j(that).
// dt in {0,1,2} selects the time derivative.
double basis_value(int j, double t, const IntervalMap& map, int dt = 0);

// All of B_0..B_n (and derivatives) at t in one recurrence sweep.
void basis_all(int n, double t, const IntervalMap& map, std::span<double> vals,
               std::span<double> d1 = {}, std::span<double> d2 = {});

// Coefficients of the L2(I)-projection of f onto time polynomials of degree r,
// in the orthonormal basis. The rule must be exact for degree 2r+2 at least.
std::vector<double> project_time(const std::function<double(double)>& f, int r,
                                 const IntervalMap& map, const RefQuadrature& quad);

// Evaluate a coefficient vector in the orthonormal basis (dt-th derivative).
double eval_series(std::span<const double> coeffs, double t, const IntervalMap& map,
                   int dt = 0);

// Default number of time quadrature points for a slab of degree r when the
// nonlinearity has polynomial degree f_degree in u.
int slab_quadrature_size(int r, int f_degree);

} // namespace dgheat

#endif
