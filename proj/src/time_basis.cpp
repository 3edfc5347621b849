#include "dgheat/time_basis.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dgheat {

double legendre(int i, double xhat) {
    assert(i >= 0);
    if (i == 0) return 1.0;
    double pm = 1.0, p = xhat;
    for (int n = 1; n < i; ++n) {
        double pn = ((2 * n + 1) * xhat * p - n * pm) / (n + 1);
        pm = p;
        p = pn;
    }
    return p;
}

void legendre_all(int n, double xhat, std::span<double> vals, std::span<double> d1,
                  std::span<double> d2) {
    assert(static_cast<int>(vals.size()) >= n + 1);
    vals[0] = 1.0;
    if (!d1.empty()) d1[0] = 0.0;
    if (!d2.empty()) d2[0] = 0.0;
    if (n == 0) return;
    vals[1] = xhat;
    if (!d1.empty()) d1[1] = 1.0;
    if (!d2.empty()) d2[1] = 0.0;
    // Differentiated three-term recurrence; stable on all of [-1,1].
    for (int m = 1; m < n; ++m) {
        const double a = (2.0 * m + 1.0) / (m + 1.0);
        const double b = static_cast<double>(m) / (m + 1.0);
        vals[m + 1] = a * xhat * vals[m] - b * vals[m - 1];
        if (!d1.empty()) d1[m + 1] = a * (vals[m] + xhat * d1[m]) - b * d1[m - 1];
        if (!d2.empty()) d2[m + 1] = a * (2.0 * d1[m] + xhat * d2[m]) - b * d2[m - 1];
    }
}

RefQuadrature RefQuadrature::gauss(int n) {
    if (n < 1) throw std::invalid_argument("quadrature size must be positive");
    RefQuadrature q;
    q.points.resize(n);
    q.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Newton iteration on the n-th Legendre polynomial root.
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) * z * p2 - (j - 1) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double dz = -p1 / pp;
            z += dz;
            if (std::abs(dz) < 1e-15) break;
        }
        q.points[i] = -z;
        q.points[n - 1 - i] = z;
        q.weights[i] = q.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    if (n % 2 == 1) q.points[n / 2] = 0.0;
    return q;
}

double lifting(int r, double t, const IntervalMap& map) {
    const double xhat = map.to_ref(t);
    const double sign = (r % 2 == 0) ? 1.0 : -1.0;
    return 0.5 * sign * (legendre(r + 1, xhat) - legendre(r, xhat));
}

namespace {

double lifting_ref_deriv(int r, double xhat, int order) {
    std::vector<double> v(r + 2), dv(r + 2), ddv(r + 2);
    legendre_all(r + 1, xhat, v, dv, ddv);
    const double sign = (r % 2 == 0) ? 1.0 : -1.0;
    const auto& d = (order == 1) ? dv : ddv;
    return 0.5 * sign * (d[r + 1] - d[r]);
}

} // namespace

double lifting_dt(int r, double t, const IntervalMap& map) {
    const double scale = 2.0 / map.k();
    return lifting_ref_deriv(r, map.to_ref(t), 1) * scale;
}

double lifting_dtt(int r, double t, const IntervalMap& map) {
    const double scale = 2.0 / map.k();
    return lifting_ref_deriv(r, map.to_ref(t), 2) * scale * scale;
}

double basis_value(int j, double t, const IntervalMap& map, int dt) {
    std::vector<double> vals(j + 1), d1, d2;
    if (dt >= 1) d1.resize(j + 1);
    if (dt >= 2) d2.resize(j + 1);
    legendre_all(j, map.to_ref(t), vals, d1, d2);
    const double norm = std::sqrt((2.0 * j + 1.0) / map.k());
    const double chain = 2.0 / map.k();
    switch (dt) {
        case 0: return norm * vals[j];
        case 1: return norm * d1[j] * chain;
        case 2: return norm * d2[j] * chain * chain;
        default: throw std::invalid_argument("time derivative order must be 0, 1 or 2");
    }
}

void basis_all(int n, double t, const IntervalMap& map, std::span<double> vals,
               std::span<double> d1, std::span<double> d2) {
    std::vector<double> lv(n + 1), l1, l2;
    if (!d1.empty()) l1.resize(n + 1);
    if (!d2.empty()) l2.resize(n + 1);
    legendre_all(n, map.to_ref(t), lv, l1, l2);
    const double chain = 2.0 / map.k();
    for (int j = 0; j <= n; ++j) {
        const double norm = std::sqrt((2.0 * j + 1.0) / map.k());
        vals[j] = norm * lv[j];
        if (!d1.empty()) d1[j] = norm * l1[j] * chain;
        if (!d2.empty()) d2[j] = norm * l2[j] * chain * chain;
    }
}

std::vector<double> project_time(const std::function<double(double)>& f, int r,
                                 const IntervalMap& map, const RefQuadrature& quad) {
    std::vector<double> coeffs(r + 1, 0.0);
    std::vector<double> basis(r + 1);
    const double jac = 0.5 * map.k();
    for (int q = 0; q < quad.size(); ++q) {
        const double t = map.from_ref(quad.points[q]);
        const double fw = f(t) * quad.weights[q] * jac;
        basis_all(r, t, map, basis);
        for (int j = 0; j <= r; ++j) coeffs[j] += fw * basis[j];
    }
    return coeffs;
}

double eval_series(std::span<const double> coeffs, double t, const IntervalMap& map,
                   int dt) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    std::vector<double> vals(n + 1), d1, d2;
    if (dt >= 1) d1.resize(n + 1);
    if (dt >= 2) d2.resize(n + 1);
    basis_all(n, t, map, vals, d1, d2);
    const std::vector<double>& sel = (dt == 0) ? vals : (dt == 1) ? d1 : d2;
    double s = 0.0;
    for (int j = 0; j <= n; ++j) s += coeffs[j] * sel[j];
    return s;
}

int slab_quadrature_size(int r, int f_degree) {
    // max(r+3, ceil((f_degree*(r+1) + r)/2) + 1): keeps the projection of the
    // composed nonlinearity near-exact so it does not pollute the time residual.
    const int deg = f_degree * (r + 1) + r;
    const int need = (deg + 1) / 2 + 1;
    return std::max(r + 3, need);
}

} // namespace dgheat
