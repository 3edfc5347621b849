#include "dgheat/bound.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace dgheat {

double phi(double delta, double psi, const EstimatorSample& s, const LipschitzModulus& lip,
           double c_inf) {
    double integral = 0.0;
    for (std::size_t q = 0; q < s.times.size(); ++q) {
        const double arg = delta * psi + s.u_tilde_sup[q] + c_inf * s.eta_space[q];
        integral += s.weights[q] * lip(s.times[q], arg, arg);
    }
    return 1.0 + delta * (integral - 1.0);
}

namespace {

std::optional<double> quadratic_root(double psi, const EstimatorSample& s, double c_inf,
                                     double delta_max) {
    // phi(d) = 2 k psi d^2 + (B - 1) d + 1 with B = 2 int (|Utilde| + C eta).
    double b_int = 0.0;
    for (std::size_t q = 0; q < s.times.size(); ++q)
        b_int += s.weights[q] * 2.0 * (s.u_tilde_sup[q] + c_inf * s.eta_space[q]);
    const double a = 2.0 * s.k() * psi;
    const double b = b_int - 1.0;
    if (a == 0.0) {
        if (b >= 0.0) return std::nullopt; // phi stays at or above 1
        const double root = -1.0 / b;
        return (root >= 1.0 && root <= delta_max) ? std::optional<double>(root)
                                                  : std::nullopt;
    }
    const double disc = b * b - 4.0 * a;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    // Smaller root first; guard against cancellation for b < 0.
    const double r1 = (b < 0.0) ? (2.0 / (-b + sq)) : ((-b - sq) / (2.0 * a));
    const double r2 = (b < 0.0) ? ((-b + sq) / (2.0 * a)) : (2.0 / (-b - sq));
    for (double r : {std::min(r1, r2), std::max(r1, r2)})
        if (r >= 1.0 && r <= delta_max) return r;
    return std::nullopt;
}

} // namespace

namespace {

// Bisect the sign change in [lo, hi] (phi(lo) > 0 >= phi(hi)) down to
// rounding, then polish with one secant step.
double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    for (int iter = 0; iter < 120 && hi - lo > 1e-16 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    if (fhi < flo) {
        const double sec = hi - fhi * (hi - lo) / (fhi - flo);
        if (sec > lo && sec < hi) return sec;
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::optional<double> delta_root_newton(double psi, const EstimatorSample& s,
                                        const LipschitzModulus& lip, double c_inf,
                                        double delta_max) {
    auto f = [&](double d) { return phi(d, psi, s, lip, c_inf); };

    // phi(1) >= 0 always; walk a doubling grid for the first sign change.
    double lo = 1.0, flo = f(lo);
    if (flo == 0.0) return lo;
    if (flo < 0.0) return 1.0; // cannot happen analytically; be safe
    double hi = lo;
    while (hi < delta_max) {
        const double next = std::min(hi * 2.0, delta_max);
        const double fn = f(next);
        if (fn <= 0.0) return bisect_root(f, hi, next);
        hi = next;
    }

    // No sign change on the grid: the negative dip, if any, hides between
    // grid points. Chase the minimum by golden-section over [1, delta_max]
    // (phi is smooth; the moduli of interest give a single dip).
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 1.0, b = delta_max;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = f(c1), f2 = f(c2);
    for (int iter = 0; iter < 200 && (b - a) > 1e-12 * b; ++iter) {
        if (f1 <= f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - gr * (b - a);
            f1 = f(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + gr * (b - a);
            f2 = f(c2);
        }
    }
    const double dmin = 0.5 * (a + b);
    if (f(dmin) > 0.0) return std::nullopt;
    return bisect_root(f, 1.0, dmin);
}

std::optional<double> delta_root(double psi, const EstimatorSample& s,
                                 const LipschitzModulus& lip, double c_inf,
                                 double delta_max) {
    if (lip.quadratic) return quadratic_root(psi, s, c_inf, delta_max);
    return delta_root_newton(psi, s, lip, c_inf, delta_max);
}

double growth_theta(double delta, double psi, const EstimatorSample& s,
                    const LipschitzModulus& lip, double c_inf) {
    double integral = 0.0;
    for (std::size_t q = 0; q < s.times.size(); ++q) {
        const double base = s.u_tilde_sup[q] + c_inf * s.eta_space[q];
        integral += s.weights[q] * lip(s.times[q], delta * psi + base, base);
    }
    return std::exp(integral);
}

BoundState advance_bound(const BoundState& prev, const EstimatorSample& s,
                         const LipschitzModulus& lip, double c_inf, double delta_max) {
    BoundState st;
    st.m = prev.m + 1;

    double lip_eta = 0.0;
    for (std::size_t q = 0; q < s.times.size(); ++q) {
        const double eta = s.eta_space[q];
        lip_eta +=
            s.weights[q] * lip(s.times[q], s.u_tilde_sup[q], s.u_tilde_sup[q] + c_inf * eta) * eta;
    }
    st.psi = prev.theta * prev.psi + c_inf * lip_eta + s.eta_time + c_inf * s.int_eta_space_dt;

    st.max_eta_space = std::max(prev.max_eta_space,
                                *std::max_element(s.eta_space.begin(), s.eta_space.end()));
    st.max_u_minus_utilde = std::max(prev.max_u_minus_utilde, s.u_minus_utilde_sup);

    st.delta = delta_root(st.psi, s, lip, c_inf, delta_max);
    if (!st.delta) {
        st.theta = prev.theta;
        st.theta_tilde = prev.theta_tilde;
        st.bound_reconstructed = prev.bound_reconstructed;
        st.bound_error = prev.bound_error;
        return st;
    }
    st.theta = growth_theta(*st.delta, st.psi, s, lip, c_inf);
    st.theta_tilde = prev.theta_tilde * st.theta;
    st.bound_reconstructed = st.theta * st.psi + c_inf * st.max_eta_space;
    st.bound_error = st.bound_reconstructed + st.max_u_minus_utilde;
    return st;
}

} // namespace dgheat
