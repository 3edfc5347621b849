#ifndef DGHEAT_BOUND_HPP
#define DGHEAT_BOUND_HPP

#include <optional>

#include "dgheat/problems.hpp"
#include "dgheat/reconstruct.hpp"

namespace dgheat {

// Running state of the conditional error bound. psi accumulates estimator
// mass, theta is the per-step growth factor and theta_tilde their product;
// the step condition fails (delta absent) when no admissible root exists,
// which is the adaptive algorithm's termination signal.
struct BoundState {
    int m = 0;
    double psi = 0.0;
    double theta = 1.0;
    double theta_tilde = 1.0;
    std::optional<double> delta = 1.0;
    double max_eta_space = 0.0;        // running sup of eta_space
    double max_u_minus_utilde = 0.0;   // running sup of |U - reconstruction|
    double bound_reconstructed = 0.0;  // theta*psi + C * max eta_space
    double bound_error = 0.0;          // plus the reconstruction gap

    bool no_root() const { return !delta.has_value(); }
};

// Step condition phi(delta) = 1 + delta (int L(s, delta) ds - 1) with both
// magnitude arguments of the modulus set to delta*psi + |Utilde| + C*eta.
double phi(double delta, double psi, const EstimatorSample& s, const LipschitzModulus& lip,
           double c_inf);

// Smallest root of phi in [1, delta_max]: closed quadratic form when the
// modulus is flagged quadratic, otherwise safeguarded Newton with a doubling
// bracket and bisection fallback. Absent result means no admissible root.
std::optional<double> delta_root(double psi, const EstimatorSample& s,
                                 const LipschitzModulus& lip, double c_inf,
                                 double delta_max = 1e8);

// Newton/bisection path regardless of the quadratic flag (cross-checks the
// closed form in the tests).
std::optional<double> delta_root_newton(double psi, const EstimatorSample& s,
                                        const LipschitzModulus& lip, double c_inf,
                                        double delta_max = 1e8);

double growth_theta(double delta, double psi, const EstimatorSample& s,
                    const LipschitzModulus& lip, double c_inf);

// Advance the recursion by one accepted slab. The returned state carries
// delta = nullopt when the step condition has no root; psi is still updated
// so the caller can log it.
BoundState advance_bound(const BoundState& prev, const EstimatorSample& s,
                         const LipschitzModulus& lip, double c_inf,
                         double delta_max = 1e8);

} // namespace dgheat

#endif
