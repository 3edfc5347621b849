#ifndef DGHEAT_RECONSTRUCT_HPP
#define DGHEAT_RECONSTRUCT_HPP

#include <functional>
#include <memory>
#include <vector>

#include "dgheat/dg_step.hpp"
#include "dgheat/elliptic_estimator.hpp"
#include "dgheat/fem.hpp"
#include "dgheat/mesh.hpp"
#include "dgheat/problems.hpp"

namespace dgheat {

// Lazy space-time evaluators attached to one solved slab: the continuous
// reconstruction of U, the discrete laplacian A recovered from the projected
// reaction term, its continuous reconstruction, and the time residual. All
// evaluations are pure; element arguments are hints into the carrier meshes
// (ec: slab mesh, ep: previous-trace mesh).
class SlabContext {
  public:
    SlabContext(SlabSolution slab, const ProblemDef& problem,
                std::function<double(double)> a_trace_prev);

    const SlabSolution& slab() const { return slab_; }
    const IntervalMap& interval() const { return slab_.interval; }
    int r() const { return slab_.r; }
    double kappa() const { return kappa_; }
    int f_degree() const { return f_degree_; }
    const RefQuadrature& time_quadrature() const { return tquad_; }

    // dx-th space derivative of the dt-th time derivative at (x, t).
    double u(std::size_t ec, double x, double t, int dx = 0, int dt = 0) const;
    double jump_u(std::size_t ec, std::size_t ep, double x, int dx = 0) const;
    double u_tilde(std::size_t ec, std::size_t ep, double x, double t, int dx = 0,
                   int dt = 0) const;

    // Legendre-in-time coefficients of the projected reaction at a point.
    double pi_f(std::size_t ec, double x, double t, int dt = 0) const;
    double a_value(std::size_t ec, std::size_t ep, double x, double t, int dt = 0) const;
    double jump_a(std::size_t ec, std::size_t ep, double x) const;
    double a_tilde(std::size_t ec, std::size_t ep, double x, double t, int dt = 0) const;
    double r_time(std::size_t ec, std::size_t ep, double x, double t) const;

    // Locate-based conveniences (tests and node-continuity checks).
    double u_tilde_at(double x, double t, int dx = 0, int dt = 0) const;
    double a_tilde_at(double x, double t, int dt = 0) const;

  private:
    SlabSolution slab_;
    double kappa_;
    int f_degree_;
    std::function<double(double x, double t, double u)> f_;
    std::function<double(double)> a_trace_prev_;
    RefQuadrature tquad_;
};

using SlabContextPtr = std::shared_ptr<const SlabContext>;

// Trace of the discrete laplacian at the slab's right node, suitable as the
// a_trace_prev of the next slab; keeps the context alive via the closure.
std::function<double(double)> a_trace_minus_fn(SlabContextPtr ctx);

// Space/time estimator data sampled at the slab quadrature times on the
// common refinement of the current and up to two previous meshes.
struct EstimatorSample {
    std::vector<double> times;   // physical quadrature times
    std::vector<double> weights; // physical quadrature weights (sum to k)
    std::vector<double> eta_space;
    std::vector<double> eta_space_dt;
    std::vector<double> u_tilde_sup;
    double eta_time = 0.0;
    double int_eta_space = 0.0;
    double int_eta_space_dt = 0.0;
    double jump_sup = 0.0;          // sup of |[U]_{m-1}| on the union mesh
    double u_minus_utilde_sup = 0.0; // sup over sampled times of |Q(t)| * jump_sup
    Mesh1D union_mesh;
    std::vector<std::size_t> union_to_current; // union leaf -> slab mesh leaf
    std::vector<std::vector<double>> eta_space_local;    // [time][union leaf]
    std::vector<std::vector<double>> eta_space_dt_local; // [time][union leaf]

    double k() const;
};

EstimatorSample estimators_for_slab(const SlabContextPtr& ctx,
                                    std::span<const Mesh1D* const> meshes,
                                    Exec exec = Exec::Parallel);

// Residual of the algebraic identity tying the solved slab to the recovered
// laplacian: kappa (U', V') tested against (A, V) for every discrete V,
// integrated over the slab and normalized by the larger of the two sides.
double duality_residual(const SlabContextPtr& ctx);

} // namespace dgheat

#endif
