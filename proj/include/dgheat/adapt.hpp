#ifndef DGHEAT_ADAPT_HPP
#define DGHEAT_ADAPT_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dgheat/bound.hpp"
#include "dgheat/dg_step.hpp"
#include "dgheat/problems.hpp"
#include "dgheat/reconstruct.hpp"

namespace dgheat {

struct AdaptConfig {
    double ttol = 1e-3;
    double stol_plus = 1e-3;
    std::optional<double> stol_minus; // defaults to 0.1 * 2^-p * stol_plus
    int p = 2;
    int r0 = 1;
    std::optional<double> sigma; // hp slope; fixed temporal degree when absent
    double k0 = 0.1;
    int max_steps = 100;
    double delta_max = 1e8;
    double c_inf = 1.0;
    double tol_picard = 1e-11;
    int max_picard = 50;
    int n_root = 8;
    int max_refine_cycles = 20;
    double k_min_factor = 1e-14;
    std::size_t max_dofs = 10'000'000;

    double stol_minus_value() const;
    bool hp() const { return sigma.has_value(); }
};

// Temporal degree schedule in hp mode (natural logarithm).
int hp_degree(double k, const AdaptConfig& config);

// Refinement indicators of one solved slab, scaled by the inverse growth
// product accumulated so far and normalized by the step length.
struct StepIndicators {
    double ref_time = 0.0;
    std::vector<double> ref_space; // one entry per current-mesh leaf
};

StepIndicators indicators(const EstimatorSample& sample, std::size_t n_current_leaves,
                          double theta_tilde, double k, const LipschitzModulus& lip);

// Two-point extrapolation of the blow-up time from the trace norm history,
// plus the rate series recomputed against the extrapolated time.
struct BlowupEstimate {
    double t_inf = 0.0;
    std::vector<double> gammas;
};

std::optional<BlowupEstimate> blowup_extrapolate(
    std::span<const std::pair<double, double>> history);

struct StepRecord {
    int m = 0;
    double t = 0.0;
    double k = 0.0;
    int r = 0;
    std::size_t n_dofs = 0;
    double u_sup = 0.0;
    double eta_time = 0.0;
    double int_eta_space = 0.0;
    double int_eta_space_dt = 0.0;
    double psi = 0.0;
    double theta = 1.0;
    double theta_tilde = 1.0;
    std::optional<double> delta;
    double bound_rec = 0.0;
    double bound_err = 0.0;
    int resolve_cycles = 0;
};

struct RunSummary {
    int n_steps = 0;
    double t_end = 0.0;
    double u_sup_end = 0.0;
    std::optional<double> t_inf;
    std::optional<double> gamma_last;
    std::string termination;
    double wall_seconds = 0.0;
    std::size_t dof_steps = 0;
};

// Adaptive driver: resolves the initial condition, then advances slab by slab
// with threshold-driven step halving and mesh refinement/coarsening until the
// step condition loses its root, the step count is exhausted, or the step
// length underflows.
class AdaptiveDriver {
  public:
    using StepHook = std::function<void(const StepRecord&, const SlabContext&,
                                        const EstimatorSample&)>;

    AdaptiveDriver(ProblemDef problem, AdaptConfig config);

    // Phase one: refine until the projected initial condition is within the
    // coarsening threshold; phase two: refine mesh/step until the first slab
    // satisfies both indicator thresholds.
    void resolve_initial();

    // One accepted step or a termination reason.
    enum class Outcome { Accepted, Terminated };
    Outcome step();

    RunSummary run(const StepHook& on_accept = {});

    const std::vector<StepRecord>& records() const { return records_; }
    const std::string& termination() const { return termination_; }
    const Mesh1D& current_mesh() const { return mesh_; }
    const BoundState& bound() const { return bound_; }
    const std::vector<std::pair<double, double>>& trace_history() const { return history_; }
    const SpatialField& initial_projection() const { return pi_u0_; }

  private:
    ProblemDef problem_;
    AdaptConfig config_;

    Mesh1D mesh_;          // T_m candidate (inherited, possibly carried coarsening)
    Mesh1D mesh_prev_;     // T_{m-1}
    Mesh1D mesh_prev2_;    // T_{m-2}
    int have_meshes_ = 1;  // how many of the above are meaningful

    double t_ = 0.0;
    double k_ = 0.0;
    int r_ = 0;
    int m_ = 0;
    bool initialized_ = false;

    SpatialField pi_u0_;
    SpatialField prev_trace_;
    std::function<double(double)> a_trace_prev_;
    SlabContextPtr last_ctx_;
    std::optional<EstimatorSample> last_sample_;

    BoundState bound_;
    std::vector<StepRecord> records_;
    std::vector<std::pair<double, double>> history_;
    std::string termination_;
    MeshDelta carry_coarsen_;

    int degree_for(double k) const;
    double halved(double k, int r_current) const;
    void project_initial(const Mesh1D& mesh);
};

} // namespace dgheat

#endif
