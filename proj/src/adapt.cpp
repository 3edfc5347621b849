#include "dgheat/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace dgheat {

double AdaptConfig::stol_minus_value() const {
    return stol_minus ? *stol_minus : 0.1 * std::pow(2.0, -p) * stol_plus;
}

int hp_degree(double k, const AdaptConfig& config) {
    if (!config.hp()) return config.r0;
    const double raw = config.r0 + *config.sigma * std::log(k / config.k0);
    return std::max(0, static_cast<int>(std::ceil(raw)));
}

StepIndicators indicators(const EstimatorSample& sample, std::size_t n_current_leaves,
                          double theta_tilde, double k, const LipschitzModulus& lip) {
    StepIndicators ind;
    ind.ref_time = sample.eta_time / theta_tilde;
    ind.ref_space.assign(n_current_leaves, 0.0);

    // Lambda per union leaf: the modulus-weighted local space estimator plus
    // the local derivative estimator, integrated over the slab. The modulus
    // arguments use the plain (unscaled) global space estimator.
    const std::size_t n_union = sample.union_mesh.size();
    std::vector<double> lambda(n_union, 0.0);
    for (std::size_t q = 0; q < sample.times.size(); ++q) {
        const double w = sample.weights[q];
        const double lq = lip(sample.times[q], sample.u_tilde_sup[q],
                              sample.u_tilde_sup[q] + sample.eta_space[q]);
        for (std::size_t e = 0; e < n_union; ++e)
            lambda[e] += w * (lq * sample.eta_space_local[q][e] +
                              sample.eta_space_dt_local[q][e]);
    }
    for (std::size_t e = 0; e < n_union; ++e) {
        const std::size_t target = sample.union_to_current[e];
        ind.ref_space[target] = std::max(ind.ref_space[target], lambda[e]);
    }
    const double scale = 1.0 / (theta_tilde * k);
    for (double& v : ind.ref_space) v *= scale;
    return ind;
}

std::optional<BlowupEstimate> blowup_extrapolate(
    std::span<const std::pair<double, double>> history) {
    const std::size_t n = history.size();
    if (n < 2) return std::nullopt;
    const auto [t1, u1] = history[n - 2];
    const auto [t2, u2] = history[n - 1];
    if (!(u2 > u1)) return std::nullopt;

    BlowupEstimate est;
    est.t_inf = (t2 * u2 - t1 * u1) / (u2 - u1);
    for (std::size_t i = 1; i < n; ++i) {
        const auto [ta, ua] = history[i - 1];
        const auto [tb, ub] = history[i];
        if (!(ub > ua) || !(est.t_inf > tb)) {
            est.gammas.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        est.gammas.push_back((std::log(ub) - std::log(ua)) /
                             (std::log(est.t_inf - ta) - std::log(est.t_inf - tb)));
    }
    return est;
}

AdaptiveDriver::AdaptiveDriver(ProblemDef problem, AdaptConfig config)
    : problem_(std::move(problem)), config_(std::move(config)) {
    mesh_ = Mesh1D::uniform(problem_.xa, problem_.xb, config_.n_root);
    k_ = config_.k0;
    r_ = config_.r0;
}

int AdaptiveDriver::degree_for(double k) const { return hp_degree(k, config_); }

double AdaptiveDriver::halved(double k, int r_current) const {
    double next = 0.5 * k;
    if (config_.hp() && degree_for(next) != r_current) next = 0.25 * k;
    return next;
}

void AdaptiveDriver::project_initial(const Mesh1D& mesh) {
    auto space = std::make_shared<FemSpace>(mesh, config_.p);
    if (space->n_nodes() > config_.max_dofs)
        throw std::runtime_error("initial refinement exceeded the degree-of-freedom budget");
    pi_u0_ = energy_projection(space, problem_.u0, problem_.u0_xx);
}

void AdaptiveDriver::resolve_initial() {
    const double stol_minus = config_.stol_minus_value();

    // Refine wherever the projected initial condition misses locally.
    project_initial(mesh_);
    for (;;) {
        const auto& space = *pi_u0_.space;
        auto err = [&](double x) { return problem_.u0(x) - pi_u0_.eval(x); };
        std::vector<double> local =
            element_sup(err, space.mesh(), space.default_samples());
        MeshDelta delta;
        for (std::size_t e = 0; e < local.size(); ++e)
            if (local[e] > stol_minus) delta.refine.insert(space.mesh().leaf(e).key.packed());
        if (delta.refine.empty()) break;
        mesh_ = space.mesh().apply(delta);
        project_initial(mesh_);
    }

    // Refine mesh and step until the first slab meets both thresholds.
    for (int cycle = 0; cycle < config_.max_refine_cycles; ++cycle) {
        r_ = degree_for(k_);
        auto space = pi_u0_.space;
        IntervalMap iv{0.0, k_};
        auto [slab, report] =
            solve_slab(pi_u0_, space, iv, r_, problem_, config_.tol_picard, config_.max_picard);
        if (!report.converged) {
            k_ = halved(k_, r_);
            continue;
        }
        const double kap = problem_.kappa;
        auto u0xx = problem_.u0_xx;
        auto ctx = std::make_shared<SlabContext>(
            std::move(slab), problem_, [kap, u0xx](double x) { return -kap * u0xx(x); });
        const Mesh1D* meshes[] = {&space->mesh()};
        EstimatorSample sample =
            estimators_for_slab(ctx, std::span<const Mesh1D* const>(meshes));
        StepIndicators ind = indicators(sample, space->mesh().size(), 1.0, k_, problem_.lipschitz);

        MeshDelta delta;
        for (std::size_t e = 0; e < ind.ref_space.size(); ++e)
            if (ind.ref_space[e] > config_.stol_plus)
                delta.refine.insert(space->mesh().leaf(e).key.packed());
        const bool time_bad = ind.ref_time > config_.ttol;
        if (!time_bad && delta.refine.empty()) break;
        if (time_bad) k_ = halved(k_, r_);
        if (!delta.refine.empty()) {
            mesh_ = space->mesh().apply(delta);
            project_initial(mesh_);
        }
        if (k_ < config_.k_min_factor * config_.k0)
            throw std::runtime_error("time step underflow while resolving the initial condition");
    }

    mesh_ = pi_u0_.space->mesh();
    mesh_prev_ = mesh_;
    mesh_prev2_ = mesh_;
    have_meshes_ = 1;
    prev_trace_ = pi_u0_;
    const double kap = problem_.kappa;
    auto u0xx = problem_.u0_xx;
    a_trace_prev_ = [kap, u0xx](double x) { return -kap * u0xx(x); };
    r_ = degree_for(k_);
    initialized_ = true;
}

AdaptiveDriver::Outcome AdaptiveDriver::step() {
    if (!initialized_) resolve_initial();
    if (!termination_.empty()) return Outcome::Terminated;

    // Inherit the previous mesh with any deferred coarsening, and the step.
    Mesh1D mesh = carry_coarsen_.empty() ? mesh_ : mesh_.apply(carry_coarsen_);
    carry_coarsen_ = {};
    double k = k_;
    int r = degree_for(k);

    SlabContextPtr ctx;
    std::optional<EstimatorSample> sample;
    StepIndicators ind;
    bool accepted = false;
    int refine_cycles = 0;
    int cycles = 0;
    PicardReport report;

    // Mesh-change cycles are capped (indicator floors can otherwise oscillate
    // forever); pure step-halving bottoms out at the k_min floor instead.
    const int guard_limit = 16 * config_.max_refine_cycles + 64;
    for (int guard = 0; guard < guard_limit; ++guard) {
        cycles = guard;
        auto space = std::make_shared<FemSpace>(mesh, config_.p);
        if (space->n_nodes() > config_.max_dofs) {
            termination_ = "dof budget exhausted";
            return Outcome::Terminated;
        }
        IntervalMap iv{t_, t_ + k};
        SlabSolution slab;
        std::tie(slab, report) = solve_slab(prev_trace_, space, iv, r, problem_,
                                            config_.tol_picard, config_.max_picard);
        if (!report.converged) {
            k = halved(k, r);
            r = degree_for(k);
            if (k < config_.k_min_factor * config_.k0) {
                termination_ = "time step underflow";
                return Outcome::Terminated;
            }
            continue;
        }
        ctx = std::make_shared<SlabContext>(std::move(slab), problem_, a_trace_prev_);

        std::vector<const Mesh1D*> meshes;
        meshes.push_back(&mesh);
        meshes.push_back(&mesh_prev_);
        if (have_meshes_ >= 2) meshes.push_back(&mesh_prev2_);
        sample = estimators_for_slab(ctx, meshes);

        ind = indicators(*sample, mesh.size(), bound_.theta_tilde, k, problem_.lipschitz);

        const bool time_bad = ind.ref_time > config_.ttol;
        MeshDelta delta;
        for (std::size_t e = 0; e < ind.ref_space.size(); ++e) {
            if (ind.ref_space[e] > config_.stol_plus)
                delta.refine.insert(mesh.leaf(e).key.packed());
            else if (ind.ref_space[e] < config_.stol_minus_value())
                delta.coarsen.insert(mesh.leaf(e).key.packed());
        }
        if (!time_bad && delta.refine.empty()) {
            // Accepted; coarsening candidates carry over to the next step's
            // inherited mesh so this step's estimators stay consistent.
            carry_coarsen_.coarsen = std::move(delta.coarsen);
            accepted = true;
            break;
        }
        if (time_bad) {
            k = halved(k, r);
            r = degree_for(k);
            if (k < config_.k_min_factor * config_.k0) {
                termination_ = "time step underflow";
                return Outcome::Terminated;
            }
        }
        if (!delta.refine.empty()) {
            if (++refine_cycles > config_.max_refine_cycles) break;
            // Coarsening is deferred to the accepted mesh: merging inside the
            // violation loop lets refine/coarsen pairs oscillate forever.
            MeshDelta refine_only;
            refine_only.refine = std::move(delta.refine);
            mesh = mesh.apply(refine_only);
        }
    }
    if (!accepted) {
        termination_ = "refinement livelock";
        return Outcome::Terminated;
    }

    BoundState next = advance_bound(bound_, *sample, problem_.lipschitz, config_.c_inf,
                                    config_.delta_max);
    if (next.no_root()) {
        termination_ = "no admissible root of the step condition";
        return Outcome::Terminated;
    }

    // Accept the step.
    m_ += 1;
    t_ += k;
    k_ = k;
    r_ = r;
    bound_ = next;
    mesh_prev2_ = mesh_prev_;
    mesh_prev_ = mesh;
    mesh_ = mesh;
    have_meshes_ = std::min(have_meshes_ + 1, 2);

    const SpatialField trace = ctx->slab().trace_minus();
    const double usup = sup_norm(trace);
    history_.emplace_back(t_, usup);

    StepRecord rec;
    rec.m = m_;
    rec.t = t_;
    rec.k = k;
    rec.r = r;
    rec.n_dofs = ctx->slab().space->n_interior();
    rec.u_sup = usup;
    rec.eta_time = sample->eta_time;
    rec.int_eta_space = sample->int_eta_space;
    rec.int_eta_space_dt = sample->int_eta_space_dt;
    rec.psi = bound_.psi;
    rec.theta = bound_.theta;
    rec.theta_tilde = bound_.theta_tilde;
    rec.delta = bound_.delta;
    rec.bound_rec = bound_.bound_reconstructed;
    rec.bound_err = bound_.bound_error;
    rec.resolve_cycles = cycles;
    records_.push_back(rec);

    prev_trace_ = trace;
    a_trace_prev_ = a_trace_minus_fn(ctx);
    last_ctx_ = ctx;
    last_sample_ = std::move(sample);
    return Outcome::Accepted;
}

RunSummary AdaptiveDriver::run(const StepHook& on_accept) {
    const auto start = std::chrono::steady_clock::now();
    if (!initialized_) resolve_initial();
    while (m_ < config_.max_steps) {
        if (step() == Outcome::Terminated) break;
        if (on_accept) on_accept(records_.back(), *last_ctx_, *last_sample_);
    }
    if (termination_.empty()) termination_ = "step limit reached";

    RunSummary s;
    s.n_steps = m_;
    s.t_end = t_;
    s.termination = termination_;
    if (!records_.empty()) s.u_sup_end = records_.back().u_sup;
    if (auto est = blowup_extrapolate(history_)) {
        s.t_inf = est->t_inf;
        if (!est->gammas.empty()) s.gamma_last = est->gammas.back();
    }
    for (const auto& r : records_) s.dof_steps += r.n_dofs;
    s.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return s;
}

} // namespace dgheat
