#include <doctest.h>

#include <cmath>
#include <random>

#include "dgheat/reconstruct.hpp"

using namespace dgheat;

namespace {

SlabContextPtr make_ctx(SlabSolution slab, const ProblemDef& prob) {
    const double kap = prob.kappa;
    auto u0xx = prob.u0_xx;
    return std::make_shared<SlabContext>(std::move(slab), prob,
                                         [kap, u0xx](double x) { return -kap * u0xx(x); });
}

// Fit a least-squares slope of log(y) against log(1/k).
double rate_fit(const std::vector<double>& ks, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(ks.size());
    for (int i = 0; i < n; ++i) {
        const double x = -std::log(ks[i]), y = -std::log(ys[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST_CASE("zero jump: the reconstruction coincides with the solution") {
    ProblemDef prob = preset("linear_manufactured");
    auto space = std::make_shared<FemSpace>(Mesh1D::uniform(0.0, 1.0, 8), 2);
    SpatialField prev = energy_projection(space, prob.u0, prob.u0_xx);
    auto [slab, rep] = solve_slab(prev, space, {0.0, 0.1}, 1, prob);
    REQUIRE(rep.converged);

    // Replace the incoming trace by the slab's own left trace: zero jump.
    SlabSolution glued = slab;
    glued.u_minus_prev = slab.trace_plus();
    auto ctx = make_ctx(glued, prob);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> xs(0.0, 1.0), ts(0.0, 0.1);
    for (int i = 0; i < 50; ++i) {
        const double x = xs(rng), t = ts(rng);
        const std::size_t e = space->mesh().locate(x);
        CHECK(ctx->jump_u(e, e, x) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        CHECK(ctx->u_tilde(e, e, x, t) ==
              doctest::Approx(ctx->u(e, x, t)).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("single-node hand value: linear blend between incoming trace and slab") {
    // r=0, p=1, two root elements on (0,1): one interior node at 1/2. The slab
    // is constant 2, the incoming trace is 1, so the reconstruction at the
    // node ramps linearly from 1 to 2 across the slab.
    auto space = std::make_shared<FemSpace>(Mesh1D::uniform(0.0, 1.0, 2), 1);
    ProblemDef prob;
    prob.xa = 0.0;
    prob.xb = 1.0;
    prob.kappa = 1.0;
    prob.f = [](double, double, double) { return 0.0; };
    prob.lipschitz = {[](double, double, double) { return 0.0; }, false};
    prob.f_degree = 0;
    prob.u0 = [](double) { return 0.0; };
    prob.u0_xx = [](double) { return 0.0; };

    const double k = 0.4;
    SlabSolution slab;
    slab.interval = {1.0, 1.0 + k};
    slab.r = 0;
    slab.space = space;
    slab.coeffs.assign(1, std::vector<double>(space->n_nodes(), 0.0));
    slab.coeffs[0][1] = 2.0 * std::sqrt(k);
    slab.u_minus_prev = SpatialField(space);
    slab.u_minus_prev.values[1] = 1.0;

    auto ctx = make_ctx(slab, prob);
    const double x = 0.5;
    const std::size_t e = space->mesh().locate(x);
    CHECK(ctx->u_tilde(e, e, x, slab.interval.t0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(ctx->u_tilde(e, e, x, slab.interval.t0 + 0.5 * k) ==
          doctest::Approx(1.5).epsilon(1e-13));
    CHECK(ctx->u_tilde(e, e, x, slab.interval.t1) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("reconstructions are continuous across consecutive slabs") {
    ProblemDef prob = preset("quadratic_gaussian");
    auto space = std::make_shared<FemSpace>(
        Mesh1D::uniform(prob.xa, prob.xb, 8, 2), 4);
    SpatialField prev = energy_projection(space, prob.u0, prob.u0_xx);

    const double k = 0.02;
    auto [slab1, rep1] = solve_slab(prev, space, {0.0, k}, 2, prob);
    REQUIRE(rep1.converged);
    auto ctx1 = make_ctx(slab1, prob);

    auto [slab2, rep2] = solve_slab(ctx1->slab().trace_minus(), space, {k, 2.0 * k}, 2, prob);
    REQUIRE(rep2.converged);
    auto ctx2 =
        std::make_shared<SlabContext>(std::move(slab2), prob, a_trace_minus_fn(ctx1));

    // Sample the interface values of both reconstructions on a dense grid.
    double mismatch_u = 0.0, mismatch_a = 0.0, scale_a = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = prob.xa + (prob.xb - prob.xa) * i / 200.0;
        const double ul = ctx1->u_tilde_at(x, k);
        const double ur = ctx2->u_tilde_at(x, k);
        mismatch_u = std::max(mismatch_u, std::abs(ul - ur));
        const double al = ctx1->a_tilde_at(x, k);
        const double ar = ctx2->a_tilde_at(x, k);
        mismatch_a = std::max(mismatch_a, std::abs(al - ar));
        scale_a = std::max({scale_a, std::abs(al), std::abs(ar)});
    }
    CHECK(mismatch_u < 1e-10);
    CHECK(mismatch_a < 1e-9 * std::max(1.0, scale_a));
}

TEST_CASE("first-slab left trace of the recovered laplacian uses the initial data") {
    ProblemDef prob = preset("linear_heat");
    auto space = std::make_shared<FemSpace>(Mesh1D::uniform(0.0, 1.0, 8, 1), 3);
    SpatialField prev = energy_projection(space, prob.u0, prob.u0_xx);
    auto [slab, rep] = solve_slab(prev, space, {0.0, 0.05}, 1, prob);
    REQUIRE(rep.converged);
    auto ctx = make_ctx(slab, prob);
    // A(t_0^-) = -kappa u0'' = pi^2 sin(pi x).
    for (double x : {0.2, 0.5, 0.8}) {
        const std::size_t e = space->mesh().locate(x);
        const double expected = M_PI * M_PI * std::sin(M_PI * x);
        const double jump = ctx->jump_a(e, e, x);
        const double a_plus = ctx->a_value(e, e, x, 0.0);
        CHECK(a_plus - jump == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("time residual vanishes when the solution is captured exactly") {
    // u = x(1-x) q(t) with q of degree r lies in the discrete space, so the
    // scheme reproduces it and the residual collapses to rounding.
    ProblemDef prob;
    prob.name = "captured";
    prob.xa = 0.0;
    prob.xb = 1.0;
    prob.kappa = 1.0;
    auto q = [](double t) { return 1.0 + 0.5 * t; };
    auto qp = [](double) { return 0.5; };
    prob.u0 = [&](double x) { return x * (1.0 - x); };
    prob.u0_xx = [](double) { return -2.0; };
    prob.f = [q, qp](double x, double t, double) {
        return x * (1.0 - x) * qp(t) + 2.0 * q(t);
    };
    prob.lipschitz = {[](double, double, double) { return 0.0; }, false};
    prob.f_degree = 1;

    auto space = std::make_shared<FemSpace>(Mesh1D::uniform(0.0, 1.0, 4), 2);
    SpatialField prev = energy_projection(space, prob.u0, prob.u0_xx);
    const double k = 0.25;
    auto ctx_prev = std::function<double(double)>([](double) { return 2.0; });
    auto [s1, r1] = solve_slab(prev, space, {0.0, k}, 1, prob, 1e-13, 100);
    REQUIRE(r1.converged);
    auto ctx1 = make_ctx(s1, prob);
    auto [s2, r2] = solve_slab(ctx1->slab().trace_minus(), space, {k, 2 * k}, 1, prob,
                               1e-13, 100);
    REQUIRE(r2.converged);
    auto ctx2 = std::make_shared<SlabContext>(std::move(s2), prob, a_trace_minus_fn(ctx1));

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> xs(0.0, 1.0);
    for (const SlabContextPtr& ctx : {SlabContextPtr(ctx1), SlabContextPtr(ctx2)}) {
        std::uniform_real_distribution<double> ts(ctx->interval().t0, ctx->interval().t1);
        for (int i = 0; i < 40; ++i) {
            const double x = xs(rng), t = ts(rng);
            const std::size_t e = space->mesh().locate(x);
            CHECK(std::abs(ctx->r_time(e, e, x, t)) < 1e-10);
        }
    }
}

TEST_CASE("integrated time residual scales at order r+2") {
    // Spatially captured profile with a non-polynomial time factor: only the
    // temporal discretization error feeds the residual, so the k-sweep shows
    // the clean rate.
    ProblemDef prob;
    prob.name = "separable";
    prob.xa = 0.0;
    prob.xb = 1.0;
    prob.kappa = 1.0;
    prob.u0 = [](double x) { return x * (1.0 - x); };
    prob.u0_xx = [](double) { return -2.0; };
    prob.f = [](double x, double t, double) {
        return std::exp(t) * (x * (1.0 - x) + 2.0);
    };
    prob.lipschitz = {[](double, double, double) { return 0.0; }, false};
    prob.f_degree = 1;

    auto space = std::make_shared<FemSpace>(Mesh1D::uniform(0.0, 1.0, 4), 2);
    SpatialField prev = energy_projection(space, prob.u0, prob.u0_xx);
    for (int r : {0, 1}) {
        std::vector<double> ks{0.2, 0.1, 0.05, 0.025}, etas;
        for (double k : ks) {
            auto [slab, rep] = solve_slab(prev, space, {0.0, k}, r, prob, 1e-13, 100);
            REQUIRE(rep.converged);
            auto ctx = make_ctx(std::move(slab), prob);
            const Mesh1D* meshes[] = {&space->mesh()};
            EstimatorSample s =
                estimators_for_slab(ctx, std::span<const Mesh1D* const>(meshes));
            etas.push_back(s.eta_time);
        }
        CHECK(rate_fit(ks, etas) > r + 1.7);
    }
}

TEST_CASE("estimator sample: union mesh bookkeeping and positivity") {
    ProblemDef prob = preset("quadratic_gaussian");
    Mesh1D base = Mesh1D::uniform(prob.xa, prob.xb, 8, 1);
    MeshDelta d;
    d.refine.insert(base.leaf(7).key.packed());
    d.refine.insert(base.leaf(8).key.packed());
    Mesh1D refined = base.apply(d);

    auto space_prev = std::make_shared<FemSpace>(base, 3);
    auto space = std::make_shared<FemSpace>(refined, 3);
    SpatialField prev = energy_projection(space_prev, prob.u0, prob.u0_xx);
    auto [slab, rep] = solve_slab(prev, space, {0.0, 0.01}, 1, prob);
    REQUIRE(rep.converged);
    auto ctx = make_ctx(std::move(slab), prob);

    const Mesh1D* meshes[] = {&refined, &base};
    EstimatorSample s = estimators_for_slab(ctx, std::span<const Mesh1D* const>(meshes));
    CHECK(s.union_mesh == Mesh1D::common_refinement(refined, base));
    CHECK(s.union_mesh.refines(refined));
    REQUIRE(s.union_to_current.size() == s.union_mesh.size());
    for (std::size_t e = 0; e < s.union_mesh.size(); ++e) {
        const Element& u = s.union_mesh.leaf(e);
        const Element& c = refined.leaf(s.union_to_current[e]);
        CHECK(u.xl >= c.xl);
        CHECK(u.xr <= c.xr);
    }
    CHECK(s.eta_time >= 0.0);
    CHECK(s.k() == doctest::Approx(0.01));
    for (std::size_t q = 0; q < s.times.size(); ++q) {
        CHECK(s.eta_space[q] >= 0.0);
        CHECK(s.eta_space_dt[q] >= 0.0);
        CHECK(s.u_tilde_sup[q] > 0.0);
        double local_max = 0.0;
        for (double v : s.eta_space_local[q]) {
            CHECK(v >= 0.0);
            local_max = std::max(local_max, v);
        }
        CHECK(local_max == doctest::Approx(s.eta_space[q]));
    }

    // Identical meshes: the union collapses to the current mesh.
    const Mesh1D* same[] = {&refined, &refined, &refined};
    EstimatorSample s2 = estimators_for_slab(ctx, std::span<const Mesh1D* const>(same));
    CHECK(s2.union_mesh == refined);
}

TEST_CASE("refining the mesh lowers the space estimator on frozen time data") {
    ProblemDef prob = preset("quadratic_gaussian");
    const double k = 0.02;
    std::vector<double> totals;
    for (int lvl : {1, 2}) {
        auto space = std::make_shared<FemSpace>(
            Mesh1D::uniform(prob.xa, prob.xb, 8, lvl), 2);
        SpatialField prev = energy_projection(space, prob.u0, prob.u0_xx);
        auto [slab, rep] = solve_slab(prev, space, {0.0, k}, 1, prob);
        REQUIRE(rep.converged);
        auto ctx = make_ctx(std::move(slab), prob);
        const Mesh1D* meshes[] = {&space->mesh()};
        EstimatorSample s = estimators_for_slab(ctx, std::span<const Mesh1D* const>(meshes));
        totals.push_back(s.int_eta_space);
    }
    CHECK(totals[1] < totals[0]);
}
