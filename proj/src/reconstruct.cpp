#include "dgheat/reconstruct.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace dgheat {

SlabContext::SlabContext(SlabSolution slab, const ProblemDef& problem,
                         std::function<double(double)> a_trace_prev)
    : slab_(std::move(slab)), kappa_(problem.kappa), f_degree_(problem.f_degree),
      f_(problem.f), a_trace_prev_(std::move(a_trace_prev)),
      tquad_(RefQuadrature::gauss(slab_quadrature_size(slab_.r, problem.f_degree))) {}

double SlabContext::u(std::size_t ec, double x, double t, int dx, int dt) const {
    const int nb = slab_.r + 1;
    std::vector<double> b(nb), d1, d2;
    if (dt >= 1) d1.resize(nb);
    if (dt >= 2) d2.resize(nb);
    basis_all(slab_.r, t, slab_.interval, b, d1, d2);
    const std::vector<double>& sel = (dt == 0) ? b : (dt == 1) ? d1 : d2;

    const FemSpace& sp = *slab_.space;
    const int p = sp.p();
    const std::size_t base = sp.first_node(ec);
    std::vector<double> local(p + 1, 0.0);
    for (int j = 0; j < nb; ++j) {
        const double w = sel[j];
        if (w == 0.0) continue;
        for (int a = 0; a <= p; ++a) local[a] += w * slab_.coeffs[j][base + a];
    }
    const Element& el = sp.mesh().leaf(ec);
    const double xhat = (2.0 * x - (el.xl + el.xr)) / el.h();
    double v = sp.basis().eval(local, xhat, dx);
    const double chain = 2.0 / el.h();
    for (int d = 0; d < dx; ++d) v *= chain;
    return v;
}

double SlabContext::jump_u(std::size_t ec, std::size_t ep, double x, int dx) const {
    return u(ec, x, slab_.interval.t0, dx, 0) - slab_.u_minus_prev.eval_in(ep, x, dx);
}

double SlabContext::u_tilde(std::size_t ec, std::size_t ep, double x, double t, int dx,
                            int dt) const {
    double q;
    switch (dt) {
        case 0: q = lifting(slab_.r, t, slab_.interval); break;
        case 1: q = lifting_dt(slab_.r, t, slab_.interval); break;
        default: q = lifting_dtt(slab_.r, t, slab_.interval); break;
    }
    return u(ec, x, t, dx, dt) + q * jump_u(ec, ep, x, dx);
}

double SlabContext::pi_f(std::size_t ec, double x, double t, int dt) const {
    const int nb = slab_.r + 1;
    std::vector<double> coeff(nb, 0.0), bq(nb);
    const double jac = 0.5 * slab_.interval.k();
    for (int q = 0; q < tquad_.size(); ++q) {
        const double tq = slab_.interval.from_ref(tquad_.points[q]);
        const double uval = u(ec, x, tq, 0, 0);
        const double fw = f_(x, tq, uval) * tquad_.weights[q] * jac;
        basis_all(slab_.r, tq, slab_.interval, bq);
        for (int j = 0; j < nb; ++j) coeff[j] += fw * bq[j];
    }
    return eval_series(coeff, t, slab_.interval, dt);
}

double SlabContext::a_value(std::size_t ec, std::size_t ep, double x, double t,
                            int dt) const {
    return pi_f(ec, x, t, dt) - u_tilde(ec, ep, x, t, 0, dt + 1);
}

double SlabContext::jump_a(std::size_t ec, std::size_t ep, double x) const {
    return a_value(ec, ep, x, slab_.interval.t0, 0) - a_trace_prev_(x);
}

double SlabContext::a_tilde(std::size_t ec, std::size_t ep, double x, double t,
                            int dt) const {
    double q;
    switch (dt) {
        case 0: q = lifting(slab_.r, t, slab_.interval); break;
        case 1: q = lifting_dt(slab_.r, t, slab_.interval); break;
        default: q = lifting_dtt(slab_.r, t, slab_.interval); break;
    }
    return a_value(ec, ep, x, t, dt) + q * jump_a(ec, ep, x);
}

double SlabContext::r_time(std::size_t ec, std::size_t ep, double x, double t) const {
    const double ut = u_tilde(ec, ep, x, t, 0, 0);
    return f_(x, t, ut) - u_tilde(ec, ep, x, t, 0, 1) - a_tilde(ec, ep, x, t, 0);
}

double SlabContext::u_tilde_at(double x, double t, int dx, int dt) const {
    const std::size_t ec = slab_.space->mesh().locate(x);
    const std::size_t ep = slab_.u_minus_prev.space->mesh().locate(x);
    return u_tilde(ec, ep, x, t, dx, dt);
}

double SlabContext::a_tilde_at(double x, double t, int dt) const {
    const std::size_t ec = slab_.space->mesh().locate(x);
    const std::size_t ep = slab_.u_minus_prev.space->mesh().locate(x);
    return a_tilde(ec, ep, x, t, dt);
}

std::function<double(double)> a_trace_minus_fn(SlabContextPtr ctx) {
    return [ctx](double x) {
        const std::size_t ec = ctx->slab().space->mesh().locate(x);
        const std::size_t ep = ctx->slab().u_minus_prev.space->mesh().locate(x);
        return ctx->a_value(ec, ep, x, ctx->interval().t1, 0);
    };
}

double EstimatorSample::k() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

namespace {

// Adapters exposing the slab evaluators through the estimator interface.
class UTildeView final : public LocalEvaluable {
  public:
    UTildeView(const SlabContext& ctx, const std::vector<std::size_t>& to_curr,
               const std::vector<std::size_t>& to_prev, double t, int dt)
        : ctx_(ctx), to_curr_(to_curr), to_prev_(to_prev), t_(t), dt_(dt) {}
    double operator()(std::size_t e, double x, int deriv) const override {
        return ctx_.u_tilde(to_curr_[e], to_prev_[e], x, t_, deriv, dt_);
    }

  private:
    const SlabContext& ctx_;
    const std::vector<std::size_t>&to_curr_, &to_prev_;
    double t_;
    int dt_;
};

class ATildeView final : public LocalEvaluable {
  public:
    ATildeView(const SlabContext& ctx, const std::vector<std::size_t>& to_curr,
               const std::vector<std::size_t>& to_prev, double t, int dt)
        : ctx_(ctx), to_curr_(to_curr), to_prev_(to_prev), t_(t), dt_(dt) {}
    double operator()(std::size_t e, double x, int deriv) const override {
        assert(deriv == 0);
        (void)deriv;
        return ctx_.a_tilde(to_curr_[e], to_prev_[e], x, t_, dt_);
    }

  private:
    const SlabContext& ctx_;
    const std::vector<std::size_t>&to_curr_, &to_prev_;
    double t_;
    int dt_;
};

double sampled_sup(const Mesh1D& mesh, int ns, Exec exec,
                   const std::function<double(std::size_t, double)>& f) {
    return max_over(exec, mesh.size(), [&](std::size_t e) {
        const Element& el = mesh.leaf(e);
        double m = std::max(std::abs(f(e, el.xl)), std::abs(f(e, el.xr)));
        for (int s = 0; s < ns; ++s) {
            const double x = el.xl + el.h() * (s + 1.0) / (ns + 1.0);
            m = std::max(m, std::abs(f(e, x)));
        }
        return m;
    });
}

} // namespace

EstimatorSample estimators_for_slab(const SlabContextPtr& ctx,
                                    std::span<const Mesh1D* const> meshes, Exec exec) {
    const SlabContext& c = *ctx;
    const IntervalMap& iv = c.interval();
    const double k = iv.k();
    const RefQuadrature& tq = c.time_quadrature();
    const int nq = tq.size();

    EstimatorSample s;
    s.union_mesh = Mesh1D::common_refinement(meshes);
    const Mesh1D& um = s.union_mesh;

    const Mesh1D& cur = c.slab().space->mesh();
    const Mesh1D& prev = c.slab().u_minus_prev.space->mesh();
    std::vector<std::size_t> to_curr(um.size()), to_prev(um.size());
    for (std::size_t e = 0; e < um.size(); ++e) {
        to_curr[e] = cur.locate(um.leaf(e).mid());
        to_prev[e] = prev.locate(um.leaf(e).mid());
    }
    s.union_to_current = to_curr;

    // The composed reaction raises the spatial degree of the residual, so the
    // sup-sampling density scales with it.
    const int p = c.slab().space->p();
    const int ns = std::max(1, c.f_degree()) * p + 3;

    s.times.resize(nq);
    s.weights.resize(nq);
    s.eta_space.resize(nq);
    s.eta_space_dt.resize(nq);
    s.u_tilde_sup.resize(nq);
    s.eta_space_local.resize(nq);
    s.eta_space_dt_local.resize(nq);

    double eta_time = 0.0;
    double q_env = 1.0; // |Q| at the left node
    for (int q = 0; q < nq; ++q) {
        const double t = iv.from_ref(tq.points[q]);
        const double w = tq.weights[q] * 0.5 * k;
        s.times[q] = t;
        s.weights[q] = w;

        UTildeView wq(c, to_curr, to_prev, t, 0);
        ATildeView gq(c, to_curr, to_prev, t, 0);
        EllipticEstimate est = estimate(wq, gq, um, c.kappa(), ns, exec);
        s.eta_space[q] = est.total;
        s.eta_space_local[q].resize(um.size());
        for (std::size_t e = 0; e < um.size(); ++e) s.eta_space_local[q][e] = est.local(e);

        UTildeView wdq(c, to_curr, to_prev, t, 1);
        ATildeView gdq(c, to_curr, to_prev, t, 1);
        EllipticEstimate estd = estimate(wdq, gdq, um, c.kappa(), ns, exec);
        s.eta_space_dt[q] = estd.total;
        s.eta_space_dt_local[q].resize(um.size());
        for (std::size_t e = 0; e < um.size(); ++e)
            s.eta_space_dt_local[q][e] = estd.local(e);

        s.u_tilde_sup[q] = sampled_sup(um, ns, exec, [&](std::size_t e, double x) {
            return c.u_tilde(to_curr[e], to_prev[e], x, t, 0, 0);
        });
        const double r_norm = sampled_sup(um, ns, exec, [&](std::size_t e, double x) {
            return c.r_time(to_curr[e], to_prev[e], x, t);
        });
        eta_time += w * r_norm;
        q_env = std::max(q_env, std::abs(lifting(c.r(), t, iv)));

        s.int_eta_space += w * s.eta_space[q];
        s.int_eta_space_dt += w * s.eta_space_dt[q];
    }
    s.eta_time = eta_time;
    s.jump_sup = sampled_sup(um, ns, exec, [&](std::size_t e, double x) {
        return c.jump_u(to_curr[e], to_prev[e], x, 0);
    });
    s.u_minus_utilde_sup = q_env * s.jump_sup;
    return s;
}

double duality_residual(const SlabContextPtr& ctx) {
    const SlabContext& c = *ctx;
    const SlabSolution& slab = c.slab();
    const FemSpace& sp = *slab.space;
    const int p = sp.p();
    const int nb = slab.r + 1;
    const int n_nodes = static_cast<int>(sp.n_nodes());
    const double k = c.interval().k();

    Operators ops = assemble(sp, c.kappa());
    std::vector<std::vector<double>> lhs(nb, std::vector<double>(n_nodes, 0.0));
    for (int i = 0; i < nb; ++i)
        ops.stiffness.apply(slab.coeffs[i], lhs[i]);

    // (A, B_i phi) integrated with the slab quadrature on the union of the
    // current and previous meshes, where every factor is piecewise polynomial.
    const Mesh1D& cur = sp.mesh();
    const Mesh1D& prev = slab.u_minus_prev.space->mesh();
    const Mesh1D um = Mesh1D::common_refinement(cur, prev);
    std::vector<std::size_t> to_curr(um.size()), to_prev(um.size());
    for (std::size_t e = 0; e < um.size(); ++e) {
        to_curr[e] = cur.locate(um.leaf(e).mid());
        to_prev[e] = prev.locate(um.leaf(e).mid());
    }

    const RefQuadrature& tq = c.time_quadrature();
    const int n_x = 2 * p + 3;
    const RefQuadrature xq = RefQuadrature::gauss(n_x);

    std::vector<std::vector<double>> rhs(nb, std::vector<double>(n_nodes, 0.0));
    std::vector<double> bt(nb), phi(p + 1);
    for (int q = 0; q < tq.size(); ++q) {
        const double t = c.interval().from_ref(tq.points[q]);
        const double wt = tq.weights[q] * 0.5 * k;
        basis_all(slab.r, t, c.interval(), bt);
        for (std::size_t e = 0; e < um.size(); ++e) {
            const Element& el = um.leaf(e);
            const Element& tgt = cur.leaf(to_curr[e]);
            for (int xqi = 0; xqi < xq.size(); ++xqi) {
                const double x = el.xl + 0.5 * (xq.points[xqi] + 1.0) * el.h();
                const double aval = c.a_value(to_curr[e], to_prev[e], x, t, 0);
                const double w = aval * xq.weights[xqi] * 0.5 * el.h();
                const double xhat = (2.0 * x - (tgt.xl + tgt.xr)) / tgt.h();
                sp.basis().values_at(xhat, phi);
                for (int a = 0; a <= p; ++a)
                    for (int i = 0; i < nb; ++i)
                        rhs[i][sp.first_node(to_curr[e]) + a] += wt * bt[i] * w * phi[a];
            }
        }
    }

    double num = 0.0, den = 0.0;
    for (int i = 0; i < nb; ++i)
        for (int n = 1; n < n_nodes - 1; ++n) {
            num = std::max(num, std::abs(lhs[i][n] - rhs[i][n]));
            den = std::max(den, std::max(std::abs(lhs[i][n]), std::abs(rhs[i][n])));
        }
    return den > 0.0 ? num / den : num;
}

} // namespace dgheat
