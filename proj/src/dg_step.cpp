#include "dgheat/dg_step.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dgheat {

namespace {

std::vector<double> combine_coeffs(const SlabSolution& s, std::span<const double> w) {
    std::vector<double> out(s.space->n_nodes(), 0.0);
    for (int j = 0; j <= s.r; ++j)
        for (std::size_t n = 0; n < out.size(); ++n) out[n] += w[j] * s.coeffs[j][n];
    return out;
}

} // namespace

SpatialField SlabSolution::at_time(double t, int dt) const {
    std::vector<double> b(r + 1), d1, d2;
    if (dt >= 1) d1.resize(r + 1);
    if (dt >= 2) d2.resize(r + 1);
    basis_all(r, t, interval, b, d1, d2);
    const std::vector<double>& sel = (dt == 0) ? b : (dt == 1) ? d1 : d2;
    SpatialField f(space);
    f.values = combine_coeffs(*this, sel);
    return f;
}

SpatialField SlabSolution::trace_plus() const {
    std::vector<double> w(r + 1);
    for (int j = 0; j <= r; ++j)
        w[j] = std::sqrt((2.0 * j + 1.0) / interval.k()) * ((j % 2 == 0) ? 1.0 : -1.0);
    SpatialField f(space);
    f.values = combine_coeffs(*this, w);
    return f;
}

SpatialField SlabSolution::trace_minus() const {
    std::vector<double> w(r + 1);
    for (int j = 0; j <= r; ++j) w[j] = std::sqrt((2.0 * j + 1.0) / interval.k());
    SpatialField f(space);
    f.values = combine_coeffs(*this, w);
    return f;
}

double dg_time_matrix_entry(int i, int j) {
    const double scale = std::sqrt((2.0 * i + 1.0) * (2.0 * j + 1.0));
    double v = ((i + j) % 2 == 0) ? scale : -scale; // left-node trace product
    if (j > i && (j - i) % 2 == 1) v += 2.0 * scale; // k * int B_i B_j'
    return v;
}

std::vector<double> cross_mass_load(const SpatialField& prev_trace, const FemSpace& space) {
    const Mesh1D& target = space.mesh();
    const Mesh1D& source = prev_trace.space->mesh();
    const Mesh1D cr = Mesh1D::common_refinement(target, source);
    const int p = space.p();
    const int pq = std::max(p, prev_trace.space->p());
    const RefQuadrature quad = RefQuadrature::gauss(pq + 1); // exact for degree 2*pq

    std::vector<double> out(space.n_nodes(), 0.0);
    std::vector<double> phi(p + 1);
    for (std::size_t ce = 0; ce < cr.size(); ++ce) {
        const Element& el = cr.leaf(ce);
        const std::size_t et = target.locate(el.mid());
        const std::size_t es = source.locate(el.mid());
        const Element& tgt = target.leaf(et);
        for (int q = 0; q < quad.size(); ++q) {
            const double x = el.xl + 0.5 * (quad.points[q] + 1.0) * el.h();
            const double w = quad.weights[q] * 0.5 * el.h() * prev_trace.eval_in(es, x);
            const double xhat_t = (2.0 * x - (tgt.xl + tgt.xr)) / tgt.h();
            space.basis().values_at(xhat_t, phi);
            for (int a = 0; a <= p; ++a) out[space.first_node(et) + a] += w * phi[a];
        }
    }
    return out;
}

int reaction_quadrature_size(const FemSpace& space, const ProblemDef& problem) {
    const int deg = (problem.f_degree + 1) * space.p();
    return std::max(space.p() + 3, deg / 2 + 1);
}

std::pair<SlabSolution, PicardReport> solve_slab(const SpatialField& prev_trace,
                                                 SpacePtr space, const IntervalMap& interval,
                                                 int r, const ProblemDef& problem,
                                                 double tol_picard, int max_iters) {
    const int p = space->p();
    const int n_nodes = static_cast<int>(space->n_nodes());
    const int n_int = n_nodes - 2;
    const int nb = r + 1;
    const int n_sys = n_int * nb;
    const double k = interval.k();

    SlabSolution slab;
    slab.interval = interval;
    slab.r = r;
    slab.space = space;
    slab.u_minus_prev = prev_trace;
    slab.coeffs.assign(nb, std::vector<double>(n_nodes, 0.0));

    // Block operator: (i,j) block of the system is G_ij/k * M + delta_ij * K.
    Operators ops = assemble(*space, problem.kappa);
    const int bw = p * nb + (nb - 1);
    BandedLU lu(n_sys, bw, bw);
    auto sys_index = [nb](int node, int i) { return (node - 1) * nb + i; };
    for (int n2 = 1; n2 < n_nodes - 1; ++n2) {
        for (int n1 = std::max(1, n2 - p); n1 <= n2; ++n1) {
            const double m = ops.mass.at(n1, n2);
            const double ke = ops.stiffness.at(n1, n2);
            for (int i = 0; i < nb; ++i)
                for (int j = 0; j < nb; ++j) {
                    const double v = dg_time_matrix_entry(i, j) / k * m + (i == j ? ke : 0.0);
                    lu.add(sys_index(n1, i), sys_index(n2, j), v);
                    if (n1 != n2) lu.add(sys_index(n2, i), sys_index(n1, j),
                                         dg_time_matrix_entry(i, j) / k * m +
                                             (i == j ? ke : 0.0));
                }
        }
    }
    lu.factorize();

    // Incoming trace load, fixed across Picard sweeps.
    const std::vector<double> trace_load = cross_mass_load(prev_trace, *space);
    std::vector<double> trace_weight(nb);
    for (int i = 0; i < nb; ++i)
        trace_weight[i] = std::sqrt((2.0 * i + 1.0) / k) * ((i % 2 == 0) ? 1.0 : -1.0);

    // Picard initial guess: the incoming trace held constant in time.
    {
        std::vector<double>& c0 = slab.coeffs[0];
        for (int n = 0; n < n_nodes; ++n)
            c0[n] = std::sqrt(k) * prev_trace.eval(space->node(n));
        c0.front() = 0.0;
        c0.back() = 0.0;
    }

    const int n_t = slab_quadrature_size(r, problem.f_degree);
    const RefQuadrature tquad = RefQuadrature::gauss(n_t);
    const int n_x = reaction_quadrature_size(*space, problem);
    const RefQuadrature xquad = RefQuadrature::gauss(n_x);
    std::vector<double> phi, dphi;
    space->basis().tabulate(xquad.points, phi, dphi);

    PicardReport report;
    std::vector<double> rhs(n_sys), bt(nb), unow(n_nodes), load(n_nodes);
    for (int iter = 0; iter < max_iters; ++iter) {
        std::fill(rhs.begin(), rhs.end(), 0.0);
        for (int q = 0; q < tquad.size(); ++q) {
            const double t = interval.from_ref(tquad.points[q]);
            basis_all(r, t, interval, bt);
            for (int n = 0; n < n_nodes; ++n) {
                double s = 0.0;
                for (int j = 0; j < nb; ++j) s += bt[j] * slab.coeffs[j][n];
                unow[n] = s;
            }
            std::fill(load.begin(), load.end(), 0.0);
            for (std::size_t e = 0; e < space->mesh().size(); ++e) {
                const Element& el = space->mesh().leaf(e);
                const std::size_t base = space->first_node(e);
                for (int xq = 0; xq < xquad.size(); ++xq) {
                    const double x = el.xl + 0.5 * (xquad.points[xq] + 1.0) * el.h();
                    double uval = 0.0;
                    for (int a = 0; a <= p; ++a)
                        uval += phi[a * xquad.size() + xq] * unow[base + a];
                    const double fw = problem.f(x, t, uval) * xquad.weights[xq] * 0.5 * el.h();
                    for (int a = 0; a <= p; ++a) load[base + a] += fw * phi[a * xquad.size() + xq];
                }
            }
            const double wq = tquad.weights[q] * 0.5 * k;
            for (int n = 1; n < n_nodes - 1; ++n)
                for (int i = 0; i < nb; ++i) rhs[sys_index(n, i)] += wq * bt[i] * load[n];
        }
        for (int n = 1; n < n_nodes - 1; ++n)
            for (int i = 0; i < nb; ++i)
                rhs[sys_index(n, i)] += trace_weight[i] * trace_load[n];

        lu.solve(rhs);

        double inc = 0.0, scale = 1.0;
        bool finite = true;
        for (int n = 1; n < n_nodes - 1; ++n)
            for (int i = 0; i < nb; ++i) {
                const double v = rhs[sys_index(n, i)];
                finite = finite && std::isfinite(v);
                inc = std::max(inc, std::abs(v - slab.coeffs[i][n]));
                scale = std::max(scale, std::abs(v));
                slab.coeffs[i][n] = v;
            }
        report.iterations = iter + 1;
        report.final_increment = finite ? inc : std::numeric_limits<double>::infinity();
        if (!finite) break; // diverged sweep; the caller shortens the step
        // Tolerance follows the solution magnitude; the absolute target is
        // below representable precision once the solution grows large.
        if (inc <= tol_picard * scale) {
            report.converged = true;
            break;
        }
    }
    return {std::move(slab), report};
}

} // namespace dgheat
