#include "dgheat/fem.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace dgheat {

std::vector<double> lobatto_nodes(int p) {
    if (p < 1) throw std::invalid_argument("spatial degree must be at least 1");
    std::vector<double> x(p + 1);
    x[0] = -1.0;
    x[p] = 1.0;
    // Interior nodes are the roots of L_p'; Newton from Chebyshev-like guesses.
    std::vector<double> v(p + 1), d1(p + 1), d2(p + 1);
    for (int i = 1; i < p; ++i) {
        double z = std::cos(M_PI * (p - i) / p);
        for (int iter = 0; iter < 100; ++iter) {
            legendre_all(p, z, v, d1, d2);
            const double dz = -d1[p] / d2[p];
            z += dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = z;
    }
    return x;
}

NodalBasis::NodalBasis(int p) : p_(p), nodes_(lobatto_nodes(p)) {
    // Invert the Legendre Vandermonde V[i][j] = L_j(node_i) by Gauss elimination.
    const int n = p + 1;
    std::vector<double> aug(static_cast<std::size_t>(n) * 2 * n, 0.0);
    std::vector<double> row(n);
    for (int i = 0; i < n; ++i) {
        legendre_all(p, nodes_[i], row);
        for (int j = 0; j < n; ++j) aug[i * 2 * n + j] = row[j];
        aug[i * 2 * n + n + i] = 1.0;
    }
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(aug[r * 2 * n + c]) > std::abs(aug[piv * 2 * n + c])) piv = r;
        if (piv != c)
            for (int j = 0; j < 2 * n; ++j) std::swap(aug[c * 2 * n + j], aug[piv * 2 * n + j]);
        const double d = aug[c * 2 * n + c];
        for (int j = 0; j < 2 * n; ++j) aug[c * 2 * n + j] /= d;
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = aug[r * 2 * n + c];
            if (f == 0.0) continue;
            for (int j = 0; j < 2 * n; ++j) aug[r * 2 * n + j] -= f * aug[c * 2 * n + j];
        }
    }
    vinv_.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) vinv_[i * n + j] = aug[i * 2 * n + n + j];
}

double NodalBasis::eval(std::span<const double> nodal, double xhat, int deriv) const {
    const int n = p_ + 1;
    assert(static_cast<int>(nodal.size()) == n);
    std::vector<double> modal(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) s += vinv_[j * n + a] * nodal[a];
        modal[j] = s;
    }
    std::vector<double> v(n), d1, d2;
    if (deriv >= 1) d1.resize(n);
    if (deriv >= 2) d2.resize(n);
    legendre_all(p_, xhat, v, d1, d2);
    const std::vector<double>& sel = (deriv == 0) ? v : (deriv == 1) ? d1 : d2;
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += modal[j] * sel[j];
    return s;
}

void NodalBasis::tabulate(std::span<const double> points, std::vector<double>& val,
                          std::vector<double>& der) const {
    const int n = p_ + 1;
    const int nq = static_cast<int>(points.size());
    val.assign(static_cast<std::size_t>(n) * nq, 0.0);
    der.assign(static_cast<std::size_t>(n) * nq, 0.0);
    std::vector<double> v(n), d1(n);
    for (int q = 0; q < nq; ++q) {
        legendre_all(p_, points[q], v, d1);
        for (int a = 0; a < n; ++a) {
            double sv = 0.0, sd = 0.0;
            for (int j = 0; j < n; ++j) {
                sv += vinv_[j * n + a] * v[j];
                sd += vinv_[j * n + a] * d1[j];
            }
            val[static_cast<std::size_t>(a) * nq + q] = sv;
            der[static_cast<std::size_t>(a) * nq + q] = sd;
        }
    }
}

void NodalBasis::values_at(double xhat, std::span<double> phi) const {
    const int n = p_ + 1;
    std::vector<double> v(n);
    legendre_all(p_, xhat, v);
    for (int a = 0; a < n; ++a) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += vinv_[j * n + a] * v[j];
        phi[a] = s;
    }
}

FemSpace::FemSpace(Mesh1D mesh, int p) : mesh_(std::move(mesh)), p_(p), basis_(p) {
    nodes_.resize(mesh_.size() * p_ + 1);
    for (std::size_t e = 0; e < mesh_.size(); ++e) {
        const Element& el = mesh_.leaf(e);
        for (int a = 0; a <= p_; ++a)
            nodes_[e * p_ + a] = el.xl + 0.5 * (basis_.nodes()[a] + 1.0) * el.h();
    }
    nodes_.front() = mesh_.a();
    nodes_.back() = mesh_.b();
}

double SpatialField::eval(double x, int deriv) const {
    return eval_in(space->mesh().locate(x), x, deriv);
}

double SpatialField::eval_in(std::size_t elem, double x, int deriv) const {
    const Element& el = space->mesh().leaf(elem);
    const double xhat = (2.0 * x - (el.xl + el.xr)) / el.h();
    const std::size_t base = space->first_node(elem);
    const double v = space->basis().eval(
        std::span<const double>(values.data() + base, space->p() + 1), xhat, deriv);
    const double chain = 2.0 / el.h();
    double scale = 1.0;
    for (int d = 0; d < deriv; ++d) scale *= chain;
    return v * scale;
}

SpatialField& SpatialField::axpy(double alpha, const SpatialField& other) {
    assert(space == other.space);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += alpha * other.values[i];
    return *this;
}

double SpatialField::max_abs_nodal() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

Operators assemble(const FemSpace& space, double kappa, Exec exec) {
    const int p = space.p();
    const int n = static_cast<int>(space.n_nodes());
    const std::size_t nel = space.mesh().size();
    Operators ops{BandedSym(n, p), BandedSym(n, p)};

    const RefQuadrature quad = RefQuadrature::gauss(p + 1); // exact to degree 2p+1
    std::vector<double> phi, dphi;
    space.basis().tabulate(quad.points, phi, dphi);
    const int nq = quad.size();
    const int nloc = p + 1;

    // Local matrices in parallel, then a serial scatter (deterministic result).
    std::vector<double> locM(nel * nloc * nloc), locK(nel * nloc * nloc);
    for_each_index(exec, nel, [&](std::size_t e) {
        const double h = space.mesh().leaf(e).h();
        double* M = locM.data() + e * nloc * nloc;
        double* K = locK.data() + e * nloc * nloc;
        for (int a = 0; a < nloc; ++a)
            for (int b = a; b < nloc; ++b) {
                double m = 0.0, k = 0.0;
                for (int q = 0; q < nq; ++q) {
                    m += quad.weights[q] * phi[a * nq + q] * phi[b * nq + q];
                    k += quad.weights[q] * dphi[a * nq + q] * dphi[b * nq + q];
                }
                M[a * nloc + b] = m * 0.5 * h;
                K[a * nloc + b] = k * kappa * 2.0 / h;
            }
    });
    for (std::size_t e = 0; e < nel; ++e) {
        const int base = static_cast<int>(space.first_node(e));
        const double* M = locM.data() + e * nloc * nloc;
        const double* K = locK.data() + e * nloc * nloc;
        for (int a = 0; a < nloc; ++a)
            for (int b = a; b < nloc; ++b) {
                ops.mass.at(base + a, base + b) += M[a * nloc + b];
                ops.stiffness.at(base + a, base + b) += K[a * nloc + b];
            }
    }
    return ops;
}

std::vector<double> load_vector(const FemSpace& space, const std::function<double(double)>& g,
                                int n_quad, Exec exec) {
    const int p = space.p();
    const std::size_t nel = space.mesh().size();
    const RefQuadrature quad = RefQuadrature::gauss(n_quad);
    std::vector<double> phi, dphi;
    space.basis().tabulate(quad.points, phi, dphi);
    const int nq = quad.size();
    const int nloc = p + 1;

    std::vector<double> loc(nel * nloc);
    for_each_index(exec, nel, [&](std::size_t e) {
        const Element& el = space.mesh().leaf(e);
        double* L = loc.data() + e * nloc;
        std::fill(L, L + nloc, 0.0);
        for (int q = 0; q < nq; ++q) {
            const double x = el.xl + 0.5 * (quad.points[q] + 1.0) * el.h();
            const double gw = g(x) * quad.weights[q] * 0.5 * el.h();
            for (int a = 0; a < nloc; ++a) L[a] += gw * phi[a * nq + q];
        }
    });
    std::vector<double> out(space.n_nodes(), 0.0);
    for (std::size_t e = 0; e < nel; ++e)
        for (int a = 0; a < nloc; ++a) out[space.first_node(e) + a] += loc[e * nloc + a];
    return out;
}

namespace {

SpatialField solve_interior(SpacePtr space, const BandedSym& op, std::vector<double> rhs) {
    const int n = static_cast<int>(space->n_nodes());
    BandedCholesky chol(op, 1, n - 1);
    std::span<double> interior(rhs.data() + 1, n - 2);
    chol.solve(interior);
    SpatialField f(std::move(space));
    for (int i = 1; i < n - 1; ++i) f.values[i] = rhs[i];
    return f;
}

} // namespace

SpatialField elliptic_solve(const FemSpace& space, double kappa,
                            const std::function<double(double)>& g) {
    return elliptic_solve(std::make_shared<FemSpace>(space), kappa, g);
}

SpatialField elliptic_solve(SpacePtr space, double kappa,
                            const std::function<double(double)>& g) {
    Operators ops = assemble(*space, kappa);
    std::vector<double> rhs = load_vector(*space, g, space->p() + 3);
    return solve_interior(std::move(space), ops.stiffness, std::move(rhs));
}

SpatialField energy_projection(SpacePtr space, const std::function<double(double)>& u0,
                               const std::function<double(double)>& u0_xx) {
    const double a = space->mesh().a(), b = space->mesh().b();
    if (std::abs(u0(a)) > 1e-10 || std::abs(u0(b)) > 1e-10)
        throw std::invalid_argument(
            "initial condition must vanish at the domain endpoints (homogeneous "
            "Dirichlet data)");
    Operators ops = assemble(*space, 1.0);
    std::vector<double> rhs =
        load_vector(*space, [&](double x) { return -u0_xx(x); }, space->p() + 3);
    return solve_interior(std::move(space), ops.stiffness, std::move(rhs));
}

std::vector<double> element_sup(const std::function<double(double)>& f, const Mesh1D& mesh,
                                int n_interior_samples, Exec exec) {
    std::vector<double> out(mesh.size(), 0.0);
    for_each_index(exec, mesh.size(), [&](std::size_t e) {
        const Element& el = mesh.leaf(e);
        double m = std::max(std::abs(f(el.xl)), std::abs(f(el.xr)));
        for (int s = 0; s < n_interior_samples; ++s) {
            const double x = el.xl + el.h() * (s + 1.0) / (n_interior_samples + 1.0);
            m = std::max(m, std::abs(f(x)));
        }
        out[e] = m;
    });
    return out;
}

double sup_norm(const std::function<double(double)>& f, const Mesh1D& mesh,
                int n_interior_samples, Exec exec) {
    return max_over(exec, mesh.size(), [&](std::size_t e) {
        const Element& el = mesh.leaf(e);
        double m = std::max(std::abs(f(el.xl)), std::abs(f(el.xr)));
        for (int s = 0; s < n_interior_samples; ++s) {
            const double x = el.xl + el.h() * (s + 1.0) / (n_interior_samples + 1.0);
            m = std::max(m, std::abs(f(x)));
        }
        return m;
    });
}

double sup_norm(const SpatialField& f, Exec exec) {
    const Mesh1D& mesh = f.space->mesh();
    return max_over(exec, mesh.size(), [&](std::size_t e) {
        const Element& el = mesh.leaf(e);
        double m = std::max(std::abs(f.eval_in(e, el.xl)), std::abs(f.eval_in(e, el.xr)));
        const int ns = f.space->default_samples();
        for (int s = 0; s < ns; ++s) {
            const double x = el.xl + el.h() * (s + 1.0) / (ns + 1.0);
            m = std::max(m, std::abs(f.eval_in(e, x)));
        }
        return m;
    });
}

} // namespace dgheat
