#ifndef DGHEAT_FEM_HPP
#define DGHEAT_FEM_HPP

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "dgheat/banded.hpp"
#include "dgheat/mesh.hpp"
#include "dgheat/parallel.hpp"
#include "dgheat/time_basis.hpp"

namespace dgheat {

// Gauss-Lobatto nodes on [-1,1] (p+1 points, includes the endpoints).
std::vector<double> lobatto_nodes(int p);

// Reference Lagrange basis on the Gauss-Lobatto nodes of degree p. Evaluation
// goes through the Legendre modal representation, which stays well conditioned
// up to the degrees used here (p = 8 in the blow-up runs).
class NodalBasis {
  public:
    explicit NodalBasis(int p);

    int p() const { return p_; }
    const std::vector<double>& nodes() const { return nodes_; }

    // Value/derivative of the local polynomial with the given nodal values at
    // reference point xhat; deriv in {0,1,2} (reference-coordinate derivative).
    double eval(std::span<const double> nodal, double xhat, int deriv = 0) const;

    // Tables basis[a*nq + q] of all basis functions at the given points.
    void tabulate(std::span<const double> points, std::vector<double>& val,
                  std::vector<double>& der) const;

    // Values of all p+1 basis functions at one reference point.
    void values_at(double xhat, std::span<double> phi) const;

  private:
    int p_;
    std::vector<double> nodes_;
    std::vector<double> vinv_; // Legendre modal coefficients of the basis, column a
};

// Conforming piecewise-polynomial space of degree p with zero boundary values.
// Global nodes are the per-element Gauss-Lobatto points; neighbors share the
// interface node, giving p*n_elements - 1 interior degrees of freedom.
class FemSpace {
  public:
    FemSpace(Mesh1D mesh, int p);

    const Mesh1D& mesh() const { return mesh_; }
    int p() const { return p_; }
    const NodalBasis& basis() const { return basis_; }

    std::size_t n_nodes() const { return nodes_.size(); }
    std::size_t n_interior() const { return nodes_.size() - 2; }
    double node(std::size_t i) const { return nodes_[i]; }
    std::size_t first_node(std::size_t elem) const { return elem * p_; }

    int default_samples() const { return p_ + 3; }

  private:
    Mesh1D mesh_;
    int p_;
    NodalBasis basis_;
    std::vector<double> nodes_;
};

using SpacePtr = std::shared_ptr<const FemSpace>;

// A member of a FemSpace, stored as nodal values (boundary entries are zero).
struct SpatialField {
    SpacePtr space;
    std::vector<double> values;

    SpatialField() = default;
    explicit SpatialField(SpacePtr s) : space(std::move(s)), values(space->n_nodes(), 0.0) {}

    double eval(double x, int deriv = 0) const;
    // Evaluation localized to a given element of the carrier mesh; x may be an
    // endpoint, in which case the one-sided value from inside elem is returned.
    double eval_in(std::size_t elem, double x, int deriv = 0) const;

    SpatialField& axpy(double alpha, const SpatialField& other);
    double max_abs_nodal() const;
};

// Mass and stiffness operators over all nodes (Dirichlet rows included, the
// solver slices the interior block). K is kappa * (grad, grad).
struct Operators {
    BandedSym mass;
    BandedSym stiffness;
};

Operators assemble(const FemSpace& space, double kappa, Exec exec = Exec::Parallel);

// Load vector (g, phi_i) over all nodes with an n-point Gauss rule per element.
std::vector<double> load_vector(const FemSpace& space,
                                const std::function<double(double)>& g, int n_quad,
                                Exec exec = Exec::Parallel);

// Galerkin solution of kappa (w', v') = (g, v) with zero boundary values.
SpatialField elliptic_solve(const FemSpace& space, double kappa,
                            const std::function<double(double)>& g);
SpatialField elliptic_solve(SpacePtr space, double kappa,
                            const std::function<double(double)>& g);

// Projection of u0 defined by (pi u0)' tested against basis gradients matching
// (-u0'', v); requires u0 to vanish at both domain endpoints.
SpatialField energy_projection(SpacePtr space, const std::function<double(double)>& u0,
                               const std::function<double(double)>& u0_xx);

// Sampled sup-norm: per element, n_interior_samples equispaced interior points
// plus the two endpoints.
double sup_norm(const std::function<double(double)>& f, const Mesh1D& mesh,
                int n_interior_samples, Exec exec = Exec::Parallel);
double sup_norm(const SpatialField& f, Exec exec = Exec::Parallel);

// Per-element sampled sup of |f|, same sampling rule.
std::vector<double> element_sup(const std::function<double(double)>& f, const Mesh1D& mesh,
                                int n_interior_samples, Exec exec = Exec::Parallel);

} // namespace dgheat

#endif
