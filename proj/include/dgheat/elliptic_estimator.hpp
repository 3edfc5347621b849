#ifndef DGHEAT_ELLIPTIC_ESTIMATOR_HPP
#define DGHEAT_ELLIPTIC_ESTIMATOR_HPP

#include <functional>
#include <vector>

#include "dgheat/fem.hpp"
#include "dgheat/mesh.hpp"
#include "dgheat/parallel.hpp"

namespace dgheat {

// Evaluation localized to an element of the estimator mesh. Implementations
// must return one-sided values when x is an element endpoint, so derivative
// jumps across nodes can be formed.
class LocalEvaluable {
  public:
    virtual ~LocalEvaluable() = default;
    virtual double operator()(std::size_t elem, double x, int deriv) const = 0;
};

// A SpatialField viewed through a mesh that refines (or equals) its carrier.
class FieldOnMesh final : public LocalEvaluable {
  public:
    FieldOnMesh(const SpatialField& field, const Mesh1D& view);
    double operator()(std::size_t elem, double x, int deriv) const override;

  private:
    const SpatialField& field_;
    std::vector<std::size_t> carrier_; // view element -> carrier element
};

// Plain analytic function; ignores the element argument.
class AnalyticFn final : public LocalEvaluable {
  public:
    explicit AnalyticFn(std::function<double(double)> f,
                        std::function<double(double)> d1 = {},
                        std::function<double(double)> d2 = {});
    double operator()(std::size_t elem, double x, int deriv) const override;

  private:
    std::function<double(double)> f_, d1_, d2_;
};

// Pointwise residual estimate for -kappa w'' = g: element residuals weighted
// by h^2/kappa plus first-derivative jumps weighted by the larger adjacent h.
struct EllipticEstimate {
    double total = 0.0;
    std::vector<double> per_element; // one entry per mesh element
    std::vector<double> per_node;    // one entry per interior node

    // Element value combined with its two adjacent node contributions.
    double local(std::size_t elem) const;
};

EllipticEstimate estimate(const LocalEvaluable& w, const LocalEvaluable& g,
                          const Mesh1D& mesh, double kappa, int n_interior_samples,
                          Exec exec = Exec::Parallel);

// Straight-line serial implementation kept as the reference for the parallel
// kernel; the test suite checks both produce identical output.
EllipticEstimate estimate_reference(const LocalEvaluable& w, const LocalEvaluable& g,
                                    const Mesh1D& mesh, double kappa,
                                    int n_interior_samples);

} // namespace dgheat

#endif
