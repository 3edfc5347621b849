#include "dgheat/elliptic_estimator.hpp"

#include <algorithm>
#include <cmath>

namespace dgheat {

FieldOnMesh::FieldOnMesh(const SpatialField& field, const Mesh1D& view) : field_(field) {
    carrier_.resize(view.size());
    for (std::size_t e = 0; e < view.size(); ++e)
        carrier_[e] = field.space->mesh().locate(view.leaf(e).mid());
}

double FieldOnMesh::operator()(std::size_t elem, double x, int deriv) const {
    return field_.eval_in(carrier_[elem], x, deriv);
}

AnalyticFn::AnalyticFn(std::function<double(double)> f, std::function<double(double)> d1,
                       std::function<double(double)> d2)
    : f_(std::move(f)), d1_(std::move(d1)), d2_(std::move(d2)) {}

double AnalyticFn::operator()(std::size_t, double x, int deriv) const {
    switch (deriv) {
        case 0: return f_(x);
        case 1: return d1_(x);
        default: return d2_(x);
    }
}

double EllipticEstimate::local(std::size_t elem) const {
    double v = per_element[elem];
    if (elem > 0) v = std::max(v, per_node[elem - 1]);
    if (elem < per_node.size()) v = std::max(v, per_node[elem]);
    return v;
}

namespace {

double element_residual(const LocalEvaluable& w, const LocalEvaluable& g,
                        const Mesh1D& mesh, double kappa, int ns, std::size_t e) {
    const Element& el = mesh.leaf(e);
    double m = 0.0;
    auto res = [&](double x) { return std::abs(g(e, x, 0) + kappa * w(e, x, 2)); };
    m = std::max(res(el.xl), res(el.xr));
    for (int s = 0; s < ns; ++s) {
        const double x = el.xl + el.h() * (s + 1.0) / (ns + 1.0);
        m = std::max(m, res(x));
    }
    return el.h() * el.h() / kappa * m;
}

double node_jump(const LocalEvaluable& w, const Mesh1D& mesh, double kappa, std::size_t z) {
    const Element& left = mesh.leaf(z);
    const Element& right = mesh.leaf(z + 1);
    const double x = left.xr;
    const double jump = w(z + 1, x, 1) - w(z, x, 1);
    const double hz = std::max(left.h(), right.h());
    return hz / kappa * std::abs(kappa * jump);
}

} // namespace

EllipticEstimate estimate(const LocalEvaluable& w, const LocalEvaluable& g,
                          const Mesh1D& mesh, double kappa, int n_interior_samples,
                          Exec exec) {
    EllipticEstimate est;
    est.per_element.resize(mesh.size());
    est.per_node.resize(mesh.size() > 0 ? mesh.size() - 1 : 0);
    for_each_index(exec, mesh.size(), [&](std::size_t e) {
        est.per_element[e] = element_residual(w, g, mesh, kappa, n_interior_samples, e);
    });
    for_each_index(exec, est.per_node.size(),
                   [&](std::size_t z) { est.per_node[z] = node_jump(w, mesh, kappa, z); });
    double total = 0.0;
    for (double v : est.per_element) total = std::max(total, v);
    for (double v : est.per_node) total = std::max(total, v);
    est.total = total;
    return est;
}

EllipticEstimate estimate_reference(const LocalEvaluable& w, const LocalEvaluable& g,
                                    const Mesh1D& mesh, double kappa,
                                    int n_interior_samples) {
    EllipticEstimate est;
    est.per_element.reserve(mesh.size());
    for (std::size_t e = 0; e < mesh.size(); ++e)
        est.per_element.push_back(
            element_residual(w, g, mesh, kappa, n_interior_samples, e));
    for (std::size_t z = 0; z + 1 < mesh.size(); ++z)
        est.per_node.push_back(node_jump(w, mesh, kappa, z));
    for (double v : est.per_element) est.total = std::max(est.total, v);
    for (double v : est.per_node) est.total = std::max(est.total, v);
    return est;
}

} // namespace dgheat
