#ifndef DGHEAT_PROBLEMS_HPP
#define DGHEAT_PROBLEMS_HPP

#include <functional>
#include <string>
#include <string_view>

namespace dgheat {

// Growth modulus of the reaction term: |f(x,t,v) - f(x,t,w)| <= L(t,|v|,|w|)|v-w|,
// monotone non-decreasing in both magnitude arguments. The quadratic flag marks
// L(t,a,b) = a + b, for which the root of the step condition has a closed form.
struct LipschitzModulus {
    std::function<double(double t, double a, double b)> value;
    bool quadratic = false;

    double operator()(double t, double a, double b) const { return value(t, a, b); }
};

struct ProblemDef {
    std::string name;
    double xa = 0.0, xb = 1.0;
    double kappa = 1.0;
    std::function<double(double)> u0;
    std::function<double(double)> u0_xx;
    std::function<double(double x, double t, double u)> f;
    LipschitzModulus lipschitz;
    int f_degree = 2; // polynomial degree of f in u, for quadrature sizing
    std::function<double(double x, double t)> exact; // empty if unknown
    bool has_exact() const { return static_cast<bool>(exact); }
};

// Named presets:
//   quadratic_gaussian  f = u^2 with a Gaussian bump on (-5,5); blows up
//   cubic               f = u^3, same initial data
//   exponential         f = e^u, same initial data
//   linear_manufactured f = u + g with exact solution exp(-t) sin(pi x)
//   linear_heat         f = 0, decaying exact solution
ProblemDef preset(std::string_view name);

} // namespace dgheat

#endif
