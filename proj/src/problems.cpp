#include "dgheat/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace dgheat {

namespace {

// Gaussian bump with the linear interpolant of its boundary values removed,
// so the initial condition vanishes exactly at the endpoints.
ProblemDef gaussian_base(std::string name) {
    ProblemDef p;
    p.name = std::move(name);
    p.xa = -5.0;
    p.xb = 5.0;
    p.kappa = 1.0;
    const double va = 10.0 * std::exp(-2.0 * p.xa * p.xa);
    const double vb = 10.0 * std::exp(-2.0 * p.xb * p.xb);
    const double xa = p.xa, xb = p.xb;
    p.u0 = [=](double x) {
        const double raw = 10.0 * std::exp(-2.0 * x * x);
        return raw - (va + (vb - va) * (x - xa) / (xb - xa));
    };
    p.u0_xx = [](double x) {
        return 10.0 * std::exp(-2.0 * x * x) * (16.0 * x * x - 4.0);
    };
    return p;
}

} // namespace

ProblemDef preset(std::string_view name) {
    if (name == "quadratic_gaussian") {
        ProblemDef p = gaussian_base("quadratic_gaussian");
        p.f = [](double, double, double u) { return u * u; };
        p.lipschitz = {[](double, double a, double b) { return a + b; }, true};
        p.f_degree = 2;
        return p;
    }
    if (name == "cubic") {
        ProblemDef p = gaussian_base("cubic");
        p.f = [](double, double, double u) { return u * u * u; };
        p.lipschitz = {[](double, double a, double b) { return a * a + a * b + b * b; },
                       false};
        p.f_degree = 3;
        return p;
    }
    if (name == "exponential") {
        ProblemDef p = gaussian_base("exponential");
        p.f = [](double, double, double u) { return std::exp(u); };
        p.lipschitz = {[](double, double a, double b) { return std::exp(std::max(a, b)); },
                       false};
        p.f_degree = 4; // quadrature stand-in; the reaction is not polynomial
        return p;
    }
    if (name == "linear_manufactured") {
        // u(x,t) = exp(-t) sin(pi x) solves u_t - u_xx = u + g with the g below.
        ProblemDef p;
        p.name = "linear_manufactured";
        p.xa = 0.0;
        p.xb = 1.0;
        p.kappa = 1.0;
        p.u0 = [](double x) { return std::sin(M_PI * x); };
        p.u0_xx = [](double x) { return -M_PI * M_PI * std::sin(M_PI * x); };
        p.f = [](double x, double t, double u) {
            return u + (M_PI * M_PI - 2.0) * std::exp(-t) * std::sin(M_PI * x);
        };
        p.lipschitz = {[](double, double, double) { return 1.0; }, false};
        p.f_degree = 1;
        p.exact = [](double x, double t) { return std::exp(-t) * std::sin(M_PI * x); };
        return p;
    }
    if (name == "linear_heat") {
        ProblemDef p;
        p.name = "linear_heat";
        p.xa = 0.0;
        p.xb = 1.0;
        p.kappa = 1.0;
        p.u0 = [](double x) { return std::sin(M_PI * x); };
        p.u0_xx = [](double x) { return -M_PI * M_PI * std::sin(M_PI * x); };
        p.f = [](double, double, double) { return 0.0; };
        p.lipschitz = {[](double, double, double) { return 0.0; }, false};
        p.f_degree = 0;
        p.exact = [](double x, double t) {
            return std::exp(-M_PI * M_PI * t) * std::sin(M_PI * x);
        };
        return p;
    }
    throw std::invalid_argument("unknown problem preset: " + std::string(name));
}

} // namespace dgheat
