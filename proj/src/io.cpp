#include "dgheat/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace dgheat {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv_header(std::ostream& os) {
    os << "m,t,k,r,n_dofs,u_sup,eta_time,int_eta_space,int_eta_space_dt,"
          "psi,theta,theta_tilde,delta,bound_rec\n";
}

void write_csv_row(std::ostream& os, const StepRecord& rec) {
    os << rec.m << ',' << fmt(rec.t) << ',' << fmt(rec.k) << ',' << rec.r << ','
       << rec.n_dofs << ',' << fmt(rec.u_sup) << ',' << fmt(rec.eta_time) << ','
       << fmt(rec.int_eta_space) << ',' << fmt(rec.int_eta_space_dt) << ','
       << fmt(rec.psi) << ',' << fmt(rec.theta) << ',' << fmt(rec.theta_tilde) << ','
       << (rec.delta ? fmt(*rec.delta) : std::string("nan")) << ',' << fmt(rec.bound_rec)
       << '\n';
}

void write_summary(std::ostream& os, const RunSummary& s) {
    os << "n_steps = " << s.n_steps << '\n';
    os << "t_end = " << fmt(s.t_end) << '\n';
    os << "u_sup_end = " << fmt(s.u_sup_end) << '\n';
    os << "t_inf_estimate = " << (s.t_inf ? fmt(*s.t_inf) : std::string("nan")) << '\n';
    os << "gamma_last = " << (s.gamma_last ? fmt(*s.gamma_last) : std::string("nan"))
       << '\n';
    os << "termination = " << s.termination << '\n';
    os << "wall_seconds = " << fmt(s.wall_seconds) << '\n';
    os << "dof_steps = " << s.dof_steps << '\n';
}

void write_field(std::ostream& os, const SpatialField& f, int samples_per_element) {
    const Mesh1D& mesh = f.space->mesh();
    for (std::size_t e = 0; e < mesh.size(); ++e) {
        const Element& el = mesh.leaf(e);
        for (int s = 0; s <= samples_per_element; ++s) {
            const double x = el.xl + el.h() * s / samples_per_element;
            os << fmt(x) << ' ' << fmt(f.eval_in(e, x)) << '\n';
        }
    }
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

} // namespace dgheat
