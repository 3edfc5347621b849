#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "acceptance.hpp"
#include "dgheat/adapt.hpp"
#include "dgheat/io.hpp"
#include "dgheat/problems.hpp"

namespace {

struct RunOptions {
    std::string config_path;
    std::string problem = "quadratic_gaussian";
    std::string out_dir = "out";
    int snapshot_every = 0; // 0 disables snapshots
    unsigned seed = 1;
    bool hp = false;
    dgheat::AdaptConfig cfg;
};

// Flat key = value file feeding the same options as the command line; flags
// given explicitly on the command line win.
void apply_config_file(RunOptions& opt, const std::string& path) {
    const auto kv = dgheat::parse_config_file(path);
    auto get = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    if (auto v = get("problem")) opt.problem = *v;
    if (auto v = get("out_dir")) opt.out_dir = *v;
    if (auto v = get("snapshot_every")) opt.snapshot_every = std::stoi(*v);
    if (auto v = get("seed")) opt.seed = static_cast<unsigned>(std::stoul(*v));
    if (auto v = get("ttol")) opt.cfg.ttol = std::stod(*v);
    if (auto v = get("stol_plus")) opt.cfg.stol_plus = std::stod(*v);
    if (auto v = get("stol_minus")) opt.cfg.stol_minus = std::stod(*v);
    if (auto v = get("p")) opt.cfg.p = std::stoi(*v);
    if (auto v = get("r0")) opt.cfg.r0 = std::stoi(*v);
    if (auto v = get("k0")) opt.cfg.k0 = std::stod(*v);
    if (auto v = get("sigma")) opt.cfg.sigma = std::stod(*v);
    if (auto v = get("hp")) opt.hp = (*v == "1" || *v == "true" || *v == "yes");
    if (auto v = get("max_steps")) opt.cfg.max_steps = std::stoi(*v);
    if (auto v = get("delta_max")) opt.cfg.delta_max = std::stod(*v);
    if (auto v = get("c_inf")) opt.cfg.c_inf = std::stod(*v);
    if (auto v = get("n_root")) opt.cfg.n_root = std::stoi(*v);
    if (auto v = get("tol_picard")) opt.cfg.tol_picard = std::stod(*v);
    for (const auto& [key, value] : kv) {
        static const char* known[] = {
            "problem", "out_dir", "snapshot_every", "seed", "ttol", "stol_plus",
            "stol_minus", "p", "r0", "k0", "sigma", "hp", "max_steps", "delta_max",
            "c_inf", "n_root", "tol_picard"};
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw std::runtime_error("unknown config key: " + key);
        (void)value;
    }
}

int run_command(RunOptions opt) {
    namespace fs = std::filesystem;
    if (opt.hp && !opt.cfg.sigma) opt.cfg.sigma = 0.47;
    if (!opt.hp) opt.cfg.sigma.reset();

    if (!(opt.cfg.ttol > 0.0) || !(opt.cfg.stol_plus > 0.0) ||
        (opt.cfg.stol_minus && !(*opt.cfg.stol_minus > 0.0 &&
                                 *opt.cfg.stol_minus < opt.cfg.stol_plus))) {
        std::fprintf(stderr, "error: thresholds must be positive (and stol- < stol+)\n");
        return 2;
    }

    dgheat::ProblemDef prob;
    std::ofstream csv, blog;
    try {
        prob = dgheat::preset(opt.problem);
        fs::create_directories(opt.out_dir);
        csv.open(fs::path(opt.out_dir) / "steps.csv");
        blog.open(fs::path(opt.out_dir) / "bound.log");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    dgheat::write_csv_header(csv);

    dgheat::AdaptiveDriver driver(prob, opt.cfg);
    dgheat::RunSummary summary;
    try {
        summary = driver.run([&](const dgheat::StepRecord& rec,
                                 const dgheat::SlabContext& ctx,
                                 const dgheat::EstimatorSample&) {
            dgheat::write_csv_row(csv, rec);
            blog << rec.m << ' ' << dgheat::fmt(rec.psi) << ' ' << dgheat::fmt(rec.theta)
                 << ' ' << dgheat::fmt(rec.theta_tilde) << ' '
                 << (rec.delta ? dgheat::fmt(*rec.delta) : std::string("nan")) << ' '
                 << dgheat::fmt(rec.bound_rec) << ' ' << dgheat::fmt(rec.bound_err)
                 << '\n';
            if (opt.snapshot_every > 0 && rec.m % opt.snapshot_every == 0) {
                char name[64];
                std::snprintf(name, sizeof(name), "mesh_%06d.txt", rec.m);
                std::ofstream ms(fs::path(opt.out_dir) / name);
                ctx.slab().space->mesh().write(ms);
                std::snprintf(name, sizeof(name), "field_%06d.txt", rec.m);
                std::ofstream fsnap(fs::path(opt.out_dir) / name);
                dgheat::write_field(fsnap, ctx.slab().trace_minus(), ctx.slab().space->p() + 3);
            }
        });
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver abort: %s\n", e.what());
        return 3;
    }
    csv.close();

    std::ofstream sum(fs::path(opt.out_dir) / "summary.txt");
    dgheat::write_summary(sum, summary);
    dgheat::write_summary(std::cout, summary);

    const bool normal = summary.termination == "no admissible root of the step condition" ||
                        summary.termination == "step limit reached";
    return normal ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive dG(r)-cG(p) solver for semilinear heat flow with a "
                 "conditional sup-norm error bound"};
    app.require_subcommand(1);

    RunOptions opt;
    std::string suite;

    CLI::App* run = app.add_subcommand("run", "run the adaptive driver");
    run->add_option("--config", opt.config_path, "key = value configuration file");
    run->add_option("--problem", opt.problem, "problem preset name");
    run->add_option("--ttol", opt.cfg.ttol, "temporal refinement threshold");
    run->add_option("--stol", opt.cfg.stol_plus, "spatial refinement threshold");
    double stol_minus = -1.0;
    run->add_option("--stol-minus", stol_minus, "spatial coarsening threshold");
    run->add_option("--p", opt.cfg.p, "spatial polynomial degree");
    run->add_option("--r0", opt.cfg.r0, "(initial) temporal polynomial degree");
    run->add_option("--k0", opt.cfg.k0, "initial step length");
    double sigma = -1.0;
    run->add_option("--sigma", sigma, "hp degree slope (enables hp mode)");
    run->add_flag("--hp", opt.hp, "enable the hp degree schedule");
    run->add_option("--max-steps", opt.cfg.max_steps, "step budget");
    run->add_option("--c-inf", opt.cfg.c_inf, "elliptic estimator constant");
    run->add_option("--n-root", opt.cfg.n_root, "root partition size");
    run->add_option("--snapshot-every", opt.snapshot_every,
                    "write mesh/field snapshots every n steps");
    run->add_option("--seed", opt.seed, "seed for randomized verification");
    run->add_option("--out", opt.out_dir, "output directory");

    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite, "one of: basis, mesh, fem, estimator, dg_rates, bound, blowup")
        ->required();
    unsigned verify_seed = 1;
    verify->add_option("--seed", verify_seed, "seed for the randomized checks");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        // Values from the file fill in everything the command line left at
        // its default; explicit flags win.
        if (!opt.config_path.empty()) {
            RunOptions from_file = opt;
            try {
                apply_config_file(from_file, opt.config_path);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "config error: %s\n", e.what());
                return 2;
            }
            if (run->count("--problem") == 0) opt.problem = from_file.problem;
            if (run->count("--ttol") == 0) opt.cfg.ttol = from_file.cfg.ttol;
            if (run->count("--stol") == 0) opt.cfg.stol_plus = from_file.cfg.stol_plus;
            if (run->count("--stol-minus") == 0) opt.cfg.stol_minus = from_file.cfg.stol_minus;
            if (run->count("--p") == 0) opt.cfg.p = from_file.cfg.p;
            if (run->count("--r0") == 0) opt.cfg.r0 = from_file.cfg.r0;
            if (run->count("--k0") == 0) opt.cfg.k0 = from_file.cfg.k0;
            if (run->count("--sigma") == 0) opt.cfg.sigma = from_file.cfg.sigma;
            if (run->count("--hp") == 0) opt.hp = from_file.hp;
            if (run->count("--max-steps") == 0) opt.cfg.max_steps = from_file.cfg.max_steps;
            if (run->count("--c-inf") == 0) opt.cfg.c_inf = from_file.cfg.c_inf;
            if (run->count("--n-root") == 0) opt.cfg.n_root = from_file.cfg.n_root;
            if (run->count("--snapshot-every") == 0)
                opt.snapshot_every = from_file.snapshot_every;
            if (run->count("--out") == 0) opt.out_dir = from_file.out_dir;
            if (run->count("--seed") == 0) opt.seed = from_file.seed;
        }
        if (run->count("--stol-minus") > 0) opt.cfg.stol_minus = stol_minus;
        if (run->count("--sigma") > 0) {
            opt.cfg.sigma = sigma;
            opt.hp = true;
        }
        return run_command(std::move(opt));
    }

    // verify
    try {
        dgheat::acceptance::set_seed(verify_seed);
        const auto results = dgheat::acceptance::run_suite(suite);
        const int failures = dgheat::acceptance::report(results);
        return failures == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
