#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "dgheat/elliptic_estimator.hpp"
#include "dgheat/fem.hpp"
#include "dgheat/parallel.hpp"

// Times the OpenMP element-loop kernels against their serial references on a
// fixed workload and reports the speedup. Results must agree bit-for-bit; the
// test suite enforces that, this tool only measures.

using namespace dgheat;

namespace {

double time_of(const std::function<void()>& body, int reps) {
    body(); // warm up
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) body();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() /
           reps;
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, serial * 1e3, parallel * 1e3,
                serial / parallel);
}

} // namespace

int main() {
    std::printf("threads: %d\n", thread_count());
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    const int p = 8;
    auto space = std::make_shared<FemSpace>(Mesh1D::uniform(-5.0, 5.0, 8, 6), p);
    auto g = [](double x) { return 100.0 * std::exp(-2.0 * x * x) * (16.0 * x * x - 4.0); };
    SpatialField w = elliptic_solve(space, 1.0, g);
    const Mesh1D& mesh = space->mesh();
    std::printf("workload: %zu elements, degree %d\n", mesh.size(), p);

    {
        FieldOnMesh wv(w, mesh);
        AnalyticFn gv(g);
        const int ns = 2 * p + 3;
        const double ser =
            time_of([&] { estimate_reference(wv, gv, mesh, 1.0, ns); }, 20);
        const double par =
            time_of([&] { estimate(wv, gv, mesh, 1.0, ns, Exec::Parallel); }, 20);
        row("pointwise estimator", ser, par);
    }
    {
        const double ser = time_of([&] { assemble(*space, 1.0, Exec::Serial); }, 20);
        const double par = time_of([&] { assemble(*space, 1.0, Exec::Parallel); }, 20);
        row("operator assembly", ser, par);
    }
    {
        const double ser = time_of([&] { load_vector(*space, g, p + 3, Exec::Serial); }, 20);
        const double par =
            time_of([&] { load_vector(*space, g, p + 3, Exec::Parallel); }, 20);
        row("load vector", ser, par);
    }
    {
        auto f = [&](double x) { return w.eval(x); };
        const double ser = time_of([&] { sup_norm(f, mesh, p + 3, Exec::Serial); }, 20);
        const double par = time_of([&] { sup_norm(f, mesh, p + 3, Exec::Parallel); }, 20);
        row("sampled sup norm", ser, par);
    }
    return 0;
}
