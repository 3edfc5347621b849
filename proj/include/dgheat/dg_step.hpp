#ifndef DGHEAT_DG_STEP_HPP
#define DGHEAT_DG_STEP_HPP

#include <utility>
#include <vector>

#include "dgheat/fem.hpp"
#include "dgheat/problems.hpp"
#include "dgheat/time_basis.hpp"

namespace dgheat {

// Solution on one time slab: a polynomial in time of degree r with spatial
// fields as coefficients, stored against the orthonormal scaled Legendre
// basis, plus the incoming trace from the previous slab (possibly on a
// different mesh).
struct SlabSolution {
    IntervalMap interval;
    int r = 0;
    SpacePtr space;
    std::vector<std::vector<double>> coeffs; // (r+1) x n_nodes
    SpatialField u_minus_prev;               // trace from the previous slab

    // Nodal field of the dt-th time derivative of U at time t.
    SpatialField at_time(double t, int dt = 0) const;
    SpatialField trace_plus() const;  // U at the left node, from inside
    SpatialField trace_minus() const; // U at the right node, from inside
};

struct PicardReport {
    int iterations = 0;
    double final_increment = 0.0;
    bool converged = false;
};

// Time-stepping matrix of the scheme in the orthonormal basis, scaled by k:
// entry (i,j) couples test degree i with trial degree j.
double dg_time_matrix_entry(int i, int j);

// Solve one slab by Picard iteration: the left-hand operator is factored once
// and only the reaction load is rebuilt per sweep. The incoming trace enters
// the load through quadrature on the common refinement of the two meshes.
std::pair<SlabSolution, PicardReport> solve_slab(const SpatialField& prev_trace,
                                                 SpacePtr space, const IntervalMap& interval,
                                                 int r, const ProblemDef& problem,
                                                 double tol_picard = 1e-11,
                                                 int max_iters = 50);

// Inner products (U_prev, phi_i) assembled by quadrature on the common
// refinement of the trace's mesh and the target space's mesh.
std::vector<double> cross_mass_load(const SpatialField& prev_trace, const FemSpace& space);

// Spatial quadrature size used for reaction loads of a given space/problem.
int reaction_quadrature_size(const FemSpace& space, const ProblemDef& problem);

} // namespace dgheat

#endif
