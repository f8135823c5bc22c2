#pragma once

#include "rtsmp/grid.hpp"
#include "rtsmp/scenario.hpp"

#include <vector>

namespace rtsmp {

struct SolveResult {
    GridFunction solution;
    Index iterations = 0;
    double update_norm = 0.0;
    double residual_norm = 0.0;
    /// Sup-norm update of every iteration.
    std::vector<double> updates;
};

/// Starting iterate: zeros, or the constant barriers -M / +M with
/// M = max(|g|/lambda, |psi|).
enum class InitialGuess { zero, lower_barrier, upper_barrier };

/// max (sup mode) or min (inf mode) of -<b(x, v, alpha), p> over the control set.
double hamiltonian(const Vector& x, const Vector& v, const Vector& p, const DriftField& drift,
                   OptimizationMode mode);

/// One-sided x-differences: forward where direction_j > 0, backward where < 0.
/// A zero component uses the forward difference when it exists. Throws
/// GridError when the required neighbor is off a non-periodic face.
Vector upwind_gradient(const GridFunction& u, Index ix, Index iv, const Vector& direction);

/// Nodes whose value is pinned to psi: x on a non-periodic face, or on/outside
/// the sphere for ball-shaped domains.
bool is_dirichlet(const Domain& x, Index ix);

double barrier_bound(const GridFunction& g, const GridFunction& psi, double lambda);

/// Upwind fixed point. Stops once the distance to the discrete fixed point,
/// bounded through the contraction factor, is below the tolerance and the
/// residual is below 10 * tolerance. Throws PreconditionError (lambda <= 0,
/// gamma != 0) or ConvergenceError.
SolveResult solve_stationary(const Scenario& s, const SolverConfig& config, InitialGuess init = InitialGuess::zero);
SolveResult solve_stationary(const Scenario& s, const GridFunction& g, const GridFunction& psi,
                             const SolverConfig& config, InitialGuess init = InitialGuess::zero);

/// Discrete dynamic programming with one step of length dt along each
/// characteristic:
///   u(x, v) = min_alpha [ beta (g + gain) + e^{-L dt} u(x + dt b, v) ],
///   L = lambda + m, beta = (1 - e^{-L dt}) / L,
/// and exiting trajectories stopped at the exit time with value psi there.
/// Throws PreconditionError when dt * max|b| exceeds the min spacing.
SolveResult semi_lagrangian_value(const Scenario& s, const SolverConfig& config,
                                  InitialGuess init = InitialGuess::zero);
SolveResult semi_lagrangian_value(const Scenario& s, const GridFunction& g, const GridFunction& psi,
                                  const SolverConfig& config, InitialGuess init = InitialGuess::zero);

/// lambda u + H(upwind grad u) - rho^gamma jump - g at non-Dirichlet nodes,
/// u - psi at Dirichlet nodes.
GridFunction residual(const GridFunction& u, const Scenario& s);
GridFunction residual(const GridFunction& u, const Scenario& s, const GridFunction& g, const GridFunction& psi);

struct ComparisonReport {
    bool boundary_ordered = true;
    std::vector<Node> boundary_violations;
    std::vector<Node> violations;
    double max_excess = 0.0;

    bool holds() const { return boundary_ordered && violations.empty(); }
};

/// Nodes with u > w + tol; boundary nodes are reported separately. Throws
/// GridError on mismatched grids.
ComparisonReport comparison_check(const GridFunction& u, const GridFunction& w, const Scenario& s, double tol);

}  // namespace rtsmp
