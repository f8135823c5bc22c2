#pragma once

#include "rtsmp/grid.hpp"
#include "rtsmp/measure.hpp"

#include <vector>

namespace rtsmp {

struct JumpSample {
    Index node;         // measure node index
    double weight;
    double difference;  // u(x, v') - u(x, v)
};

struct JumpEvaluation {
    double value = 0.0;
    std::vector<JumpSample> samples;
};

/// Total mass m = sum of weights.
double measure_mass(const VelocityMeasure& measure);

/// sum_k w_k (u(x, q_k) - u(x, v)), q_k reached by multilinear interpolation
/// on the tensor layout. Works for either nonlocal kind stored on the grid:
/// the levy kind delegates to levy_jump_apply.
double jump_apply(const GridFunction& u, Index ix, Index iv);
JumpEvaluation jump_evaluate(const GridFunction& u, Index ix, Index iv);

/// sum_k w_k (u(x, v + w_k) - u(x, v)) with constant extension past the hull.
/// Throws GridError unless the grid was built for levy increments.
double levy_jump_apply(const GridFunction& u, Index ix, Index iv);

/// sum_k w_k u(x, q_k) (or u(x, v + w_k) for levy), the part of the jump
/// operator that does not involve u(x, v).
double jump_gain(const GridFunction& u, Index ix, Index iv);

/// sum_k w_k |u(x, q_k)|.
double rho(const GridFunction& u, Index ix);

/// rho^gamma, 1 for gamma = 0. Throws RhoDegenerateError when rho = 0 and gamma < 0.
double rho_power(double rho_value, double gamma, Index ix);

/// B(0, r) inside the geometric support. Box and ball supports are decided
/// exactly, a sphere never contains a ball; atoms throw PreconditionError.
bool support_contains_ball(const VelocityMeasure& measure, double r);

}  // namespace rtsmp
