#include "rtsmp/nonlocal.hpp"

#include "rtsmp/errors.hpp"

#include <cmath>

namespace rtsmp {

double measure_mass(const VelocityMeasure& measure) { return measure.weights().sum(); }

double jump_gain(const GridFunction& u, Index ix, Index iv) {
    const PhaseGrid& g = u.grid();
    const auto row = u.values().row(ix);
    const Vector& w = g.measure_weights();
    double acc = 0.0;
    if (g.nonlocal() == NonlocalKind::levy) {
        for (Index k = 0; k < w.size(); ++k) acc += w[k] * apply(g.levy_stencil(iv, k), row);
    } else {
        const auto& st = g.measure_stencils();
        for (Index k = 0; k < w.size(); ++k) acc += w[k] * apply(st[k], row);
    }
    return acc;
}

JumpEvaluation jump_evaluate(const GridFunction& u, Index ix, Index iv) {
    const PhaseGrid& g = u.grid();
    const auto row = u.values().row(ix);
    const Vector& w = g.measure_weights();
    const double here = u(ix, iv);
    JumpEvaluation e;
    e.samples.reserve(w.size());
    for (Index k = 0; k < w.size(); ++k) {
        const Stencil& s = g.nonlocal() == NonlocalKind::levy ? g.levy_stencil(iv, k) : g.measure_stencils()[k];
        const double d = apply(s, row) - here;
        e.samples.push_back({k, w[k], d});
        e.value += w[k] * d;
    }
    return e;
}

double jump_apply(const GridFunction& u, Index ix, Index iv) {
    return jump_gain(u, ix, iv) - u.grid().measure_mass() * u(ix, iv);
}

double levy_jump_apply(const GridFunction& u, Index ix, Index iv) {
    if (u.grid().nonlocal() != NonlocalKind::levy) throw GridError("grid carries no levy increment stencils");
    return jump_apply(u, ix, iv);
}

double rho(const GridFunction& u, Index ix) {
    const PhaseGrid& g = u.grid();
    const auto row = u.values().row(ix);
    const Vector& w = g.measure_weights();
    double acc = 0.0;
    if (g.nonlocal() == NonlocalKind::levy) {
        // Increment nodes are not velocities; integrate |u| over the velocity grid instead.
        return w.sum() * row.cwiseAbs().mean();
    }
    const auto& st = g.measure_stencils();
    for (Index k = 0; k < w.size(); ++k) acc += w[k] * std::abs(apply(st[k], row));
    return acc;
}

double rho_power(double rho_value, double gamma, Index ix) {
    if (gamma == 0.0) return 1.0;
    if (rho_value == 0.0 && gamma < 0.0) throw RhoDegenerateError(static_cast<long>(ix));
    return std::pow(rho_value, gamma);
}

bool support_contains_ball(const VelocityMeasure& measure, double r) {
    switch (measure.kind()) {
        case MeasureKind::atoms: throw PreconditionError("undecidable for atomic support: atoms never contain a ball");
        case MeasureKind::uniform_sphere: return false;
        case MeasureKind::uniform_ball: return measure.center().norm() + r <= measure.radius();
        case MeasureKind::uniform_box:
            return (measure.box_lower().array() <= -r).all() && (measure.box_upper().array() >= r).all();
    }
    return false;
}

}  // namespace rtsmp
