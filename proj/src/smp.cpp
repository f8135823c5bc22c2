#include "rtsmp/smp.hpp"

#include "rtsmp/errors.hpp"
#include "rtsmp/field.hpp"
#include "rtsmp/hjb.hpp"
#include "rtsmp/nonlocal.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rtsmp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(SMPVariant v) {
    switch (v) {
        case SMPVariant::interior: return "interior";
        case SMPVariant::inf_min: return "inf-min";
        case SMPVariant::torus: return "torus";
        case SMPVariant::z_closure: return "z-closure";
        case SMPVariant::levy: return "levy";
    }
    return {};
}

std::string to_string(VRestriction r) { return r == VRestriction::v0 ? "V0" : "V"; }

std::string to_string(SMPVerdict v) {
    switch (v) {
        case SMPVerdict::holds: return "holds";
        case SMPVerdict::violated: return "violated";
        case SMPVerdict::not_applicable: return "not-applicable";
    }
    return {};
}

SMPVariant smp_variant_from_string(const std::string& s) {
    for (SMPVariant v : {SMPVariant::interior, SMPVariant::inf_min, SMPVariant::torus, SMPVariant::z_closure,
                         SMPVariant::levy}) {
        if (to_string(v) == s) return v;
    }
    throw ValidationError("variant", "unknown SMP variant '" + s + "'");
}

SubsolutionVerdict subsolution_check(const GridFunction& u, const Scenario& s, double tol, bool supersolution) {
    const GridFunction r = residual(u, s);
    const Domain& xd = u.grid().x_domain();
    SubsolutionVerdict out;
    out.worst_residual = supersolution ? kInf : -kInf;
    for (Index ix = 0; ix < u.x_count(); ++ix) {
        if (is_dirichlet(xd, ix)) continue;
        for (Index iv = 0; iv < u.v_count(); ++iv) {
            const double val = r(ix, iv);
            if (supersolution ? val < out.worst_residual : val > out.worst_residual) {
                out.worst_residual = val;
                out.worst = {ix, iv};
            }
        }
    }
    if (out.worst.ix < 0) out.worst_residual = 0.0;
    out.ok = supersolution ? out.worst_residual >= -tol : out.worst_residual <= tol;
    return out;
}

Extremum argmax_set(const GridFunction& u, VRestriction restriction, double eps, bool minimize) {
    const PhaseGrid& g = u.grid();
    const Domain& xd = g.x_domain();
    auto allowed = [&](Index ix, Index iv) {
        return !is_dirichlet(xd, ix) && (restriction == VRestriction::full || g.is_v0(iv));
    };
    Extremum e;
    e.value = minimize ? kInf : -kInf;
    for (Index ix = 0; ix < u.x_count(); ++ix)
        for (Index iv = 0; iv < u.v_count(); ++iv)
            if (allowed(ix, iv)) e.value = minimize ? std::min(e.value, u(ix, iv)) : std::max(e.value, u(ix, iv));
    for (Index ix = 0; ix < u.x_count(); ++ix)
        for (Index iv = 0; iv < u.v_count(); ++iv)
            if (allowed(ix, iv) && std::abs(u(ix, iv) - e.value) <= eps) e.nodes.push_back({ix, iv});
    return e;
}

SMPReport verify_smp(const GridFunction& u, const Scenario& s, SMPVariant variant, double eps) {
    SMPReport r;
    r.variant = variant;
    r.epsilon = eps;
    r.restriction =
        variant == SMPVariant::torus || variant == SMPVariant::levy ? VRestriction::full : VRestriction::v0;
    const Domain& xd = s.x_domain;
    r.active_count = xd.active_count();
    const bool minimize = variant == SMPVariant::inf_min;

    const SubsolutionVerdict sub = subsolution_check(u, s, eps, minimize);
    r.subsolution = sub.ok;
    r.worst_node = sub.worst;
    r.worst_residual = sub.worst_residual;
    r.controllability = is_controllable(s);

    if (variant == SMPVariant::torus && !s.torus()) {
        r.note = "torus variant needs periodic x-axes";
        return r;
    }
    if (variant == SMPVariant::levy) {
        if (s.nonlocal != NonlocalKind::levy) {
            r.note = "levy variant needs shift increments";
            return r;
        }
        const double radius = s.v_domain.min_spacing();
        bool ball = false;
        try {
            ball = support_contains_ball(s.measure, radius);
        } catch (const PreconditionError& e) {
            r.note = e.what();
            return r;
        }
        if (!ball) {
            r.note = "increment support does not contain B(0, " + format_real(radius) + ")";
            return r;
        }
    }
    if (!sub.ok) {
        r.note = minimize ? "not a supersolution" : "not a subsolution";
        return r;
    }

    const Extremum ext = argmax_set(u, r.restriction, eps, minimize);
    r.extremum = ext.value;
    r.extremal_nodes = ext.nodes;
    if (ext.nodes.empty()) {
        r.note = "no interior nodes";
        return r;
    }
    r.z0.assign(xd.node_count(), false);
    for (const Node& n : ext.nodes) r.z0[n.ix] = true;
    const ReachReport reach = reachable_set(r.z0, s);
    r.propagation = reach.masks.back();
    for (bool b : r.propagation) r.propagation_count += b ? 1 : 0;

    const PhaseGrid& g = u.grid();
    auto deficit = [&](Index ix, Index iv) { return minimize ? u(ix, iv) - r.extremum : r.extremum - u(ix, iv); };
    auto v_allowed = [&](Index iv) { return r.restriction == VRestriction::full || g.is_v0(iv); };

    double worst = eps;
    for (Index ix = 0; ix < u.x_count(); ++ix) {
        if (is_dirichlet(xd, ix)) continue;
        const bool in_scope = variant != SMPVariant::z_closure || r.propagation[ix];
        for (Index iv = 0; iv < u.v_count(); ++iv) {
            if (!v_allowed(iv)) continue;
            const double d = deficit(ix, iv);
            if (r.propagation[ix] && d > eps) r.propagation_consistent = false;
            if (in_scope && d > worst) {
                worst = d;
                r.violation = Node{ix, iv};
                r.violation_value = u(ix, iv);
            }
        }
    }
    r.verdict = r.violation ? SMPVerdict::violated : SMPVerdict::holds;
    return r;
}

std::string render_text(const SMPReport& r, const Scenario& s) {
    const Domain& xd = s.x_domain;
    std::ostringstream out;
    auto point = [&](Index ix) {
        const Vector p = xd.point(ix);
        std::string t = "(";
        for (Index a = 0; a < p.size(); ++a) t += (a ? " " : "") + format_real(p[a]);
        return t + ")";
    };
    auto vpoint = [&](Index iv) {
        const Vector p = s.grid->v_point(iv);
        std::string t = "(";
        for (Index a = 0; a < p.size(); ++a) t += (a ? " " : "") + format_real(p[a]);
        return t + ")";
    };
    out << "variant: " << to_string(r.variant) << '\n';
    out << "restriction: " << to_string(r.restriction) << '\n';
    out << "epsilon: " << format_real(r.epsilon) << '\n';
    out << "subsolution: " << (r.subsolution ? "true" : "false") << '\n';
    out << "worst_residual: " << format_real(r.worst_residual) << '\n';
    if (r.worst_node.ix >= 0) out << "worst_residual_node: x=" << point(r.worst_node.ix) << " v=" << vpoint(r.worst_node.iv) << '\n';
    out << "extremum: " << format_real(r.extremum) << '\n';
    out << "extremal_nodes: " << r.extremal_nodes.size() << '\n';
    out << "propagation_nodes: " << r.propagation_count << " of " << r.active_count << '\n';
    out << "propagation_consistent: " << (r.propagation_consistent ? "true" : "false") << '\n';
    out << "controllable: " << (r.controllability.controllable ? "true" : "false") << '\n';
    if (!r.controllability.controllable && r.controllability.from >= 0)
        out << "witness: from=" << point(r.controllability.from) << " to=" << point(r.controllability.to) << '\n';
    out << "capture_radius: " << format_real(r.controllability.capture_radius) << '\n';
    out << "smp: " << to_string(r.verdict) << '\n';
    if (r.violation) {
        out << "violation: x=" << point(r.violation->ix) << " v=" << vpoint(r.violation->iv)
            << " u=" << format_real(r.violation_value) << '\n';
    }
    if (!r.note.empty()) out << "note: " << r.note << '\n';
    return out.str();
}

std::string smp_csv_header() {
    return "label,variant,restriction,epsilon,subsolution,worst_residual,extremum,extremal_nodes,"
           "propagation_nodes,active_nodes,propagation_consistent,controllable,smp,violation_ix,violation_iv,"
           "violation_value";
}

std::string smp_csv_row(const SMPReport& r, const Scenario& /*s*/, const std::string& label) {
    std::ostringstream out;
    out << label << ',' << to_string(r.variant) << ',' << to_string(r.restriction) << ',' << format_real(r.epsilon)
        << ',' << (r.subsolution ? "true" : "false") << ',' << format_real(r.worst_residual) << ','
        << format_real(r.extremum) << ',' << r.extremal_nodes.size() << ',' << r.propagation_count << ','
        << r.active_count << ',' << (r.propagation_consistent ? "true" : "false") << ','
        << (r.controllability.controllable ? "true" : "false") << ',' << to_string(r.verdict) << ',';
    if (r.violation) out << r.violation->ix << ',' << r.violation->iv << ',' << format_real(r.violation_value);
    else out << ",,";
    return out.str();
}

Step2Audit step2_sign_audit(const GridFunction& u, Index ix, double eps) {
    const PhaseGrid& g = u.grid();
    Step2Audit a;
    a.ix = ix;
    const auto row = u.values().row(ix);
    a.max_value = row.maxCoeff(&a.v_star);
    a.jump_at_max = jump_apply(u, ix, a.v_star);
    const Vector& w = g.measure_weights();
    for (Index k = 0; k < w.size(); ++k) {
        const double val = g.nonlocal() == NonlocalKind::levy ? apply(g.levy_stencil(a.v_star, k), row)
                                                             : apply(g.measure_stencils()[k], row);
        if (val < a.max_value - eps) {
            a.below.push_back(k);
            a.below_weight += w[k];
        }
    }
    a.contradiction = a.below_weight > 0.0 && a.jump_at_max < 0.0;
    return a;
}

}  // namespace rtsmp
