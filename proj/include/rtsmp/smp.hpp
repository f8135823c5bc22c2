#pragma once

#include "rtsmp/reach.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rtsmp {

enum class SMPVariant { interior, inf_min, torus, z_closure, levy };
enum class VRestriction { v0, full };
enum class SMPVerdict { holds, violated, not_applicable };

std::string to_string(SMPVariant v);
std::string to_string(VRestriction r);
std::string to_string(SMPVerdict v);
SMPVariant smp_variant_from_string(const std::string& s);  // ValidationError("variant")

struct SubsolutionVerdict {
    bool ok = true;
    Node worst{-1, -1};
    double worst_residual = 0.0;
};

/// residual <= tol at every non-Dirichlet node (>= -tol in supersolution mode).
SubsolutionVerdict subsolution_check(const GridFunction& u, const Scenario& s, double tol, bool supersolution = false);

struct Extremum {
    double value = 0.0;
    std::vector<Node> nodes;  // lexicographic
};

/// Max (or min) over non-Dirichlet x-nodes times the restricted velocity
/// nodes, with every node within eps of it.
Extremum argmax_set(const GridFunction& u, VRestriction restriction, double eps, bool minimize = false);

struct SMPReport {
    SMPVariant variant = SMPVariant::interior;
    VRestriction restriction = VRestriction::v0;
    double epsilon = 0.0;

    bool subsolution = false;
    Node worst_node{-1, -1};
    double worst_residual = 0.0;

    double extremum = 0.0;
    std::vector<Node> extremal_nodes;
    Mask z0;
    Mask propagation;
    Index propagation_count = 0;
    Index active_count = 0;

    SMPVerdict verdict = SMPVerdict::not_applicable;
    std::optional<Node> violation;
    double violation_value = 0.0;
    /// u is within eps of the extremum on propagation x restricted V.
    bool propagation_consistent = true;

    Controllability controllability;
    std::string note;
};

/// Maximum principle check on a grid function. The verdict quantifies over the
/// non-Dirichlet x-nodes for the interior, inf-min, torus and levy variants
/// and over the propagation set for z-closure; the velocity restriction is
/// V0 except for torus and levy (full velocity grid).
SMPReport verify_smp(const GridFunction& u, const Scenario& s, SMPVariant variant, double eps);

/// key: value lines.
std::string render_text(const SMPReport& r, const Scenario& s);
std::string smp_csv_header();
std::string smp_csv_row(const SMPReport& r, const Scenario& s, const std::string& label);

struct Step2Audit {
    Index ix = -1;
    double max_value = 0.0;  // max of u(ix, .) over the velocity grid
    Index v_star = -1;
    double jump_at_max = 0.0;
    std::vector<Index> below;  // measure nodes with u(ix, q_k) < M - eps
    double below_weight = 0.0;
    bool contradiction = false;
};

/// Jump operator at the row maximum; flags a contradiction when the below-max
/// set has positive weight and the jump term there is negative.
Step2Audit step2_sign_audit(const GridFunction& u, Index ix, double eps);

}  // namespace rtsmp
