#pragma once

#include "rtsmp/domain.hpp"
#include "rtsmp/drift.hpp"
#include "rtsmp/field.hpp"
#include "rtsmp/grid.hpp"
#include "rtsmp/measure.hpp"

#include <map>
#include <memory>
#include <string>

namespace rtsmp {

/// sup over controls (the main equation) or inf (the minimum-principle variant).
enum class OptimizationMode { sup, inf };
enum class SweepOrder { jacobi, gauss_seidel };

std::string to_string(OptimizationMode mode);
std::string to_string(SweepOrder order);

struct SolverConfig {
    Index max_iterations = 100000;
    /// Bound on the sup-norm distance to the discrete fixed point; the final
    /// update norm never exceeds it.
    double tolerance = 1e-9;
    SweepOrder sweep = SweepOrder::gauss_seidel;
    /// Semi-Lagrangian step; 0 picks min spacing / max |b| (one-cell CFL).
    double time_step = 0.0;
    /// Worker threads for Jacobi sweeps.
    int threads = 1;
};

struct ReachConfig {
    /// Per-segment horizon; 0 picks diameter(Omega) / min nonzero |b|.
    double horizon = 0.0;
    /// Cap on the number of segments; 0 picks 4 * (number of x-nodes).
    Index k_limit = 0;
};

/// Full problem description. Immutable after build_scenario.
struct Scenario {
    Domain x_domain;
    Domain v_domain;
    VelocityLayout v_layout = VelocityLayout::measure;
    VelocityMeasure measure;
    DriftField drift;
    double lambda = 0.0;
    double gamma = 0.0;
    OptimizationMode mode = OptimizationMode::sup;
    NonlocalKind nonlocal = NonlocalKind::jump;
    FieldSpec g;
    FieldSpec psi;
    double holder = 1.0;
    SolverConfig solver;
    ReachConfig reach;
    std::shared_ptr<const PhaseGrid> grid;

    bool torus() const { return x_domain.fully_periodic(); }
};

/// Parsed scenario file: section -> key -> raw value. Purely syntactic.
class ScenarioConfig {
  public:
    using Section = std::map<std::string, std::string>;

    /// Line-oriented `[section]` / `key = value` text with `#` comments.
    /// Throws ValidationError on syntax errors or unknown sections.
    static ScenarioConfig parse(const std::string& text);
    static ScenarioConfig load(const std::string& path);

    std::string render() const;

    bool has(const std::string& section, const std::string& key) const;
    const std::string& get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const;
    void set(const std::string& section, const std::string& key, std::string value);
    void erase(const std::string& section, const std::string& key);
    const std::map<std::string, Section>& sections() const { return sections_; }

  private:
    std::map<std::string, Section> sections_;
};

/// Validates and discretizes. Throws ValidationError naming the offending key
/// ("measure.atoms", "equation.lambda", "drift.kind", ...).
Scenario build_scenario(const ScenarioConfig& config);
Scenario load_scenario(const std::string& path);

/// Inverse of build_scenario: every stored real is written with 17
/// significant digits, so a rebuild reproduces it bit for bit.
ScenarioConfig to_config(const Scenario& scenario);

}  // namespace rtsmp
