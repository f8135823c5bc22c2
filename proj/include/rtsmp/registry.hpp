#pragma once

#include "rtsmp/scenario.hpp"
#include "rtsmp/smp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rtsmp {

enum class ArrivalLaw { none, euclidean, manhattan };

struct ExampleEntry {
    std::string name;
    std::string description;
    std::string scenario_text;
    /// Grid function the verifier checks by default.
    std::string default_field;
    SMPVariant default_variant = SMPVariant::interior;
    bool expect_controllable = true;
    SMPVerdict expect_smp = SMPVerdict::holds;
    ArrivalLaw arrival = ArrivalLaw::none;
    std::string truncation;  // non-empty when an unbounded domain was cut to a box

    ScenarioConfig config() const { return ScenarioConfig::parse(scenario_text); }
    Scenario scenario() const { return build_scenario(config()); }
};

const std::vector<ExampleEntry>& example_registry();
/// Throws ValidationError("example") for unknown names.
const ExampleEntry& find_example(const std::string& name);

}  // namespace rtsmp
