#include "rtsmp/registry.hpp"

#include "rtsmp/errors.hpp"

namespace rtsmp {

namespace {

const char* const k11 = R"(
[domain_x]
lower = (0)
upper = (1)
periodic = true
resolution = 128

[domain_v]
lower = (-1)
upper = (1)
resolution = 32

[measure]
kind = atoms
atoms = (-1):0.5, (1):0.5

[drift]
kind = velocity

[equation]
lambda = 0
g = const:0
psi = const:0
)";

const char* const k12 = R"(
[domain_x]
lower = (0 0)
upper = (1 1)
periodic = true
resolution = 128

[domain_v]
lower = (-1 -1)
upper = (1 1)
resolution = 32

[measure]
kind = uniform-sphere
center = (0 0)
radius = 1
nodes = 32

[drift]
kind = velocity

[equation]
lambda = 0
g = const:0
psi = const:0
)";

const char* const k21 = R"(
[domain_x]
lower = (-1)
upper = (1)
resolution = 128

[domain_v]
lower = (-2)
upper = (2)
resolution = 32

[measure]
kind = atoms
atoms = (-1):0.5, (1):0.5

[drift]
kind = velocity

[equation]
lambda = 0
g = const:0
psi = const:0
)";

const char* const k22 = R"(
[domain_x]
lower = (0 0)
upper = (1 1)
resolution = 128

[domain_v]
lower = (-2 -2)
upper = (2 2)
resolution = 32
shape = ball

[measure]
kind = atoms
atoms = (1 0):0.25, (-1 0):0.25, (0 1):0.25, (0 -1):0.25

[drift]
kind = velocity

[equation]
lambda = 0
g = const:0
psi = const:0
)";

const char* const k23 = R"(
[domain_x]
lower = (-1 -1)
upper = (1 1)
resolution = 128
shape = ball

[domain_v]
lower = (-1 -1)
upper = (1 1)
resolution = 32
shape = ball

[measure]
kind = uniform-ball
center = (0 0)
radius = 1
nodes = 64

[drift]
kind = control
controls = sphere
control_count = 32

[equation]
lambda = 0
g = const:0
psi = const:0
)";

const char* const k24 = R"(
[domain_x]
lower = (-2 -2)
upper = (2 2)
resolution = 128

[domain_v]
lower = (-2 -2)
upper = (2 2)
resolution = 32
shape = ball

[measure]
kind = uniform-sphere
center = (0 0)
radius = 1
nodes = 32

[drift]
kind = velocity

[equation]
lambda = 0
g = const:0
psi = const:1
)";

const char* const k25 = R"(
[domain_x]
lower = (-2)
upper = (2)
resolution = 128

[domain_v]
lower = (0)
upper = (1)
resolution = 32

[measure]
kind = uniform-box
lower = (0)
upper = (1)
nodes = 32

[drift]
kind = velocity

[equation]
lambda = 0
g = const:0
psi = min(1, 1 + x)
)";

const char* const k26 = R"(
[domain_x]
lower = (0 0)
upper = (1 1)
periodic = true
resolution = 128

[domain_v]
lower = (-1 -1)
upper = (1 1)
resolution = 32

[measure]
kind = uniform-box
lower = (-1 -1)
upper = (1 1)
nodes = 16

[drift]
kind = constant
vector = (1 0.41421356237309503)

[equation]
lambda = 0
g = const:0
psi = const:0

[solver]
reach_horizon = 200
)";

std::vector<ExampleEntry> build() {
    std::vector<ExampleEntry> r;
    r.push_back({"1.1", "torus T^1, two velocity atoms +-1 with weights 1/2, b = v", k11, "const:1",
                 SMPVariant::torus, true, SMPVerdict::holds, ArrivalLaw::euclidean, ""});
    r.push_back({"1.2", "torus T^2, normalized uniform measure on the unit circle, b = v", k12, "const:1",
                 SMPVariant::torus, true, SMPVerdict::holds, ArrivalLaw::none, ""});
    r.push_back({"2.1", "interval (-1,1), V = (-2,2), atoms +-1 with weights 1/2, b = v", k21, "const:1",
                 SMPVariant::interior, true, SMPVerdict::holds, ArrivalLaw::euclidean, ""});
    r.push_back({"2.2", "unit square, atoms +-e1, +-e2 with weights 1/4, V = B(0,2), b = v", k22, "const:1",
                 SMPVariant::interior, true, SMPVerdict::holds, ArrivalLaw::manhattan, ""});
    r.push_back({"2.3", "unit disc, uniform measure on B(0,1), b = alpha over the unit circle and 0", k23,
                 "const:1", SMPVariant::interior, true, SMPVerdict::holds, ArrivalLaw::euclidean, ""});
    r.push_back({"2.4", "plane cut to [-2,2]^2, uniform measure on the unit circle, V = B(0,2), b = v", k24,
                 "const:1", SMPVariant::interior, true, SMPVerdict::holds, ArrivalLaw::none,
                 "R^2 truncated to [-2,2]^2 with Dirichlet data from u"});
    r.push_back({"2.5", "line cut to [-2,2], V = (0,1) with uniform measure, b = v, u = min(1, 1+x)", k25,
                 "min(1, 1 + x)", SMPVariant::interior, false, SMPVerdict::violated, ArrivalLaw::none,
                 "R truncated to [-2,2] with Dirichlet data from u"});
    r.push_back({"2.6", "torus T^2, constant drift (1, sqrt(2)-1), uniform measure on (-1,1)^2", k26, "const:1",
                 SMPVariant::torus, true, SMPVerdict::holds, ArrivalLaw::none, ""});
    return r;
}

}  // namespace

const std::vector<ExampleEntry>& example_registry() {
    static const std::vector<ExampleEntry> entries = build();
    return entries;
}

const ExampleEntry& find_example(const std::string& name) {
    for (const auto& e : example_registry())
        if (e.name == name) return e;
    throw ValidationError("example", "unknown example '" + name + "'");
}

}  // namespace rtsmp
