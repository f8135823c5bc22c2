#include "rtsmp/cli.hpp"

#include "rtsmp/errors.hpp"
#include "rtsmp/field.hpp"
#include "rtsmp/hjb.hpp"
#include "rtsmp/reach.hpp"
#include "rtsmp/registry.hpp"
#include "rtsmp/smp.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace rtsmp {

namespace {

struct Options {
    std::string example;
    std::string scenario_file;
    std::string out_dir;
    int threads = 1;
    long long seed = 0;
    std::optional<double> tol;
    std::string resolution;
    std::string bc;
    std::optional<double> lambda;
    std::string g;
    std::string psi;
    std::string sweep;
    // solve
    std::string method = "upwind";
    // reach
    std::string from;
    std::string to;
    // verify-smp
    std::string field;
    std::string variant;
    std::optional<double> eps;
    // compare
    std::string u_field;
    std::string w_field;
};

void add_common(CLI::App* cmd, Options& o) {
    auto* ex = cmd->add_option("--example", o.example, "built-in example name (see `examples`)");
    auto* sc = cmd->add_option("--scenario", o.scenario_file, "scenario file");
    ex->excludes(sc);
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--threads", o.threads, "worker threads for Jacobi sweeps")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "recorded in the report");
    cmd->add_option("--tol", o.tol, "solver tolerance");
    cmd->add_option("--resolution", o.resolution, "\"nx,nv\" nodes per x-axis and per velocity axis");
    cmd->add_option("--bc", o.bc, "x boundary condition")->check(CLI::IsMember({"dirichlet", "torus"}));
    cmd->add_option("--lambda", o.lambda, "zeroth-order coefficient");
    cmd->add_option("--g", o.g, "source field");
    cmd->add_option("--psi", o.psi, "boundary data");
    cmd->add_option("--sweep", o.sweep, "sweep order")->check(CLI::IsMember({"jacobi", "gauss-seidel"}));
}

std::string repeat(const std::string& item, int dim) {
    std::string s;
    for (int a = 0; a < dim; ++a) s += (a ? ", " : "") + item;
    return s;
}

int config_dim(const ScenarioConfig& c, const std::string& section) {
    if (c.has(section, "dimension")) return std::stoi(c.get(section, "dimension"));
    const std::string lower = c.get_or(section, "lower", "(0)");
    std::istringstream in(lower.substr(1, lower.size() - 2));
    int n = 0;
    std::string tok;
    while (in >> tok) ++n;
    return n;
}

ScenarioConfig load_config(const Options& o) {
    ScenarioConfig c;
    if (!o.example.empty()) c = find_example(o.example).config();
    else if (!o.scenario_file.empty()) c = ScenarioConfig::load(o.scenario_file);
    else throw ValidationError("--example", "pass --example NAME or --scenario FILE");

    if (o.lambda) c.set("equation", "lambda", format_real(*o.lambda));
    if (!o.g.empty()) c.set("equation", "g", o.g);
    if (!o.psi.empty()) c.set("equation", "psi", o.psi);
    if (o.tol) c.set("solver", "tolerance", format_real(*o.tol));
    if (o.threads > 1) {
        c.set("solver", "threads", std::to_string(o.threads));
        c.set("solver", "sweep", "jacobi");
    }
    if (!o.sweep.empty()) c.set("solver", "sweep", o.sweep);
    const int xd = config_dim(c, "domain_x");
    if (!o.bc.empty()) c.set("domain_x", "periodic", repeat(o.bc == "torus" ? "true" : "false", xd));
    if (!o.resolution.empty()) {
        const auto comma = o.resolution.find(',');
        const std::string nx = o.resolution.substr(0, comma);
        c.set("domain_x", "resolution", nx);
        if (comma != std::string::npos) {
            const std::string nv = o.resolution.substr(comma + 1);
            c.set("domain_v", "resolution", nv);
            const std::string kind = c.get_or("measure", "kind", "atoms");
            if (kind != "atoms") {
                const int vd = config_dim(c, "domain_v") - (kind == "uniform-sphere" ? 1 : 0);
                Index count = 1;
                Index per = 0;
                try {
                    per = std::stol(nv);
                } catch (const std::exception&) {
                    throw ValidationError("--resolution", "expected \"nx,nv\"");
                }
                for (int a = 0; a < std::max(vd, 1); ++a) count *= per;
                c.set("measure", "nodes", std::to_string(count));
            }
        }
    }
    return c;
}

Vector parse_point(const std::string& text, int dim, const std::string& key) {
    std::vector<double> vals;
    std::stringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            std::size_t used = 0;
            vals.push_back(std::stod(tok, &used));
        } catch (const std::exception&) {
            throw ValidationError(key, "expected comma-separated reals, got '" + text + "'");
        }
    }
    if (static_cast<int>(vals.size()) != dim) throw ValidationError(key, "point dimension does not match domain_x");
    return Eigen::Map<Vector>(vals.data(), dim);
}

std::string point_text(const Vector& p) {
    std::string s = "(";
    for (Index a = 0; a < p.size(); ++a) s += (a ? " " : "") + format_real(p[a]);
    return s + ")";
}

struct Output {
    std::filesystem::path dir;
    bool enabled = false;

    explicit Output(const std::string& d) : dir(d), enabled(!d.empty()) {
        if (enabled) std::filesystem::create_directories(dir);
    }
    std::ofstream open(const std::string& name) const {
        std::ofstream f(dir / name);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        return f;
    }
};

std::string header(const Options& o, const Scenario& s, const std::string& command) {
    std::ostringstream h;
    h << "command: " << command << '\n';
    h << "source: " << (o.example.empty() ? o.scenario_file : "example " + o.example) << '\n';
    if (!o.example.empty() && !find_example(o.example).truncation.empty())
        h << "truncation: " << find_example(o.example).truncation << '\n';
    h << "seed: " << o.seed << '\n';
    h << "x_nodes: " << s.x_domain.node_count() << '\n';
    h << "v_nodes: " << s.grid->v_count() << '\n';
    return h.str();
}

int cmd_solve(const Options& o, std::ostream& out) {
    const Scenario s = build_scenario(load_config(o));
    if (o.method != "upwind" && o.method != "semi-lagrangian")
        throw ValidationError("--method", "expected upwind or semi-lagrangian");
    const SolveResult r = o.method == "upwind" ? solve_stationary(s, s.solver) : semi_lagrangian_value(s, s.solver);
    const GridFunction res = residual(r.solution, s);
    std::ostringstream rep;
    rep << header(o, s, "solve");
    rep << "method: " << o.method << '\n';
    rep << "iterations: " << r.iterations << '\n';
    rep << "update_norm: " << format_real(r.update_norm) << '\n';
    rep << "residual_norm: " << format_real(r.residual_norm) << '\n';
    rep << "min: " << format_real(r.solution.values().minCoeff()) << '\n';
    rep << "max: " << format_real(r.solution.values().maxCoeff()) << '\n';
    out << rep.str();
    const Output files(o.out_dir);
    if (files.enabled) {
        auto f = files.open("solution.csv");
        write_field_csv(f, r.solution, &res);
        auto fr = files.open("residual.csv");
        write_field_csv(fr, res, nullptr, "residual");
        files.open("report.txt") << rep.str();
    }
    return 0;
}

int cmd_reach(const Options& o, std::ostream& out) {
    const Scenario s = build_scenario(load_config(o));
    const Domain& xd = s.x_domain;
    const Vector from = o.from.empty() ? xd.ball_center() : parse_point(o.from, xd.dim(), "--from");
    const Index seed = xd.nearest_node(from);
    Mask seeds(xd.node_count(), false);
    seeds[seed] = true;
    const ReachReport r = reachable_set(seeds, s);
    const Controllability c = is_controllable(s);
    Index reached = 0;
    for (bool b : r.masks.back()) reached += b ? 1 : 0;

    std::ostringstream rep;
    rep << header(o, s, "reach");
    rep << "from: " << point_text(from) << " node " << point_text(xd.point(seed)) << '\n';
    rep << "segment_horizon: " << format_real(r.t_step) << '\n';
    rep << "capture_radius: " << format_real(r.capture_radius) << '\n';
    rep << "segments: " << r.masks.size() - 1 << '\n';
    rep << "reached: " << reached << " of " << xd.active_count() << '\n';
    rep << "converged: " << (r.converged ? "true" : "false") << '\n';
    rep << "controllable: " << (c.controllable ? "true" : "false") << '\n';
    if (!c.controllable)
        rep << "witness: from=" << point_text(xd.point(c.from)) << " to=" << point_text(xd.point(c.to)) << '\n';
    if (!o.to.empty()) {
        const Vector to = parse_point(o.to, xd.dim(), "--to");
        const Index target = xd.nearest_node(to);
        rep << "to: " << point_text(to) << " node " << point_text(xd.point(target)) << '\n';
        rep << "arrival_time: " << format_real(r.arrival[target]) << '\n';
        if (!o.example.empty()) {
            const Vector d = xd.displacement(from, to);
            const ArrivalLaw law = find_example(o.example).arrival;
            if (law == ArrivalLaw::euclidean) rep << "expected_arrival: " << format_real(d.norm()) << '\n';
            if (law == ArrivalLaw::manhattan) rep << "expected_arrival: " << format_real(d.lpNorm<1>()) << '\n';
        }
    }
    out << rep.str();
    const Output files(o.out_dir);
    if (files.enabled) {
        auto f = files.open("reach.csv");
        write_reach_csv(f, r, xd);
        files.open("masks.txt") << mask_bits(r.masks.back(), xd);
        files.open("report.txt") << rep.str();
    }
    return 0;
}

int cmd_verify(const Options& o, std::ostream& out) {
    const Scenario s = build_scenario(load_config(o));
    const ExampleEntry* entry = o.example.empty() ? nullptr : &find_example(o.example);
    std::string field = o.field;
    if (field.empty()) field = entry ? entry->default_field : "solve";
    GridFunction u;
    double eps = 1e-9;
    if (field == "solve") {
        u = solve_stationary(s, s.solver).solution;
        eps = 10.0 * s.solver.tolerance;
    } else {
        u = grid_sample(FieldSpec::parse(field), s.grid);
    }
    if (o.eps) eps = *o.eps;
    SMPVariant variant = s.torus() ? SMPVariant::torus : SMPVariant::interior;
    if (entry) variant = entry->default_variant;
    if (!o.variant.empty()) variant = smp_variant_from_string(o.variant);

    const SMPReport r = verify_smp(u, s, variant, eps);
    std::ostringstream rep;
    rep << header(o, s, "verify-smp");
    rep << "field: " << field << '\n';
    rep << render_text(r, s);
    out << "subsolution=" << (r.subsolution ? "true" : "false")
        << " controllable=" << (r.controllability.controllable ? "true" : "false")
        << " smp=" << to_string(r.verdict) << '\n';
    out << rep.str();
    const Output files(o.out_dir);
    if (files.enabled) {
        files.open("report.txt") << rep.str();
        files.open("report.csv") << smp_csv_header() << '\n'
                                 << smp_csv_row(r, s, o.example.empty() ? o.scenario_file : o.example) << '\n';
        const GridFunction res = residual(u, s);
        auto f = files.open("solution.csv");
        write_field_csv(f, u, &res);
    }
    return r.verdict == SMPVerdict::violated ? 1 : 0;
}

int cmd_compare(const Options& o, std::ostream& out) {
    const Scenario s = build_scenario(load_config(o));
    const double tol = o.tol ? *o.tol : s.solver.tolerance;
    std::ostringstream rep;
    rep << header(o, s, "compare");
    const Output files(o.out_dir);
    int code = 0;
    if (o.u_field.empty() != o.w_field.empty()) throw ValidationError("--u", "pass both --u and --w");
    if (!o.u_field.empty()) {
        const GridFunction u = grid_sample(FieldSpec::parse(o.u_field), s.grid);
        const GridFunction w = grid_sample(FieldSpec::parse(o.w_field), s.grid);
        const ComparisonReport c = comparison_check(u, w, s, tol);
        rep << "boundary_ordered: " << (c.boundary_ordered ? "true" : "false") << '\n';
        rep << "interior_violations: " << c.violations.size() << '\n';
        rep << "max_excess: " << format_real(c.max_excess) << '\n';
        rep << "comparison: " << (c.holds() ? "holds" : "violated") << '\n';
        code = c.holds() ? 0 : 1;
    } else {
        const SolveResult a = solve_stationary(s, s.solver);
        const SolveResult b = semi_lagrangian_value(s, s.solver);
        const double gap = (a.solution.values() - b.solution.values()).cwiseAbs().maxCoeff();
        rep << "upwind_iterations: " << a.iterations << '\n';
        rep << "semi_lagrangian_iterations: " << b.iterations << '\n';
        rep << "sup_gap: " << format_real(gap) << '\n';
        if (files.enabled) {
            auto f = files.open("solution.csv");
            write_field_csv(f, a.solution);
            auto g = files.open("semi_lagrangian.csv");
            write_field_csv(g, b.solution);
        }
    }
    out << rep.str();
    if (files.enabled) files.open("report.txt") << rep.str();
    return code;
}

int cmd_examples(std::ostream& out) {
    for (const auto& e : example_registry()) {
        out << e.name << "  " << e.description << '\n';
        out << "     expected: controllable=" << (e.expect_controllable ? "true" : "false")
            << " smp=" << to_string(e.expect_smp) << " variant=" << to_string(e.default_variant)
            << " field=" << e.default_field << '\n';
        if (!e.truncation.empty()) out << "     " << e.truncation << '\n';
    }
    return 0;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"radiative-transfer HJB toolkit"};
    app.require_subcommand(1);
    Options o;

    auto* solve = app.add_subcommand("solve", "solve the stationary equation");
    add_common(solve, o);
    solve->add_option("--method", o.method, "upwind or semi-lagrangian");

    auto* reach = app.add_subcommand("reach", "reachable set from a point");
    add_common(reach, o);
    reach->add_option("--from", o.from, "start point, comma-separated");
    reach->add_option("--to", o.to, "target point, comma-separated");

    auto* verify = app.add_subcommand("verify-smp", "check the strong maximum principle on a field");
    add_common(verify, o);
    verify->add_option("--field", o.field, "field spec, or `solve` for the solver output");
    verify->add_option("--variant", o.variant, "interior, inf-min, torus, z-closure or levy");
    verify->add_option("--eps", o.eps, "tolerance for equality with the maximum");

    auto* compare = app.add_subcommand("compare", "comparison of two fields, or of the two solvers");
    add_common(compare, o);
    compare->add_option("--u", o.u_field, "lower field spec");
    compare->add_option("--w", o.w_field, "upper field spec");

    auto* examples = app.add_subcommand("examples", "list built-in examples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*solve) return cmd_solve(o, out);
        if (*reach) return cmd_reach(o, out);
        if (*verify) return cmd_verify(o, out);
        if (*compare) return cmd_compare(o, out);
        if (*examples) return cmd_examples(out);
    } catch (const ValidationError& e) {
        err << "input error: " << e.what() << '\n';
        return 2;
    } catch (const GridError& e) {
        err << "input error: " << e.what() << '\n';
        return 2;
    } catch (const PreconditionError& e) {
        err << "input error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace rtsmp
