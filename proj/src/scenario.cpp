#include "rtsmp/scenario.hpp"

#include "rtsmp/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rtsmp {

std::string to_string(OptimizationMode mode) { return mode == OptimizationMode::sup ? "sup" : "inf"; }
std::string to_string(SweepOrder order) { return order == SweepOrder::jacobi ? "jacobi" : "gauss-seidel"; }

namespace {

const std::map<std::string, std::set<std::string>> kSchema = {
    {"domain_x", {"dimension", "lower", "upper", "periodic", "resolution", "shape"}},
    {"domain_v", {"dimension", "lower", "upper", "periodic", "resolution", "shape", "layout"}},
    {"measure", {"kind", "atoms", "mass", "nodes", "lower", "upper", "center", "radius"}},
    {"drift", {"kind", "vector", "matrix", "controls", "control_list", "control_count"}},
    {"equation", {"lambda", "gamma", "mode", "nonlocal", "g", "psi", "holder"}},
    {"solver", {"max_iterations", "tolerance", "sweep", "dt", "threads", "reach_horizon", "reach_k_limit"}},
};

const char* const kSectionOrder[] = {"domain_x", "domain_v", "measure", "drift", "equation", "solver"};

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_real(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const char* begin = s.data();
    if (!s.empty() && s[0] == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ValidationError(key, "expected a real number, got '" + s + "'");
    return v;
}

Index parse_int(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ValidationError(key, "expected an integer, got '" + s + "'");
    return static_cast<Index>(v);
}

bool parse_bool(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ValidationError(key, "expected true/false, got '" + s + "'");
}

Vector parse_vector(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    if (s.size() < 2 || s.front() != '(' || s.back() != ')')
        throw ValidationError(key, "expected a vector '(a b ...)', got '" + s + "'");
    std::istringstream in(s.substr(1, s.size() - 2));
    std::vector<double> vals;
    std::string tok;
    while (in >> tok) vals.push_back(parse_real(key, tok));
    if (vals.empty()) throw ValidationError(key, "empty vector");
    return Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size()));
}

std::string render_vector(const Vector& v) {
    std::string s = "(";
    for (Index i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += format_real(v[i]);
    }
    return s + ")";
}

Eigen::MatrixXd parse_vector_list(const std::string& key, const std::string& raw, int dim) {
    const auto items = split_list(raw);
    Eigen::MatrixXd m(dim, static_cast<Index>(items.size()));
    for (std::size_t i = 0; i < items.size(); ++i) {
        const Vector v = parse_vector(key, items[i]);
        if (v.size() != dim) throw ValidationError(key, "entry " + std::to_string(i) + " has wrong dimension");
        m.col(static_cast<Index>(i)) = v;
    }
    return m;
}

// Per-axis list; a single entry applies to every axis.
template <typename T, typename F>
std::vector<T> parse_per_axis(const std::string& key, const std::string& raw, int dim, F parse_one) {
    const auto items = split_list(raw);
    std::vector<T> out;
    if (items.size() == 1) {
        out.assign(dim, parse_one(key, items[0]));
    } else if (static_cast<int>(items.size()) == dim) {
        for (const auto& it : items) out.push_back(parse_one(key, it));
    } else {
        throw ValidationError(key, "expected 1 or " + std::to_string(dim) + " entries");
    }
    return out;
}

struct Reader {
    const ScenarioConfig& cfg;
    std::string section;

    std::string key(const std::string& k) const { return section + "." + k; }
    bool has(const std::string& k) const { return cfg.has(section, k); }
    std::string str(const std::string& k, const std::string& fallback) const {
        return trim(cfg.get_or(section, k, fallback));
    }
    const std::string& required(const std::string& k) const {
        if (!has(k)) throw ValidationError(key(k), "required key missing");
        return cfg.get(section, k);
    }
    double real(const std::string& k, double fallback) const {
        return has(k) ? parse_real(key(k), cfg.get(section, k)) : fallback;
    }
    Index integer(const std::string& k, Index fallback) const {
        return has(k) ? parse_int(key(k), cfg.get(section, k)) : fallback;
    }
    Vector vector(const std::string& k) const { return parse_vector(key(k), required(k)); }
};

Domain read_domain(const ScenarioConfig& cfg, const std::string& section) {
    Reader r{cfg, section};
    const Vector lower = r.vector("lower");
    const Vector upper = r.vector("upper");
    const int dim = static_cast<int>(r.integer("dimension", lower.size()));
    if (dim <= 0) throw ValidationError(r.key("dimension"), "dimension must be positive");
    if (lower.size() != dim) throw ValidationError(r.key("lower"), "size does not match dimension");
    if (upper.size() != dim) throw ValidationError(r.key("upper"), "size does not match dimension");

    const auto per = parse_per_axis<bool>(r.key("periodic"), r.str("periodic", "false"), dim, parse_bool);
    const auto res = parse_per_axis<Index>(r.key("resolution"), r.required("resolution"), dim, parse_int);
    BoolArray periodic(dim);
    IndexVector resolution(dim);
    for (int a = 0; a < dim; ++a) {
        periodic[a] = per[a];
        resolution[a] = res[a];
    }
    const std::string shape = r.str("shape", "box");
    if (shape != "box" && shape != "ball") throw ValidationError(r.key("shape"), "expected box or ball");
    return Domain(lower, upper, periodic, resolution, shape == "ball" ? Shape::ball : Shape::box, section);
}

void write_domain(ScenarioConfig& cfg, const std::string& section, const Domain& d) {
    cfg.set(section, "dimension", std::to_string(d.dim()));
    cfg.set(section, "lower", render_vector(d.lower()));
    cfg.set(section, "upper", render_vector(d.upper()));
    std::string per, res;
    for (int a = 0; a < d.dim(); ++a) {
        if (a) {
            per += ", ";
            res += ", ";
        }
        per += d.periodic()[a] ? "true" : "false";
        res += std::to_string(d.resolution()[a]);
    }
    cfg.set(section, "periodic", per);
    cfg.set(section, "resolution", res);
    cfg.set(section, "shape", d.shape() == Shape::ball ? "ball" : "box");
}

VelocityMeasure read_measure(const ScenarioConfig& cfg, int v_dim) {
    Reader r{cfg, "measure"};
    const MeasureKind kind = measure_kind_from_string(r.str("kind", "atoms"));
    const Index nodes = r.integer("nodes", 64);
    if (kind == MeasureKind::atoms) {
        const auto items = split_list(r.required("atoms"));
        Eigen::MatrixXd pts(v_dim, static_cast<Index>(items.size()));
        Vector w(static_cast<Index>(items.size()));
        for (std::size_t i = 0; i < items.size(); ++i) {
            const auto colon = items[i].rfind(':');
            if (colon == std::string::npos)
                throw ValidationError(r.key("atoms"), "expected '(point):weight', got '" + items[i] + "'");
            const Vector p = parse_vector(r.key("atoms"), items[i].substr(0, colon));
            if (p.size() != v_dim) throw ValidationError(r.key("atoms"), "atom dimension does not match domain_v");
            pts.col(static_cast<Index>(i)) = p;
            w[static_cast<Index>(i)] = parse_real(r.key("atoms"), items[i].substr(colon + 1));
        }
        return VelocityMeasure::atoms(pts, w, r.real("mass", -1.0));
    }
    const double mass = r.real("mass", 1.0);
    if (kind == MeasureKind::uniform_box) {
        const Vector lo = r.vector("lower");
        const Vector hi = r.vector("upper");
        if (lo.size() != v_dim || hi.size() != v_dim)
            throw ValidationError(r.key("lower"), "support dimension does not match domain_v");
        return VelocityMeasure::uniform_box(lo, hi, mass, nodes);
    }
    const Vector center = r.has("center") ? r.vector("center") : Vector::Zero(v_dim);
    if (center.size() != v_dim) throw ValidationError(r.key("center"), "dimension does not match domain_v");
    const double radius = r.real("radius", 1.0);
    if (kind == MeasureKind::uniform_sphere) return VelocityMeasure::uniform_sphere(center, radius, mass, nodes);
    return VelocityMeasure::uniform_ball(center, radius, mass, nodes);
}

void write_measure(ScenarioConfig& cfg, const VelocityMeasure& m) {
    cfg.set("measure", "kind", to_string(m.kind()));
    cfg.set("measure", "mass", format_real(m.mass()));
    switch (m.kind()) {
        case MeasureKind::atoms: {
            std::string s;
            for (Index k = 0; k < m.size(); ++k) {
                if (k) s += ", ";
                s += render_vector(m.node(k)) + ":" + format_real(m.weights()[k]);
            }
            cfg.set("measure", "atoms", s);
            break;
        }
        case MeasureKind::uniform_box:
            cfg.set("measure", "lower", render_vector(m.box_lower()));
            cfg.set("measure", "upper", render_vector(m.box_upper()));
            cfg.set("measure", "nodes", std::to_string(m.requested_count()));
            break;
        case MeasureKind::uniform_sphere:
        case MeasureKind::uniform_ball:
            cfg.set("measure", "center", render_vector(m.center()));
            cfg.set("measure", "radius", format_real(m.radius()));
            cfg.set("measure", "nodes", std::to_string(m.requested_count()));
            break;
    }
}

DriftField read_drift(const ScenarioConfig& cfg, int x_dim, int v_dim) {
    Reader r{cfg, "drift"};
    const DriftKind kind = drift_kind_from_string(r.str("kind", "velocity"));
    DriftField f;
    switch (kind) {
        case DriftKind::velocity:
            if (v_dim != x_dim)
                throw ValidationError(r.key("kind"), "velocity drift needs equal x and v dimensions");
            f = DriftField::velocity(x_dim);
            break;
        case DriftKind::constant: {
            const Vector c = r.vector("vector");
            if (c.size() != x_dim) throw ValidationError(r.key("vector"), "dimension does not match domain_x");
            f = DriftField::constant(c);
            break;
        }
        case DriftKind::control: f = DriftField::control(x_dim); break;
        case DriftKind::affine: {
            const Eigen::MatrixXd rows = parse_vector_list(r.key("matrix"), r.required("matrix"), v_dim);
            if (rows.cols() != x_dim) throw ValidationError(r.key("matrix"), "expected one row per x axis");
            const Vector c = r.has("vector") ? r.vector("vector") : Vector::Zero(x_dim);
            if (c.size() != x_dim) throw ValidationError(r.key("vector"), "dimension does not match domain_x");
            f = DriftField::affine(rows.transpose(), c);
            break;
        }
    }
    const ControlSetKind controls = control_set_kind_from_string(r.str("controls", "none"));
    if (controls == ControlSetKind::sphere) {
        const Index k = r.integer("control_count", 0);
        if (k < 0) throw ValidationError(r.key("control_count"), "must be nonnegative");
        f.with_sphere_controls(k);
    } else if (controls == ControlSetKind::list) {
        f.with_controls(parse_vector_list(r.key("control_list"), r.required("control_list"), x_dim));
    }
    if (kind == DriftKind::control && f.control_count() == 0)
        throw ValidationError(r.key("controls"), "control drift needs a nonempty control set");
    return f;
}

void write_drift(ScenarioConfig& cfg, const DriftField& f) {
    cfg.set("drift", "kind", to_string(f.kind()));
    if (f.kind() == DriftKind::constant || f.kind() == DriftKind::affine)
        cfg.set("drift", "vector", render_vector(f.offset()));
    if (f.kind() == DriftKind::affine) {
        std::string s;
        for (Index i = 0; i < f.matrix().rows(); ++i) {
            if (i) s += ", ";
            s += render_vector(f.matrix().row(i).transpose());
        }
        cfg.set("drift", "matrix", s);
    }
    cfg.set("drift", "controls", to_string(f.control_set()));
    if (f.control_set() == ControlSetKind::sphere)
        cfg.set("drift", "control_count", std::to_string(f.requested_sphere_count()));
    if (f.control_set() == ControlSetKind::list) {
        std::string s;
        for (Index k = 0; k < f.control_count(); ++k) {
            if (k) s += ", ";
            s += render_vector(f.controls().col(k));
        }
        cfg.set("drift", "control_list", s);
    }
}

FieldSpec read_field(const Reader& r, const std::string& k, int x_dim, int v_dim) {
    FieldSpec f;
    try {
        f = FieldSpec::parse(r.str(k, "const:0"));
    } catch (const ValidationError& e) {
        throw ValidationError(r.key(k), e.what());
    }
    if (f.kind() == FieldSpec::Kind::table) throw ValidationError(r.key(k), "scenario fields must be expressions");
    if (f.max_x_axis() >= x_dim || f.max_v_axis() >= v_dim)
        throw ValidationError(r.key(k), "references an axis beyond the domain dimension");
    return f;
}

}  // namespace

ScenarioConfig ScenarioConfig::parse(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError(where, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!kSchema.count(section)) throw ValidationError(section, "unknown section");
            cfg.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError(where, "expected 'key = value'");
        if (section.empty()) throw ValidationError(where, "entry outside of a section");
        const std::string key = trim(line.substr(0, eq));
        if (!kSchema.at(section).count(key)) throw ValidationError(section + "." + key, "unknown key");
        cfg.sections_[section][key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("", "cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ScenarioConfig::render() const {
    std::string out;
    for (const char* name : kSectionOrder) {
        const auto it = sections_.find(name);
        if (it == sections_.end()) continue;
        if (!out.empty()) out += '\n';
        out += "[" + it->first + "]\n";
        for (const auto& [k, v] : it->second) out += k + " = " + v + "\n";
    }
    return out;
}

bool ScenarioConfig::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

const std::string& ScenarioConfig::get(const std::string& section, const std::string& key) const {
    if (!has(section, key)) throw ValidationError(section + "." + key, "required key missing");
    return sections_.at(section).at(key);
}

std::string ScenarioConfig::get_or(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
    return has(section, key) ? sections_.at(section).at(key) : fallback;
}

void ScenarioConfig::set(const std::string& section, const std::string& key, std::string value) {
    if (!kSchema.count(section) || !kSchema.at(section).count(key))
        throw ValidationError(section + "." + key, "unknown key");
    sections_[section][key] = std::move(value);
}

void ScenarioConfig::erase(const std::string& section, const std::string& key) {
    const auto it = sections_.find(section);
    if (it != sections_.end()) it->second.erase(key);
}

Scenario build_scenario(const ScenarioConfig& cfg) {
    Scenario s;
    s.x_domain = read_domain(cfg, "domain_x");
    s.v_domain = read_domain(cfg, "domain_v");
    const int x_dim = s.x_domain.dim();
    const int v_dim = s.v_domain.dim();

    Reader eq{cfg, "equation"};
    s.lambda = eq.real("lambda", 0.0);
    if (!(s.lambda >= 0.0) || !std::isfinite(s.lambda)) throw ValidationError(eq.key("lambda"), "lambda must be >= 0");
    s.gamma = eq.real("gamma", 0.0);
    if (!std::isfinite(s.gamma)) throw ValidationError(eq.key("gamma"), "gamma must be finite");
    s.holder = eq.real("holder", 1.0);
    if (!(s.holder > 0.0 && s.holder <= 1.0)) throw ValidationError(eq.key("holder"), "exponent must lie in (0, 1]");
    const std::string mode = eq.str("mode", "sup");
    if (mode != "sup" && mode != "inf") throw ValidationError(eq.key("mode"), "expected sup or inf");
    s.mode = mode == "sup" ? OptimizationMode::sup : OptimizationMode::inf;
    const std::string nonlocal = eq.str("nonlocal", "jump");
    if (nonlocal != "jump" && nonlocal != "levy") throw ValidationError(eq.key("nonlocal"), "expected jump or levy");
    s.nonlocal = nonlocal == "jump" ? NonlocalKind::jump : NonlocalKind::levy;
    s.g = read_field(eq, "g", x_dim, v_dim);
    s.psi = read_field(eq, "psi", x_dim, v_dim);

    s.measure = read_measure(cfg, v_dim);
    if (s.nonlocal == NonlocalKind::jump) {
        for (Index k = 0; k < s.measure.size(); ++k) {
            if (!s.v_domain.contains(s.measure.node(k), 1e-12))
                throw ValidationError(s.measure.kind() == MeasureKind::atoms ? "measure.atoms" : "measure.nodes",
                                      "node " + std::to_string(k) + " lies outside V");
        }
    }
    s.drift = read_drift(cfg, x_dim, v_dim);

    Reader lay{cfg, "domain_v"};
    const std::string layout = lay.str("layout", s.nonlocal == NonlocalKind::levy ? "tensor" : "measure");
    if (layout != "measure" && layout != "tensor") throw ValidationError(lay.key("layout"), "expected measure or tensor");
    s.v_layout = layout == "measure" ? VelocityLayout::measure : VelocityLayout::tensor;
    if (s.nonlocal == NonlocalKind::levy && s.v_layout != VelocityLayout::tensor)
        throw ValidationError(lay.key("layout"), "levy increments need the tensor layout");

    Reader sol{cfg, "solver"};
    s.solver.max_iterations = sol.integer("max_iterations", s.solver.max_iterations);
    if (s.solver.max_iterations <= 0) throw ValidationError(sol.key("max_iterations"), "must be positive");
    s.solver.tolerance = sol.real("tolerance", s.solver.tolerance);
    if (!(s.solver.tolerance > 0.0)) throw ValidationError(sol.key("tolerance"), "must be positive");
    const std::string sweep = sol.str("sweep", "gauss-seidel");
    if (sweep != "jacobi" && sweep != "gauss-seidel") throw ValidationError(sol.key("sweep"), "expected jacobi or gauss-seidel");
    s.solver.sweep = sweep == "jacobi" ? SweepOrder::jacobi : SweepOrder::gauss_seidel;
    s.solver.time_step = sol.real("dt", 0.0);
    if (!(s.solver.time_step >= 0.0)) throw ValidationError(sol.key("dt"), "must be >= 0");
    s.solver.threads = static_cast<int>(sol.integer("threads", 1));
    if (s.solver.threads < 1) throw ValidationError(sol.key("threads"), "must be >= 1");
    s.reach.horizon = sol.real("reach_horizon", 0.0);
    if (!(s.reach.horizon >= 0.0)) throw ValidationError(sol.key("reach_horizon"), "must be >= 0");
    s.reach.k_limit = sol.integer("reach_k_limit", 0);
    if (s.reach.k_limit < 0) throw ValidationError(sol.key("reach_k_limit"), "must be >= 0");

    try {
        s.grid = std::make_shared<const PhaseGrid>(s.x_domain, s.v_domain, s.v_layout, s.measure, s.nonlocal);
    } catch (const GridError& e) {
        throw ValidationError("measure", e.what());
    }
    return s;
}

Scenario load_scenario(const std::string& path) { return build_scenario(ScenarioConfig::load(path)); }

ScenarioConfig to_config(const Scenario& s) {
    ScenarioConfig cfg;
    write_domain(cfg, "domain_x", s.x_domain);
    write_domain(cfg, "domain_v", s.v_domain);
    cfg.set("domain_v", "layout", to_string(s.v_layout));
    write_measure(cfg, s.measure);
    write_drift(cfg, s.drift);
    cfg.set("equation", "lambda", format_real(s.lambda));
    cfg.set("equation", "gamma", format_real(s.gamma));
    cfg.set("equation", "holder", format_real(s.holder));
    cfg.set("equation", "mode", to_string(s.mode));
    cfg.set("equation", "nonlocal", to_string(s.nonlocal));
    cfg.set("equation", "g", s.g.text());
    cfg.set("equation", "psi", s.psi.text());
    cfg.set("solver", "max_iterations", std::to_string(s.solver.max_iterations));
    cfg.set("solver", "tolerance", format_real(s.solver.tolerance));
    cfg.set("solver", "sweep", to_string(s.solver.sweep));
    cfg.set("solver", "dt", format_real(s.solver.time_step));
    cfg.set("solver", "threads", std::to_string(s.solver.threads));
    cfg.set("solver", "reach_horizon", format_real(s.reach.horizon));
    cfg.set("solver", "reach_k_limit", std::to_string(s.reach.k_limit));
    return cfg;
}

}  // namespace rtsmp
