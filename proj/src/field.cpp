#include "rtsmp/field.hpp"

#include "rtsmp/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rtsmp {

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

FieldSpec::FieldSpec(double value) : kind_(Kind::constant), value_(value) {}

FieldSpec FieldSpec::parse(const std::string& raw) {
    std::string text = raw;
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.erase(text.begin());
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
    if (text.empty()) throw ValidationError("", "empty field specification");

    FieldSpec f;
    if (text.rfind("const:", 0) == 0) {
        const std::string num = text.substr(6);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
        if (ec != std::errc() || ptr != num.data() + num.size() || !std::isfinite(v))
            throw ValidationError("", "bad constant field '" + text + "'");
        f.kind_ = Kind::constant;
        f.value_ = v;
        return f;
    }
    if (text.rfind("table:", 0) == 0) {
        f.kind_ = Kind::table;
        f.path_ = text.substr(6);
        if (f.path_.empty()) throw ValidationError("", "table field needs a path");
        return f;
    }
    if (text.rfind("expr:", 0) == 0) text = text.substr(5);
    f.kind_ = Kind::expression;
    f.expr_.emplace(text);
    return f;
}

std::string FieldSpec::text() const {
    switch (kind_) {
        case Kind::constant: return "const:" + format_real(value_);
        case Kind::expression: return "expr:" + expr_->text();
        case Kind::table: return "table:" + path_;
    }
    return {};
}

double FieldSpec::evaluate(const Vector& x, const Vector& v) const {
    switch (kind_) {
        case Kind::constant: return value_;
        case Kind::expression: return (*expr_)(x, v);
        case Kind::table: break;
    }
    throw ValidationError("", "table field '" + path_ + "' cannot be evaluated off the grid");
}

GridFunction grid_sample(const FieldSpec& spec, std::shared_ptr<const PhaseGrid> grid) {
    if (spec.kind() == FieldSpec::Kind::table) return read_field_csv(spec.text().substr(6), std::move(grid));
    if (spec.max_x_axis() >= grid->x_dim() || spec.max_v_axis() >= grid->v_dim())
        throw ValidationError("", "field '" + spec.text() + "' references an axis beyond the grid dimension");
    GridFunction u(grid);
    for (Index ix = 0; ix < grid->x_count(); ++ix) {
        const Vector x = grid->x_point(ix);
        for (Index iv = 0; iv < grid->v_count(); ++iv) {
            const double val = spec.evaluate(x, grid->v_point(iv));
            if (!std::isfinite(val))
                throw ValidationError("", "field '" + spec.text() + "' is not finite at node (x " +
                                              std::to_string(ix) + ", v " + std::to_string(iv) + ")");
            u(ix, iv) = val;
        }
    }
    return u;
}

void write_field_csv(std::ostream& out, const GridFunction& u, const GridFunction* residual,
                     const std::string& value_name) {
    const PhaseGrid& g = u.grid();
    for (int a = 0; a < g.x_dim(); ++a) out << "x_" << a << ',';
    for (int a = 0; a < g.v_dim(); ++a) out << "v_" << a << ',';
    out << value_name;
    if (residual) out << ",residual";
    out << '\n';
    for (Index ix = 0; ix < g.x_count(); ++ix) {
        const Vector x = g.x_point(ix);
        for (Index iv = 0; iv < g.v_count(); ++iv) {
            for (int a = 0; a < g.x_dim(); ++a) out << format_real(x[a]) << ',';
            for (int a = 0; a < g.v_dim(); ++a) out << format_real(g.v_points()(a, iv)) << ',';
            out << format_real(u(ix, iv));
            if (residual) out << ',' << format_real((*residual)(ix, iv));
            out << '\n';
        }
    }
}

void write_field_csv(const std::string& path, const GridFunction& u, const GridFunction* residual,
                     const std::string& value_name) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_field_csv(out, u, residual, value_name);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    return parts;
}

double to_real(const std::string& s, const std::string& where) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc()) throw ValidationError("", where + ": bad number '" + s + "'");
    return v;
}

}  // namespace

GridFunction read_field_csv(const std::string& path, std::shared_ptr<const PhaseGrid> grid) {
    std::ifstream in(path);
    if (!in) throw ValidationError("", "cannot open field table '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("", path + ": empty table");
    const auto header = split(line, ',');
    const int nx = grid->x_dim();
    const int nv = grid->v_dim();
    Index u_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "u") u_col = static_cast<Index>(c);
    }
    if (u_col < 0) throw ValidationError("", path + ": no 'u' column");
    if (u_col < nx + nv) throw ValidationError("", path + ": coordinate columns do not match the grid dimension");

    GridFunction u(grid);
    Index row = 0;
    const double tol = 1e-9 * std::max(grid->x_domain().diameter(), 1.0);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= grid->size()) throw ValidationError("", path + ": more rows than grid nodes");
        const auto cells = split(line, ',');
        if (static_cast<Index>(cells.size()) <= u_col) throw ValidationError("", path + ": short row");
        const Index ix = row / grid->v_count();
        const Index iv = row % grid->v_count();
        const Vector x = grid->x_point(ix);
        for (int a = 0; a < nx; ++a) {
            if (std::abs(to_real(cells[a], path) - x[a]) > tol)
                throw ValidationError("", path + ": row " + std::to_string(row) + " x-coordinate mismatch");
        }
        for (int a = 0; a < nv; ++a) {
            if (std::abs(to_real(cells[nx + a], path) - grid->v_points()(a, iv)) > tol)
                throw ValidationError("", path + ": row " + std::to_string(row) + " v-coordinate mismatch");
        }
        u(ix, iv) = to_real(cells[u_col], path);
        if (!std::isfinite(u(ix, iv)))
            throw ValidationError("", path + ": non-finite value at row " + std::to_string(row));
        ++row;
    }
    if (row != grid->size()) throw ValidationError("", path + ": fewer rows than grid nodes");
    return u;
}

}  // namespace rtsmp
