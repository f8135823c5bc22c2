#pragma once

#include "rtsmp/expression.hpp"
#include "rtsmp/grid.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace rtsmp {

/// Source of a scalar field on Omega x V.
///
///   "const:1.5"          constant
///   "expr:sin(2*pi*x)"   expression (the "expr:" prefix is optional)
///   "table:field.csv"    values read from a field CSV on the same grid
class FieldSpec {
  public:
    enum class Kind { constant, expression, table };

    FieldSpec() : FieldSpec(0.0) {}
    explicit FieldSpec(double value);
    /// Throws ValidationError on malformed input.
    static FieldSpec parse(const std::string& text);

    Kind kind() const { return kind_; }
    /// Canonical text; `parse(text())` reproduces the spec.
    std::string text() const;
    /// Pointwise value; tables throw ValidationError.
    double evaluate(const Vector& x, const Vector& v) const;
    /// Highest referenced x / v axis (-1 when none).
    int max_x_axis() const { return expr_ ? expr_->max_x_axis() : -1; }
    int max_v_axis() const { return expr_ ? expr_->max_v_axis() : -1; }

  private:
    Kind kind_ = Kind::constant;
    double value_ = 0.0;
    std::optional<Expression> expr_;
    std::string path_;
};

/// Pointwise evaluation on the tensor grid. Throws ValidationError naming the
/// (x, v) node index at the first non-finite value.
GridFunction grid_sample(const FieldSpec& spec, std::shared_ptr<const PhaseGrid> grid);

/// Field CSV: header x_0..x_{N-1}, v_0..v_{M-1}, <columns...>; rows in
/// lexicographic (x-index, v-index) order; 17 significant digits.
void write_field_csv(std::ostream& out, const GridFunction& u, const GridFunction* residual = nullptr,
                     const std::string& value_name = "u");
void write_field_csv(const std::string& path, const GridFunction& u, const GridFunction* residual = nullptr,
                     const std::string& value_name = "u");
/// Reads the `u` column of a field CSV written on the same grid. Throws
/// ValidationError on shape or coordinate mismatch.
GridFunction read_field_csv(const std::string& path, std::shared_ptr<const PhaseGrid> grid);

/// "%.17g" rendering shared by every text output.
std::string format_real(double value);

}  // namespace rtsmp
