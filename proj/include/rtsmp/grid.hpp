#pragma once

#include "rtsmp/domain.hpp"
#include "rtsmp/measure.hpp"

#include <memory>
#include <string>
#include <vector>

namespace rtsmp {

/// How velocity space is sampled.
///   measure: the velocity nodes are exactly the measure's atoms / quadrature nodes.
///   tensor:  a tensor grid over the velocity box; measure nodes are reached by
///            multilinear interpolation.
enum class VelocityLayout { measure, tensor };
/// Velocity-jump redistribution, or shift-form (Levy-type) increments.
enum class NonlocalKind { jump, levy };

std::string to_string(VelocityLayout layout);
std::string to_string(NonlocalKind kind);

struct StencilEntry {
    Index v;
    double weight;
};
/// Convex combination of velocity nodes.
using Stencil = std::vector<StencilEntry>;

struct Node {
    Index ix;
    Index iv;
};

/// Multilinear interpolation weights at p; non-periodic axes clamp to the hull,
/// periodic axes wrap.
Stencil multilinear_stencil(const Domain& d, const Vector& p);

/// Phase-space grid Omega_h x V_h. Immutable once built.
class PhaseGrid {
  public:
    /// Throws GridError when a measure node falls outside the velocity grid
    /// hull (jump kind, tensor layout).
    PhaseGrid(Domain x, Domain v, VelocityLayout layout, const VelocityMeasure& measure, NonlocalKind nonlocal);

    const Domain& x_domain() const { return x_; }
    const Domain& v_domain() const { return v_; }
    VelocityLayout layout() const { return layout_; }
    NonlocalKind nonlocal() const { return nonlocal_; }

    Index x_count() const { return x_.node_count(); }
    Index v_count() const { return v_points_.cols(); }
    Index size() const { return x_count() * v_count(); }
    int x_dim() const { return x_.dim(); }
    int v_dim() const { return static_cast<int>(v_points_.rows()); }

    Vector x_point(Index ix) const { return x_.point(ix); }
    Vector v_point(Index iv) const { return v_points_.col(iv); }
    const Eigen::MatrixXd& v_points() const { return v_points_; }

    /// Velocity node lies in supp(dq).
    bool is_v0(Index iv) const { return v0_[iv]; }
    Index v0_count() const;

    /// Interpolation stencil of each measure node (weights of the measure
    /// are not folded in).
    const std::vector<Stencil>& measure_stencils() const { return measure_stencils_; }
    /// Stencil for v_iv + w_k with constant extension past the hull (levy kind only).
    const Stencil& levy_stencil(Index iv, Index k) const { return levy_stencils_[iv * measure_weights_.size() + k]; }
    const Vector& measure_weights() const { return measure_weights_; }
    double measure_mass() const { return mass_; }

    /// Multilinear interpolation weights at an arbitrary velocity (tensor
    /// layout). Non-periodic axes clamp to the hull.
    Stencil interpolate_v(const Vector& p) const;

  private:
    Domain x_;
    Domain v_;
    VelocityLayout layout_;
    NonlocalKind nonlocal_;
    Eigen::MatrixXd v_points_;
    std::vector<bool> v0_;
    std::vector<Stencil> measure_stencils_;
    std::vector<Stencil> levy_stencils_;
    Vector measure_weights_;
    double mass_ = 0.0;
};

/// Real values on the phase grid, x-major: row = x node, column = v node.
class GridFunction {
  public:
    using Values = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    GridFunction() = default;
    explicit GridFunction(std::shared_ptr<const PhaseGrid> grid, double fill = 0.0);
    GridFunction(std::shared_ptr<const PhaseGrid> grid, Values values);

    const PhaseGrid& grid() const { return *grid_; }
    const std::shared_ptr<const PhaseGrid>& grid_ptr() const { return grid_; }

    double operator()(Index ix, Index iv) const { return values_(ix, iv); }
    double& operator()(Index ix, Index iv) { return values_(ix, iv); }
    const Values& values() const { return values_; }
    Values& values() { return values_; }

    Index x_count() const { return values_.rows(); }
    Index v_count() const { return values_.cols(); }

    bool same_grid(const GridFunction& other) const;
    bool all_finite() const { return values_.allFinite(); }

  private:
    std::shared_ptr<const PhaseGrid> grid_;
    Values values_;
};

/// Apply a stencil to a row of values.
template <typename Row>
double apply(const Stencil& s, const Row& row) {
    double acc = 0.0;
    for (const auto& e : s) acc += e.weight * row(e.v);
    return acc;
}

}  // namespace rtsmp
