#pragma once

#include "rtsmp/domain.hpp"

#include <string>

namespace rtsmp {

enum class MeasureKind { atoms, uniform_box, uniform_sphere, uniform_ball };

std::string to_string(MeasureKind kind);
MeasureKind measure_kind_from_string(const std::string& s);  // throws ValidationError("measure.kind")

/// Positive bounded measure on velocity space, stored as weighted nodes.
///
/// Atomic measures keep their atoms exactly. Continuous kinds are replaced by
/// equal-weight quadrature at construction: Fibonacci lattice on the sphere
/// (equally spaced angles on a circle, {c - r, c + r} in 1D), cell-midpoint
/// lattice on a box, and equal-volume shells times symmetric directions on a ball.
class VelocityMeasure {
  public:
    VelocityMeasure() = default;

    /// `points` is dim x count. Throws ValidationError("measure.atoms") on a
    /// non-positive weight, or ("measure.mass") when `declared_mass` is given
    /// and disagrees with the weight sum beyond 1e-12 relative error.
    static VelocityMeasure atoms(Eigen::MatrixXd points, Vector weights, double declared_mass = -1.0);
    /// Node count is matched per axis: ceil(count^(1/dim)) midpoints.
    static VelocityMeasure uniform_box(Vector lower, Vector upper, double mass, Index count);
    static VelocityMeasure uniform_sphere(Vector center, double radius, double mass, Index count);
    /// round(sqrt(count)/2) equal-volume shells, each carrying an even,
    /// centrally symmetric direction set.
    static VelocityMeasure uniform_ball(Vector center, double radius, double mass, Index count);

    MeasureKind kind() const { return kind_; }
    int dim() const { return static_cast<int>(nodes_.rows()); }
    Index size() const { return nodes_.cols(); }
    const Eigen::MatrixXd& nodes() const { return nodes_; }
    auto node(Index k) const { return nodes_.col(k); }
    const Vector& weights() const { return weights_; }
    double mass() const { return mass_; }
    /// Requested quadrature count (continuous kinds).
    Index requested_count() const { return requested_; }

    // Support descriptor.
    const Vector& box_lower() const { return lower_; }
    const Vector& box_upper() const { return upper_; }
    const Vector& center() const { return center_; }
    double radius() const { return radius_; }

    /// Closed geometric support membership. For atoms, the point must be
    /// within `slack` of an atom; for the sphere, within `slack` of the surface.
    bool support_contains(const Vector& p, double slack = 1e-12) const;

  private:
    MeasureKind kind_ = MeasureKind::atoms;
    Eigen::MatrixXd nodes_;
    Vector weights_;
    double mass_ = 0.0;
    Index requested_ = 0;
    Vector lower_, upper_, center_;
    double radius_ = 0.0;
};

}  // namespace rtsmp
