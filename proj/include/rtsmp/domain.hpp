#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace rtsmp {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using IndexVector = Eigen::Matrix<Index, Eigen::Dynamic, 1>;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

enum class Shape { box, ball };

/// Tensor-product grid over an axis-aligned box, optionally restricted to the
/// inscribed ball. Periodic axes identify their two faces: n nodes at spacing
/// (upper - lower) / n. Other axes carry n nodes including both faces.
///
/// Flat node indices are lexicographic in the multi-index, last axis fastest.
class Domain {
  public:
    Domain() = default;
    /// Throws ValidationError naming `key_prefix + ".<field>"` when lower >= upper
    /// on some axis, a resolution is below 2, or the sizes disagree.
    Domain(Vector lower, Vector upper, BoolArray periodic, IndexVector resolution,
           Shape shape = Shape::box, const std::string& key_prefix = "domain");

    int dim() const { return static_cast<int>(lower_.size()); }
    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }
    const BoolArray& periodic() const { return periodic_; }
    const IndexVector& resolution() const { return resolution_; }
    Shape shape() const { return shape_; }
    bool fully_periodic() const { return periodic_.size() > 0 && periodic_.all(); }

    double spacing(int axis) const;
    Vector spacings() const;
    double min_spacing() const { return spacings().minCoeff(); }
    /// Half the diagonal of one grid cell.
    double capture_radius() const { return 0.5 * spacings().norm(); }

    Index node_count() const { return count_; }
    Index stride(int axis) const { return strides_[axis]; }
    double coord(int axis, Index i) const { return lower_[axis] + static_cast<double>(i) * spacing(axis); }

    IndexVector unravel(Index flat) const;
    Index ravel(const IndexVector& multi) const;
    Vector point(Index flat) const;

    /// Neighbor of `flat` shifted by `step` along `axis`, wrapping periodic
    /// axes. Returns -1 when the shift leaves a non-periodic axis.
    Index neighbor(Index flat, int axis, Index step) const;

    /// Node lies in the closed domain (always true for box shape).
    bool is_active(Index flat) const { return active_[flat]; }
    /// Node lies strictly inside: not on a non-periodic face and, for the
    /// ball shape, strictly inside the ball.
    bool is_interior(Index flat) const { return interior_[flat]; }
    Index active_count() const { return active_count_; }

    Vector ball_center() const { return 0.5 * (lower_ + upper_); }
    double ball_radius() const;

    /// Closed-domain membership for a continuous point (periodic axes always pass).
    bool contains(const Vector& p, double slack = 1e-12) const;
    /// Time at which p + t*dir leaves the closed domain; +inf if never.
    double exit_time(const Vector& p, const Vector& dir) const;
    /// Maps periodic coordinates into [lower, upper).
    Vector wrap(const Vector& p) const;
    /// b - a, reduced to the minimal image on periodic axes.
    Vector displacement(const Vector& a, const Vector& b) const;
    double diameter() const { return (upper_ - lower_).norm(); }

    /// Node nearest to p (after wrapping), restricted to active nodes.
    Index nearest_node(const Vector& p) const;

    bool operator==(const Domain& other) const;

  private:
    void validate(const std::string& key_prefix) const;
    void index();

    Vector lower_;
    Vector upper_;
    BoolArray periodic_;
    IndexVector resolution_;
    Shape shape_ = Shape::box;
    Index count_ = 0;
    Index active_count_ = 0;
    std::vector<Index> strides_;
    std::vector<bool> active_;
    std::vector<bool> interior_;
};

}  // namespace rtsmp
