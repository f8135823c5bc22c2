#pragma once

#include "rtsmp/domain.hpp"

#include <string>

namespace rtsmp {

enum class DriftKind { velocity, constant, control, affine };
enum class ControlSetKind { none, list, sphere };

std::string to_string(DriftKind kind);
std::string to_string(ControlSetKind kind);
DriftKind drift_kind_from_string(const std::string& s);            // ValidationError("drift.kind")
ControlSetKind control_set_kind_from_string(const std::string& s);  // ValidationError("drift.controls")

/// Default number of directions used for the unit-sphere control set:
/// 2 in 1D, 16 in 2D, and 16 * 4^(N-2) above.
Index default_sphere_control_count(int dim);

/// Drift b(x, v, alpha) of the controlled characteristics. None of the kinds
/// depends on x, so each (v, alpha) pair moves along a straight line.
///
///   velocity  b = v
///   constant  b = c
///   control   b = alpha
///   affine    b = A v + c
///
/// The control set is discretized at construction; an empty set means the
/// optimization over controls degenerates to the single drift term.
class DriftField {
  public:
    DriftField() = default;

    static DriftField velocity(int dim);
    static DriftField constant(Vector c);
    static DriftField affine(Eigen::MatrixXd a, Vector c);
    static DriftField control(int dim);

    /// Unit sphere plus the zero control; `count` directions (0 = default).
    DriftField& with_sphere_controls(Index count = 0);
    /// Explicit controls, one per column.
    DriftField& with_controls(Eigen::MatrixXd controls);

    DriftKind kind() const { return kind_; }
    int dim() const { return dim_; }
    ControlSetKind control_set() const { return control_set_; }
    /// Discretized controls, dim x count (count 0 for the empty set).
    const Eigen::MatrixXd& controls() const { return controls_; }
    Index control_count() const { return controls_.cols(); }
    /// Number of terms the Hamiltonian optimizes over (1 for the empty set).
    Index term_count() const { return std::max<Index>(1, controls_.cols()); }
    const Eigen::MatrixXd& matrix() const { return a_; }
    const Vector& offset() const { return c_; }
    double lipschitz() const { return lipschitz_; }
    Index requested_sphere_count() const { return sphere_count_; }

    /// b(x, v, alpha_k) for control index k in [0, term_count()).
    Vector evaluate(const Vector& x, const Vector& v, Index k) const;
    /// b(x, v, alpha) for an arbitrary control value.
    Vector evaluate_with(const Vector& x, const Vector& v, const Vector& alpha) const;

  private:
    DriftKind kind_ = DriftKind::velocity;
    int dim_ = 0;
    ControlSetKind control_set_ = ControlSetKind::none;
    Eigen::MatrixXd controls_;
    Eigen::MatrixXd a_;
    Vector c_;
    double lipschitz_ = 0.0;
    Index sphere_count_ = 0;
};

}  // namespace rtsmp
