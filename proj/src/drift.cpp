#include "rtsmp/drift.hpp"

#include "rtsmp/errors.hpp"

#include <cmath>
#include <numbers>

namespace rtsmp {

std::string to_string(DriftKind kind) {
    switch (kind) {
        case DriftKind::velocity: return "velocity";
        case DriftKind::constant: return "constant";
        case DriftKind::control: return "control";
        case DriftKind::affine: return "affine";
    }
    return "velocity";
}

std::string to_string(ControlSetKind kind) {
    switch (kind) {
        case ControlSetKind::none: return "none";
        case ControlSetKind::list: return "list";
        case ControlSetKind::sphere: return "sphere";
    }
    return "none";
}

DriftKind drift_kind_from_string(const std::string& s) {
    if (s == "velocity") return DriftKind::velocity;
    if (s == "constant") return DriftKind::constant;
    if (s == "control") return DriftKind::control;
    if (s == "affine") return DriftKind::affine;
    throw ValidationError("drift.kind", "unknown drift kind '" + s + "'");
}

ControlSetKind control_set_kind_from_string(const std::string& s) {
    if (s == "none") return ControlSetKind::none;
    if (s == "list") return ControlSetKind::list;
    if (s == "sphere") return ControlSetKind::sphere;
    throw ValidationError("drift.controls", "unknown control set '" + s + "'");
}

Index default_sphere_control_count(int dim) {
    if (dim <= 1) return 2;
    Index k = 16;
    for (int d = 2; d < dim; ++d) k *= 4;
    return k;
}

DriftField DriftField::velocity(int dim) {
    DriftField f;
    f.kind_ = DriftKind::velocity;
    f.dim_ = dim;
    f.lipschitz_ = 1.0;
    return f;
}

DriftField DriftField::constant(Vector c) {
    DriftField f;
    f.kind_ = DriftKind::constant;
    f.dim_ = static_cast<int>(c.size());
    f.c_ = std::move(c);
    f.lipschitz_ = 0.0;
    return f;
}

DriftField DriftField::affine(Eigen::MatrixXd a, Vector c) {
    if (a.rows() != c.size()) throw ValidationError("drift.matrix", "matrix rows must match offset size");
    DriftField f;
    f.kind_ = DriftKind::affine;
    f.dim_ = static_cast<int>(c.size());
    // Operator 2-norm.
    f.lipschitz_ = a.size() == 0 ? 0.0 : Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
    f.a_ = std::move(a);
    f.c_ = std::move(c);
    return f;
}

DriftField DriftField::control(int dim) {
    DriftField f;
    f.kind_ = DriftKind::control;
    f.dim_ = dim;
    f.lipschitz_ = 0.0;
    return f;
}

DriftField& DriftField::with_sphere_controls(Index count) {
    if (count <= 0) count = default_sphere_control_count(dim_);
    sphere_count_ = count;
    control_set_ = ControlSetKind::sphere;
    controls_.resize(dim_, count + 1);
    if (dim_ == 1) {
        // S^0 = {-1, +1}; extra requested directions would only repeat them.
        controls_.resize(1, 3);
        controls_ << -1.0, 1.0, 0.0;
        return *this;
    }
    if (dim_ == 2) {
        for (Index i = 0; i < count; ++i) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
            controls_(0, i) = std::cos(a);
            controls_(1, i) = std::sin(a);
        }
    } else {
        // Fibonacci points on S^{N-1} through the first three axes.
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (Index i = 0; i < count; ++i) {
            Vector d = Vector::Zero(dim_);
            const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            d[0] = r * std::cos(golden * static_cast<double>(i));
            d[1] = r * std::sin(golden * static_cast<double>(i));
            d[2] = z;
            controls_.col(i) = d;
        }
    }
    controls_.col(count).setZero();
    return *this;
}

DriftField& DriftField::with_controls(Eigen::MatrixXd controls) {
    if (controls.cols() > 0 && controls.rows() != dim_)
        throw ValidationError("drift.control_list", "control dimension must match the drift dimension");
    control_set_ = controls.cols() == 0 ? ControlSetKind::none : ControlSetKind::list;
    controls_ = std::move(controls);
    return *this;
}

Vector DriftField::evaluate_with(const Vector& /*x*/, const Vector& v, const Vector& alpha) const {
    switch (kind_) {
        case DriftKind::velocity: return v;
        case DriftKind::constant: return c_;
        case DriftKind::control: return alpha;
        case DriftKind::affine: return a_ * v + c_;
    }
    return v;
}

Vector DriftField::evaluate(const Vector& x, const Vector& v, Index k) const {
    if (controls_.cols() == 0) {
        if (kind_ == DriftKind::control) return Vector::Zero(dim_);
        return evaluate_with(x, v, Vector());
    }
    return evaluate_with(x, v, controls_.col(k));
}

}  // namespace rtsmp
