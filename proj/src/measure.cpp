#include "rtsmp/measure.hpp"

#include "rtsmp/errors.hpp"

#include <cmath>
#include <numbers>

namespace rtsmp {

std::string to_string(MeasureKind kind) {
    switch (kind) {
        case MeasureKind::atoms: return "atoms";
        case MeasureKind::uniform_box: return "uniform-box";
        case MeasureKind::uniform_sphere: return "uniform-sphere";
        case MeasureKind::uniform_ball: return "uniform-ball";
    }
    return "atoms";
}

MeasureKind measure_kind_from_string(const std::string& s) {
    if (s == "atoms") return MeasureKind::atoms;
    if (s == "uniform-box") return MeasureKind::uniform_box;
    if (s == "uniform-sphere") return MeasureKind::uniform_sphere;
    if (s == "uniform-ball") return MeasureKind::uniform_ball;
    throw ValidationError("measure.kind", "unknown measure kind '" + s + "'");
}

namespace {

void check_mass(double mass) {
    if (!(mass > 0.0) || !std::isfinite(mass)) throw ValidationError("measure.mass", "mass must be positive");
}

void check_count(Index count) {
    if (count < 1) throw ValidationError("measure.nodes", "node count must be positive");
}

// Unit directions, dim x k, closed under negation when k is even.
Eigen::MatrixXd directions(int dim, Index k) {
    Eigen::MatrixXd d(dim, k);
    if (dim == 1) {
        for (Index i = 0; i < k; ++i) d(0, i) = i % 2 == 0 ? -1.0 : 1.0;
    } else if (dim == 2) {
        for (Index i = 0; i < k; ++i) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(k);
            d(0, i) = std::cos(a);
            d(1, i) = std::sin(a);
        }
    } else {
        // Fibonacci lattice on the upper half, mirrored.
        const Index half = (k + 1) / 2;
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (Index i = 0; i < half; ++i) {
            const double z = 1.0 - (static_cast<double>(i) + 0.5) / static_cast<double>(half);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * static_cast<double>(i);
            d(0, i) = r * std::cos(phi);
            d(1, i) = r * std::sin(phi);
            d(2, i) = z;
            if (half + i < k) d.col(half + i) = -d.col(i);
        }
    }
    return d;
}

}  // namespace

VelocityMeasure VelocityMeasure::atoms(Eigen::MatrixXd points, Vector weights, double declared_mass) {
    if (points.cols() == 0) throw ValidationError("measure.atoms", "at least one atom required");
    if (points.cols() != weights.size()) throw ValidationError("measure.atoms", "one weight per atom required");
    for (Index k = 0; k < weights.size(); ++k) {
        if (!(weights[k] > 0.0) || !std::isfinite(weights[k]))
            throw ValidationError("measure.atoms", "weight of atom " + std::to_string(k) + " must be positive");
    }
    if (!points.allFinite()) throw ValidationError("measure.atoms", "non-finite atom coordinate");
    VelocityMeasure m;
    m.kind_ = MeasureKind::atoms;
    m.nodes_ = std::move(points);
    m.weights_ = std::move(weights);
    m.mass_ = m.weights_.sum();
    m.requested_ = m.nodes_.cols();
    if (declared_mass >= 0.0) {
        check_mass(declared_mass);
        if (std::abs(m.mass_ - declared_mass) > 1e-12 * declared_mass)
            throw ValidationError("measure.mass", "atom weights sum to " + std::to_string(m.mass_) +
                                                      ", declared mass " + std::to_string(declared_mass));
    }
    return m;
}

VelocityMeasure VelocityMeasure::uniform_box(Vector lower, Vector upper, double mass, Index count) {
    check_mass(mass);
    check_count(count);
    const int dim = static_cast<int>(lower.size());
    if (dim == 0 || upper.size() != dim) throw ValidationError("measure.upper", "box bounds must share a dimension");
    if (!((upper - lower).array() > 0.0).all()) throw ValidationError("measure.lower", "lower < upper violated");

    Index per_axis = static_cast<Index>(std::ceil(std::pow(static_cast<double>(count), 1.0 / dim) - 1e-9));
    per_axis = std::max<Index>(per_axis, 1);
    Index total = 1;
    for (int a = 0; a < dim; ++a) total *= per_axis;

    VelocityMeasure m;
    m.kind_ = MeasureKind::uniform_box;
    m.nodes_.resize(dim, total);
    for (Index k = 0; k < total; ++k) {
        Index rest = k;
        for (int a = dim - 1; a >= 0; --a) {
            const Index i = rest % per_axis;
            rest /= per_axis;
            const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(per_axis);
            m.nodes_(a, k) = lower[a] + t * (upper[a] - lower[a]);
        }
    }
    m.weights_ = Vector::Constant(total, mass / static_cast<double>(total));
    m.mass_ = mass;
    m.requested_ = count;
    m.lower_ = std::move(lower);
    m.upper_ = std::move(upper);
    return m;
}

VelocityMeasure VelocityMeasure::uniform_sphere(Vector center, double radius, double mass, Index count) {
    check_mass(mass);
    check_count(count);
    const int dim = static_cast<int>(center.size());
    if (dim < 1 || dim > 3) throw ValidationError("measure.center", "sphere measures support dimension 1..3");
    if (!(radius > 0.0)) throw ValidationError("measure.radius", "radius must be positive");
    const Index k = dim == 1 ? 2 : count;

    VelocityMeasure m;
    m.kind_ = MeasureKind::uniform_sphere;
    m.nodes_ = (radius * directions(dim, k)).colwise() + center;
    m.weights_ = Vector::Constant(k, mass / static_cast<double>(k));
    m.mass_ = mass;
    m.requested_ = count;
    m.center_ = std::move(center);
    m.radius_ = radius;
    return m;
}

VelocityMeasure VelocityMeasure::uniform_ball(Vector center, double radius, double mass, Index count) {
    check_mass(mass);
    check_count(count);
    const int dim = static_cast<int>(center.size());
    if (dim < 1 || dim > 3) throw ValidationError("measure.center", "ball measures support dimension 1..3");
    if (!(radius > 0.0)) throw ValidationError("measure.radius", "radius must be positive");

    // Equal-volume shells times a symmetric direction set; each node carries
    // the same weight.
    Index shells = 0;
    Index dirs = 0;
    if (dim == 1) {
        dirs = 2;
        shells = std::max<Index>(1, (count + 1) / 2);
    } else {
        shells = std::max<Index>(1, std::llround(std::sqrt(static_cast<double>(count)) / 2.0));
        dirs = (count + shells - 1) / shells;
        dirs += dirs % 2;
    }
    const Eigen::MatrixXd d = directions(dim, dirs);
    const Index total = shells * dirs;

    VelocityMeasure m;
    m.kind_ = MeasureKind::uniform_ball;
    m.nodes_.resize(dim, total);
    for (Index j = 0; j < shells; ++j) {
        const double r = radius * std::pow((static_cast<double>(j) + 0.5) / static_cast<double>(shells), 1.0 / dim);
        Eigen::MatrixXd dj = d;
        if (dim == 2 && j % 2 == 1) {
            const double off = std::numbers::pi / static_cast<double>(dirs);
            Eigen::Matrix2d rot;
            rot << std::cos(off), -std::sin(off), std::sin(off), std::cos(off);
            dj = rot * d;
        }
        m.nodes_.middleCols(j * dirs, dirs) = (r * dj).colwise() + center;
    }
    m.weights_ = Vector::Constant(total, mass / static_cast<double>(total));
    m.mass_ = mass;
    m.requested_ = count;
    m.center_ = std::move(center);
    m.radius_ = radius;
    return m;
}

bool VelocityMeasure::support_contains(const Vector& p, double slack) const {
    switch (kind_) {
        case MeasureKind::atoms:
            for (Index k = 0; k < size(); ++k) {
                if ((nodes_.col(k) - p).norm() <= slack) return true;
            }
            return false;
        case MeasureKind::uniform_box:
            return (p.array() >= lower_.array() - slack).all() && (p.array() <= upper_.array() + slack).all();
        case MeasureKind::uniform_sphere: return std::abs((p - center_).norm() - radius_) <= slack;
        case MeasureKind::uniform_ball: return (p - center_).norm() <= radius_ + slack;
    }
    return false;
}

}  // namespace rtsmp
