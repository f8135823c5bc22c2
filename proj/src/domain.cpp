#include "rtsmp/domain.hpp"

#include "rtsmp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rtsmp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Domain::Domain(Vector lower, Vector upper, BoolArray periodic, IndexVector resolution, Shape shape,
               const std::string& key_prefix)
    : lower_(std::move(lower)), upper_(std::move(upper)), periodic_(std::move(periodic)),
      resolution_(std::move(resolution)), shape_(shape) {
    validate(key_prefix);
    index();
}

void Domain::validate(const std::string& key_prefix) const {
    const auto n = lower_.size();
    if (n == 0) throw ValidationError(key_prefix + ".dimension", "dimension must be positive");
    if (upper_.size() != n) throw ValidationError(key_prefix + ".upper", "size does not match dimension");
    if (periodic_.size() != n) throw ValidationError(key_prefix + ".periodic", "size does not match dimension");
    if (resolution_.size() != n)
        throw ValidationError(key_prefix + ".resolution", "size does not match dimension");
    for (Index i = 0; i < n; ++i) {
        if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i]))
            throw ValidationError(key_prefix + ".lower", "lower < upper violated on axis " + std::to_string(i));
        if (resolution_[i] < 2)
            throw ValidationError(key_prefix + ".resolution", "resolution must be >= 2 on axis " + std::to_string(i));
    }
    if (shape_ == Shape::ball && periodic_.any())
        throw ValidationError(key_prefix + ".shape", "ball shape cannot have periodic axes");
}

void Domain::index() {
    const int n = dim();
    strides_.assign(n, 1);
    for (int a = n - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * resolution_[a + 1];
    count_ = strides_[0] * resolution_[0];

    active_.assign(count_, true);
    interior_.assign(count_, true);
    const Vector c = ball_center();
    const double r = shape_ == Shape::ball ? ball_radius() : 0.0;
    active_count_ = 0;
    for (Index f = 0; f < count_; ++f) {
        const IndexVector m = unravel(f);
        bool interior = true;
        for (int a = 0; a < n; ++a) {
            if (!periodic_[a] && (m[a] == 0 || m[a] == resolution_[a] - 1)) interior = false;
        }
        bool active = true;
        if (shape_ == Shape::ball) {
            const double d = (point(f) - c).norm();
            active = d <= r * (1.0 + 1e-12);
            interior = interior && d < r * (1.0 - 1e-12);
        }
        active_[f] = active;
        interior_[f] = interior;
        if (active) ++active_count_;
    }
}

double Domain::spacing(int axis) const {
    const double len = upper_[axis] - lower_[axis];
    return periodic_[axis] ? len / static_cast<double>(resolution_[axis])
                           : len / static_cast<double>(resolution_[axis] - 1);
}

Vector Domain::spacings() const {
    Vector h(dim());
    for (int a = 0; a < dim(); ++a) h[a] = spacing(a);
    return h;
}

double Domain::ball_radius() const { return 0.5 * (upper_ - lower_).minCoeff(); }

IndexVector Domain::unravel(Index flat) const {
    IndexVector m(dim());
    for (int a = 0; a < dim(); ++a) {
        m[a] = flat / strides_[a];
        flat -= m[a] * strides_[a];
    }
    return m;
}

Index Domain::ravel(const IndexVector& multi) const {
    Index f = 0;
    for (int a = 0; a < dim(); ++a) f += multi[a] * strides_[a];
    return f;
}

Vector Domain::point(Index flat) const {
    Vector p(dim());
    for (int a = 0; a < dim(); ++a) {
        const Index i = flat / strides_[a];
        flat -= i * strides_[a];
        p[a] = coord(a, i);
    }
    return p;
}

Index Domain::neighbor(Index flat, int axis, Index step) const {
    const Index i = (flat / strides_[axis]) % resolution_[axis];
    Index j = i + step;
    const Index n = resolution_[axis];
    if (periodic_[axis]) {
        j %= n;
        if (j < 0) j += n;
    } else if (j < 0 || j >= n) {
        return -1;
    }
    return flat + (j - i) * strides_[axis];
}

bool Domain::contains(const Vector& p, double slack) const {
    for (int a = 0; a < dim(); ++a) {
        if (periodic_[a]) continue;
        const double tol = slack * (upper_[a] - lower_[a]);
        if (p[a] < lower_[a] - tol || p[a] > upper_[a] + tol) return false;
    }
    if (shape_ == Shape::ball) return (p - ball_center()).norm() <= ball_radius() * (1.0 + slack);
    return true;
}

double Domain::exit_time(const Vector& p, const Vector& dir) const {
    double t = kInf;
    for (int a = 0; a < dim(); ++a) {
        if (periodic_[a] || dir[a] == 0.0) continue;
        const double ta = dir[a] > 0.0 ? (upper_[a] - p[a]) / dir[a] : (lower_[a] - p[a]) / dir[a];
        t = std::min(t, ta);
    }
    if (shape_ == Shape::ball) {
        const Vector q = p - ball_center();
        const double a2 = dir.squaredNorm();
        if (a2 > 0.0) {
            const double r = ball_radius();
            const double b = q.dot(dir);
            const double c = q.squaredNorm() - r * r;
            const double disc = b * b - a2 * c;
            const double tb = disc < 0.0 ? 0.0 : (-b + std::sqrt(disc)) / a2;
            t = std::min(t, tb);
        }
    }
    return std::max(t, 0.0);
}

Vector Domain::wrap(const Vector& p) const {
    Vector q = p;
    for (int a = 0; a < dim(); ++a) {
        if (!periodic_[a]) continue;
        const double len = upper_[a] - lower_[a];
        double s = std::fmod(q[a] - lower_[a], len);
        if (s < 0.0) s += len;
        if (s >= len) s = 0.0;
        q[a] = lower_[a] + s;
    }
    return q;
}

Vector Domain::displacement(const Vector& a, const Vector& b) const {
    Vector d = b - a;
    for (int i = 0; i < dim(); ++i) {
        if (!periodic_[i]) continue;
        const double len = upper_[i] - lower_[i];
        d[i] -= len * std::round(d[i] / len);
    }
    return d;
}

Index Domain::nearest_node(const Vector& p) const {
    const Vector q = wrap(p);
    IndexVector m(dim());
    for (int a = 0; a < dim(); ++a) {
        Index i = static_cast<Index>(std::llround((q[a] - lower_[a]) / spacing(a)));
        if (periodic_[a]) {
            i %= resolution_[a];
            if (i < 0) i += resolution_[a];
        } else {
            i = std::clamp<Index>(i, 0, resolution_[a] - 1);
        }
        m[a] = i;
    }
    const Index f = ravel(m);
    if (active_[f]) return f;
    Index best = -1;
    double best_d = kInf;
    for (Index g = 0; g < count_; ++g) {
        if (!active_[g]) continue;
        const double d = displacement(q, point(g)).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = g;
        }
    }
    return best;
}

bool Domain::operator==(const Domain& other) const {
    return shape_ == other.shape_ && lower_.size() == other.lower_.size() && lower_ == other.lower_ &&
           upper_ == other.upper_ && (periodic_ == other.periodic_).all() && resolution_ == other.resolution_;
}

}  // namespace rtsmp
