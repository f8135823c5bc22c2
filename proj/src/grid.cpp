#include "rtsmp/grid.hpp"

#include "rtsmp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rtsmp {

std::string to_string(VelocityLayout layout) { return layout == VelocityLayout::measure ? "measure" : "tensor"; }
std::string to_string(NonlocalKind kind) { return kind == NonlocalKind::jump ? "jump" : "levy"; }

PhaseGrid::PhaseGrid(Domain x, Domain v, VelocityLayout layout, const VelocityMeasure& measure,
                     NonlocalKind nonlocal)
    : x_(std::move(x)), v_(std::move(v)), layout_(layout), nonlocal_(nonlocal),
      measure_weights_(measure.weights()), mass_(measure.mass()) {
    const Index k_count = measure.size();
    if (layout_ == VelocityLayout::measure) {
        if (nonlocal_ == NonlocalKind::levy) throw GridError("levy increments require a tensor velocity layout");
        v_points_ = measure.nodes();
        v0_.assign(k_count, true);
        measure_stencils_.resize(k_count);
        for (Index k = 0; k < k_count; ++k) measure_stencils_[k] = {{k, 1.0}};
        return;
    }

    if (v_.shape() != Shape::box) throw GridError("tensor velocity layout requires a box velocity domain");
    const Index n = v_.node_count();
    v_points_.resize(v_.dim(), n);
    for (Index iv = 0; iv < n; ++iv) v_points_.col(iv) = v_.point(iv);

    const bool pointlike = measure.kind() == MeasureKind::atoms || measure.kind() == MeasureKind::uniform_sphere;
    const double slack = pointlike ? v_.capture_radius() : 1e-9 * v_.diameter();
    v0_.resize(n);
    for (Index iv = 0; iv < n; ++iv) v0_[iv] = measure.support_contains(v_points_.col(iv), slack);

    if (nonlocal_ == NonlocalKind::jump) {
        measure_stencils_.resize(k_count);
        for (Index k = 0; k < k_count; ++k) {
            const Vector q = measure.node(k);
            if (!v_.contains(q, 1e-12))
                throw GridError("measure node " + std::to_string(k) + " lies outside the velocity grid hull");
            measure_stencils_[k] = interpolate_v(q);
        }
    } else {
        levy_stencils_.resize(n * k_count);
        for (Index iv = 0; iv < n; ++iv) {
            for (Index k = 0; k < k_count; ++k) {
                levy_stencils_[iv * k_count + k] = interpolate_v(v_points_.col(iv) + measure.node(k));
            }
        }
    }
}

Index PhaseGrid::v0_count() const {
    Index c = 0;
    for (bool b : v0_) c += b ? 1 : 0;
    return c;
}

Stencil PhaseGrid::interpolate_v(const Vector& p) const { return multilinear_stencil(v_, p); }

Stencil multilinear_stencil(const Domain& d, const Vector& p) {
    const int dim = d.dim();
    std::vector<Index> lo(dim), hi(dim);
    std::vector<double> frac(dim);
    for (int a = 0; a < dim; ++a) {
        const Index n = d.resolution()[a];
        const double h = d.spacing(a);
        double t = (p[a] - d.lower()[a]) / h;
        if (d.periodic()[a]) {
            t = std::fmod(t, static_cast<double>(n));
            if (t < 0.0) t += static_cast<double>(n);
            Index i = static_cast<Index>(std::floor(t));
            if (i >= n) i = n - 1;
            lo[a] = i;
            hi[a] = (i + 1) % n;
            frac[a] = t - static_cast<double>(i);
        } else {
            t = std::clamp(t, 0.0, static_cast<double>(n - 1));
            Index i = std::min<Index>(static_cast<Index>(std::floor(t)), n - 2);
            lo[a] = i;
            hi[a] = i + 1;
            frac[a] = t - static_cast<double>(i);
        }
        // Snap round-off so on-grid points give single-entry stencils.
        if (frac[a] < 1e-12) frac[a] = 0.0;
        if (frac[a] > 1.0 - 1e-12) frac[a] = 1.0;
    }

    Stencil s;
    const Index corners = Index{1} << dim;
    for (Index c = 0; c < corners; ++c) {
        double w = 1.0;
        IndexVector m(dim);
        for (int a = 0; a < dim; ++a) {
            const bool upper = (c >> a) & 1;
            w *= upper ? frac[a] : 1.0 - frac[a];
            m[a] = upper ? hi[a] : lo[a];
        }
        if (w > 0.0) s.push_back({d.ravel(m), w});
    }
    return s;
}

GridFunction::GridFunction(std::shared_ptr<const PhaseGrid> grid, double fill)
    : grid_(std::move(grid)), values_(Values::Constant(grid_->x_count(), grid_->v_count(), fill)) {}

GridFunction::GridFunction(std::shared_ptr<const PhaseGrid> grid, Values values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.rows() != grid_->x_count() || values_.cols() != grid_->v_count())
        throw GridError("value array shape does not match the grid");
}

bool GridFunction::same_grid(const GridFunction& other) const {
    if (grid_ == other.grid_) return true;
    if (!grid_ || !other.grid_) return false;
    return grid_->x_domain() == other.grid_->x_domain() && grid_->v_count() == other.grid_->v_count() &&
           grid_->v_points() == other.grid_->v_points();
}

}  // namespace rtsmp
