#include "rtsmp/reach.hpp"

#include "rtsmp/errors.hpp"
#include "rtsmp/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>

namespace rtsmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Velocities the reach moves may use: the measure nodes for velocity jumps,
// the whole velocity grid for shift increments.
Eigen::MatrixXd reach_velocities(const Scenario& s) {
    if (s.nonlocal == NonlocalKind::levy) return s.grid->v_points();
    return s.measure.nodes();
}

std::vector<Vector> distinct_drifts(const Scenario& s) {
    const Eigen::MatrixXd vs = reach_velocities(s);
    const Vector x0 = s.grid->x_point(0);
    std::vector<Vector> out;
    for (Index j = 0; j < vs.cols(); ++j) {
        for (Index k = 0; k < s.drift.term_count(); ++k) {
            const Vector b = s.drift.evaluate(x0, vs.col(j), k);
            bool seen = false;
            for (const Vector& o : out) seen = seen || o == b;
            if (!seen) out.push_back(b);
        }
    }
    return out;
}

Vector piece_value(const std::vector<std::pair<double, Vector>>& sched, double t) {
    double acc = 0.0;
    for (const auto& [d, val] : sched) {
        acc += d;
        if (t < acc) return val;
    }
    return sched.back().second;
}

double schedule_length(const std::vector<std::pair<double, Vector>>& sched, const char* key) {
    double total = 0.0;
    for (const auto& [d, val] : sched) {
        if (!(d > 0.0)) throw ValidationError(key, "segment durations must be positive");
        total += d;
    }
    return total;
}

}  // namespace

Trajectory integrate_trajectory(const TrajectorySpec& spec, const DriftField& drift, const Domain* domain) {
    if (!(spec.dt > 0.0)) throw ValidationError("dt", "integrator step must be positive");
    const double tv = schedule_length(spec.velocity, "velocity");
    const double tc = schedule_length(spec.control, "control");
    if (!spec.velocity.empty() && !spec.control.empty() && std::abs(tv - tc) > 1e-12 * std::max(tv, tc))
        throw ValidationError("control", "velocity and control schedules cover different horizons");
    const double horizon = std::max(tv, tc);

    std::vector<double> breaks{0.0};
    double acc = 0.0;
    for (const auto& p : spec.velocity) breaks.push_back(acc += p.first);
    acc = 0.0;
    for (const auto& p : spec.control) breaks.push_back(acc += p.first);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [&](double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, horizon); }),
                 breaks.end());

    const int dim = static_cast<int>(spec.start.size());
    const Index vdim = drift.kind() == DriftKind::affine ? drift.matrix().cols() : dim;
    Trajectory tr;
    Vector x = spec.start;
    if (domain) x = domain->wrap(x);
    tr.points.push_back({0.0, x});
    if (domain && !domain->contains(x)) tr.exit_time = 0.0;

    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double t0 = breaks[p];
        const double t1 = breaks[p + 1];
        const double mid = 0.5 * (t0 + t1);
        const Vector v = spec.velocity.empty() ? Vector::Zero(vdim) : piece_value(spec.velocity, mid);
        const Vector a = spec.control.empty() ? Vector::Zero(dim) : piece_value(spec.control, mid);
        auto f = [&](const Vector& y) { return drift.evaluate_with(y, v, a); };
        double t = t0;
        while (t < t1) {
            const double h = std::min(spec.dt, t1 - t);
            const Vector k1 = f(x);
            const Vector k2 = f(x + 0.5 * h * k1);
            const Vector k3 = f(x + 0.5 * h * k2);
            const Vector k4 = f(x + h * k3);
            Vector next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t = (t1 - t <= spec.dt) ? t1 : t + h;
            if (domain) {
                if (std::isinf(tr.exit_time) && !domain->contains(next)) {
                    const Vector dir = (next - x) / h;
                    tr.exit_time = t - h + domain->exit_time(x, dir);
                }
                next = domain->wrap(next);
            }
            x = next;
            tr.points.push_back({t, x});
        }
    }
    return tr;
}

ReachGraph::ReachGraph(const Scenario& s, double t_step) : x_(s.x_domain), t_step_(t_step) {
    if (!(t_step > 0.0)) throw ValidationError("solver.reach_horizon", "segment horizon must be positive");
    capture_ = x_.capture_radius() * (1.0 + 1e-9);
    const int dim = x_.dim();
    const Vector h = x_.spacings();
    const double hmin = x_.min_spacing();

    for (const Vector& b : distinct_drifts(s)) {
        const double speed = b.norm();
        if (speed == 0.0) continue;
        Group g{b, {}};
        const double length = t_step_ * speed;
        const Index samples = static_cast<Index>(std::ceil(length / (0.5 * hmin))) + 1;
        std::map<std::vector<Index>, std::size_t> slot;
        IndexVector lo(dim), hi(dim), o(dim);
        for (Index i = 0; i <= samples; ++i) {
            const Vector p = (static_cast<double>(i) / static_cast<double>(samples)) * t_step_ * b;
            for (int a = 0; a < dim; ++a) {
                const double reach = (capture_ + hmin) / h[a];
                lo[a] = static_cast<Index>(std::floor(p[a] / h[a] - reach));
                hi[a] = static_cast<Index>(std::ceil(p[a] / h[a] + reach));
            }
            o = lo;
            while (true) {
                const Vector q = o.cast<double>().cwiseProduct(h);
                const double tstar = q.dot(b) / (speed * speed);
                if (tstar >= 0.0 && tstar <= t_step_ * (1.0 + 1e-12) && (q - tstar * b).norm() <= capture_) {
                    std::vector<Index> key(dim);
                    for (int a = 0; a < dim; ++a) {
                        const Index n = x_.resolution()[a];
                        key[a] = x_.periodic()[a] ? ((o[a] % n) + n) % n : o[a];
                    }
                    const double time = q.norm() / speed;
                    const auto it = slot.find(key);
                    if (it == slot.end()) {
                        slot.emplace(key, g.entries.size());
                        g.entries.push_back({o, time, tstar});
                    } else if (time < g.entries[it->second].time) {
                        g.entries[it->second] = {o, time, tstar};
                    }
                }
                int a = dim - 1;
                while (a >= 0 && o[a] == hi[a]) {
                    o[a] = lo[a];
                    --a;
                }
                if (a < 0) break;
                ++o[a];
            }
        }
        groups_.push_back(std::move(g));
    }

    limits_.assign(x_.node_count() * groups_.size(), kInf);
    for (Index ix = 0; ix < x_.node_count(); ++ix) {
        if (!x_.is_active(ix)) continue;
        const Vector p = x_.point(ix);
        for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
            const double te = x_.exit_time(p, groups_[gi].b);
            limits_[ix * groups_.size() + gi] = te + capture_ / groups_[gi].b.norm();
        }
    }
}

Index ReachGraph::shift(const IndexVector& base, const IndexVector& offset, int sign) const {
    Index flat = 0;
    for (int a = 0; a < x_.dim(); ++a) {
        const Index n = x_.resolution()[a];
        Index j = base[a] + sign * offset[a];
        if (x_.periodic()[a]) {
            j %= n;
            if (j < 0) j += n;
        } else if (j < 0 || j >= n) {
            return -1;
        }
        flat += j * x_.stride(a);
    }
    return flat;
}

double ReachGraph::exit_limit(Index source, std::size_t group) const {
    return limits_[source * groups_.size() + group];
}

double default_horizon(const Scenario& s) {
    double slowest = kInf;
    for (const Vector& b : distinct_drifts(s)) {
        const double n = b.norm();
        if (n > 0.0) slowest = std::min(slowest, n);
    }
    const double d = s.x_domain.diameter();
    return std::isinf(slowest) ? d : d / slowest;
}

namespace {

void require_nonempty(const Mask& m, Index expected) {
    if (static_cast<Index>(m.size()) != expected) throw GridError("mask size does not match the x-grid");
    for (bool b : m)
        if (b) return;
    throw PreconditionError("reachability needs a nonempty seed mask");
}

}  // namespace

Mask reach_step(const Mask& mask, const Scenario& s, double t_step) {
    require_nonempty(mask, s.x_domain.node_count());
    const ReachGraph graph(s, t_step);
    Mask out = mask;
    for (Index ix = 0; ix < static_cast<Index>(mask.size()); ++ix) {
        if (!mask[ix]) continue;
        graph.for_each_successor(ix, [&](Index t, double) { out[t] = true; });
    }
    return out;
}

ReachReport reachable_set(const Mask& seeds, const Scenario& s) { return reachable_set(seeds, s, s.reach); }

ReachReport reachable_set(const Mask& seeds, const Scenario& s, const ReachConfig& config) {
    const Domain& xd = s.x_domain;
    const Index n = xd.node_count();
    require_nonempty(seeds, n);
    const double t_step = config.horizon > 0.0 ? config.horizon : default_horizon(s);
    const Index k_limit = config.k_limit > 0 ? config.k_limit : 4 * n;
    const ReachGraph graph(s, t_step);

    ReachReport r;
    r.capture_radius = graph.capture_radius();
    r.t_step = t_step;
    r.first_k.assign(n, -1);
    Mask mask = seeds;
    std::vector<Index> frontier;
    Index reached = 0;
    for (Index ix = 0; ix < n; ++ix) {
        if (!mask[ix]) continue;
        r.first_k[ix] = 0;
        frontier.push_back(ix);
        ++reached;
    }
    r.masks.push_back(mask);
    const Index active = xd.active_count();
    for (Index k = 1; k <= k_limit; ++k) {
        if (reached >= active) {
            r.converged = true;
            break;
        }
        std::vector<Index> next;
        for (Index src : frontier) {
            graph.for_each_successor(src, [&](Index t, double) {
                if (mask[t]) return;
                mask[t] = true;
                r.first_k[t] = k;
                next.push_back(t);
            });
        }
        if (next.empty()) {
            r.converged = true;
            break;
        }
        std::sort(next.begin(), next.end());
        reached += static_cast<Index>(next.size());
        frontier = std::move(next);
        r.masks.push_back(mask);
    }
    r.controllable = reached >= active;

    r.arrival.assign(n, kInf);
    using Item = std::pair<double, Index>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (Index ix = 0; ix < n; ++ix) {
        if (seeds[ix]) {
            r.arrival[ix] = 0.0;
            pq.push({0.0, ix});
        }
    }
    while (!pq.empty()) {
        const auto [d, ix] = pq.top();
        pq.pop();
        if (d > r.arrival[ix]) continue;
        graph.for_each_successor(ix, [&](Index t, double cost) {
            const double nd = d + cost;
            if (nd < r.arrival[t]) {
                r.arrival[t] = nd;
                pq.push({nd, t});
            }
        });
    }
    return r;
}

Controllability is_controllable(const Scenario& s) {
    const Domain& xd = s.x_domain;
    const ReachGraph graph(s, s.reach.horizon > 0.0 ? s.reach.horizon : default_horizon(s));
    Controllability c;
    c.capture_radius = graph.capture_radius();
    const Index p0 = xd.nearest_node(xd.ball_center());

    auto closure = [&](bool forward) {
        Mask seen(xd.node_count(), false);
        std::vector<Index> stack{p0};
        seen[p0] = true;
        while (!stack.empty()) {
            const Index ix = stack.back();
            stack.pop_back();
            auto visit = [&](Index t, double) {
                if (!seen[t]) {
                    seen[t] = true;
                    stack.push_back(t);
                }
            };
            if (forward) graph.for_each_successor(ix, visit);
            else graph.for_each_predecessor(ix, visit);
        }
        return seen;
    };
    auto first_missing = [&](const Mask& m) -> Index {
        for (Index ix = 0; ix < xd.node_count(); ++ix)
            if (xd.is_active(ix) && !m[ix]) return ix;
        return -1;
    };

    const Index y = first_missing(closure(true));
    if (y >= 0) {
        c.from = p0;
        c.to = y;
        return c;
    }
    const Index x = first_missing(closure(false));
    if (x >= 0) {
        c.from = x;
        c.to = p0;
        return c;
    }
    c.controllable = true;
    return c;
}

void write_reach_csv(std::ostream& out, const ReachReport& r, const Domain& x) {
    for (int a = 0; a < x.dim(); ++a) out << "i_" << a << ',';
    for (int a = 0; a < x.dim(); ++a) out << "x_" << a << ',';
    out << "arrival_time,first_k\n";
    for (Index ix = 0; ix < x.node_count(); ++ix) {
        const IndexVector m = x.unravel(ix);
        const Vector p = x.point(ix);
        for (int a = 0; a < x.dim(); ++a) out << m[a] << ',';
        for (int a = 0; a < x.dim(); ++a) out << format_real(p[a]) << ',';
        out << format_real(r.arrival[ix]) << ',' << r.first_k[ix] << '\n';
    }
}

std::string mask_bits(const Mask& mask, const Domain& x) {
    const int dim = x.dim();
    const Index line = x.resolution()[dim - 1];
    const Index slab = dim >= 2 ? line * x.resolution()[dim - 2] : line;
    std::string out;
    for (Index ix = 0; ix < x.node_count(); ++ix) {
        if (dim >= 3 && ix > 0 && ix % slab == 0) out += '\n';
        out += mask[ix] ? '1' : '0';
        if ((ix + 1) % line == 0) out += '\n';
    }
    return out;
}

Mask mask_from_bits(const std::string& text, const Domain& x) {
    Mask m;
    std::istringstream in(text);
    std::string row;
    const Index line = x.resolution()[x.dim() - 1];
    while (std::getline(in, row)) {
        if (row.empty()) continue;
        if (static_cast<Index>(row.size()) != line) throw ValidationError("mask", "bit row has the wrong length");
        for (char c : row) {
            if (c != '0' && c != '1') throw ValidationError("mask", "bit rows hold only 0 and 1");
            m.push_back(c == '1');
        }
    }
    if (static_cast<Index>(m.size()) != x.node_count()) throw ValidationError("mask", "bit grid does not match the x-grid");
    return m;
}

}  // namespace rtsmp
