#pragma once

#include "rtsmp/scenario.hpp"

#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

namespace rtsmp {

/// Piecewise-constant velocity and control schedules, (duration, value) pairs.
/// An empty control schedule evaluates the drift without a control (b = 0
/// for the control kind); an empty velocity schedule uses v = 0.
struct TrajectorySpec {
    Vector start;
    std::vector<std::pair<double, Vector>> velocity;
    std::vector<std::pair<double, Vector>> control;
    double dt = 0.01;
};

struct PathPoint {
    double t;
    Vector x;
};

struct Trajectory {
    std::vector<PathPoint> points;
    /// First time the path leaves the closed domain; +inf when it never does
    /// or no domain was given.
    double exit_time = std::numeric_limits<double>::infinity();
};

/// Classical RK4 with step dt inside every constant piece, the last step of a
/// piece shortened to land on its end. Periodic coordinates are wrapped when a
/// domain is given. Throws ValidationError on non-positive durations or
/// schedules of different total length.
Trajectory integrate_trajectory(const TrajectorySpec& spec, const DriftField& drift, const Domain* domain = nullptr);

using Mask = std::vector<bool>;

/// Straight-segment moves on the x-grid. A segment with drift b from a node
/// captures every node whose offset lies within the capture radius of the ray
/// {t b : 0 <= t <= T_step}; the move costs |offset| / |b|, so chains of moves
/// never beat the straight-line time.
class ReachGraph {
  public:
    ReachGraph(const Scenario& s, double t_step);

    const Domain& domain() const { return x_; }
    double t_step() const { return t_step_; }
    double capture_radius() const { return capture_; }
    std::size_t drift_count() const { return groups_.size(); }

    /// Calls fn(target, time) for every node one segment away from `source`.
    template <typename Fn>
    void for_each_successor(Index source, Fn fn) const;
    /// Calls fn(source, time) for every node one segment before `target`.
    template <typename Fn>
    void for_each_predecessor(Index target, Fn fn) const;

  private:
    struct Entry {
        IndexVector offset;
        double time;
        double tstar;
    };
    struct Group {
        Vector b;
        std::vector<Entry> entries;
    };

    Index shift(const IndexVector& base, const IndexVector& offset, int sign) const;
    /// Largest projection time a segment from `source` may use before leaving Omega.
    double exit_limit(Index source, std::size_t group) const;

    Domain x_;
    double t_step_;
    double capture_;
    std::vector<Group> groups_;
    std::vector<double> limits_;
};

/// Default per-segment horizon: diameter(Omega) / min nonzero |b| over V0 x controls.
double default_horizon(const Scenario& s);

/// One segment from every masked node, input mask included. Throws
/// PreconditionError on an empty mask.
Mask reach_step(const Mask& mask, const Scenario& s, double t_step);

struct ReachReport {
    std::vector<Mask> masks;
    std::vector<double> arrival;  // +inf when unreached
    std::vector<Index> first_k;   // -1 when unreached
    bool converged = false;
    bool controllable = false;  // final mask covers every active node
    double capture_radius = 0.0;
    double t_step = 0.0;
};

/// Iterates reach_step from the seeds until the mask stops growing or the
/// k-limit is hit; arrival times are shortest total segment times.
ReachReport reachable_set(const Mask& seeds, const Scenario& s);
ReachReport reachable_set(const Mask& seeds, const Scenario& s, const ReachConfig& config);

struct Controllability {
    bool controllable = false;
    Index from = -1;  // witness pair: `to` is not reachable from `from`
    Index to = -1;
    double capture_radius = 0.0;
};

/// Every active node reaches every other: forward closure from the node
/// nearest the centre plus backward closure into it.
Controllability is_controllable(const Scenario& s);

/// CSV: x_0.., arrival_time, first_k; one row per x-node in lexicographic order.
void write_reach_csv(std::ostream& out, const ReachReport& r, const Domain& x);
/// 0/1 text, one line per x-line along the last axis; blank line between 2D slabs.
std::string mask_bits(const Mask& mask, const Domain& x);
Mask mask_from_bits(const std::string& text, const Domain& x);

// ---------------------------------------------------------------------------

template <typename Fn>
void ReachGraph::for_each_successor(Index source, Fn fn) const {
    const IndexVector base = x_.unravel(source);
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
        const double limit = exit_limit(source, gi);
        for (const Entry& e : groups_[gi].entries) {
            if (e.tstar > limit) continue;
            const Index t = shift(base, e.offset, 1);
            if (t >= 0 && x_.is_active(t)) fn(t, e.time);
        }
    }
}

template <typename Fn>
void ReachGraph::for_each_predecessor(Index target, Fn fn) const {
    const IndexVector base = x_.unravel(target);
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
        for (const Entry& e : groups_[gi].entries) {
            const Index s = shift(base, e.offset, -1);
            if (s >= 0 && x_.is_active(s) && e.tstar <= exit_limit(s, gi)) fn(s, e.time);
        }
    }
}

}  // namespace rtsmp
