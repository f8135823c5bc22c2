#include "rtsmp/hjb.hpp"

#include "rtsmp/errors.hpp"
#include "rtsmp/nonlocal.hpp"

#include <cmath>
#include <limits>
#include <thread>

namespace rtsmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Arm {
    int axis;
    Index step;
    double coef;  // |b_j| / h_j
};

struct Term {
    std::vector<Arm> arms;
    double coef_sum = 0.0;
};

// Upwind arms per (v node, control). Every drift kind is x-independent.
std::vector<Term> upwind_terms(const Scenario& s) {
    const PhaseGrid& g = *s.grid;
    const Index kc = s.drift.term_count();
    const Vector x0 = g.x_point(0);
    std::vector<Term> terms(g.v_count() * kc);
    for (Index iv = 0; iv < g.v_count(); ++iv) {
        for (Index k = 0; k < kc; ++k) {
            const Vector b = s.drift.evaluate(x0, g.v_point(iv), k);
            Term& t = terms[iv * kc + k];
            for (int a = 0; a < g.x_dim(); ++a) {
                if (b[a] == 0.0) continue;
                const double c = std::abs(b[a]) / g.x_domain().spacing(a);
                t.arms.push_back({a, b[a] > 0.0 ? Index{1} : Index{-1}, c});
                t.coef_sum += c;
            }
        }
    }
    return terms;
}

std::vector<Index> neighbor_table(const Domain& d) {
    std::vector<Index> nb(d.node_count() * d.dim() * 2);
    for (Index ix = 0; ix < d.node_count(); ++ix) {
        for (int a = 0; a < d.dim(); ++a) {
            nb[(ix * d.dim() + a) * 2] = d.neighbor(ix, a, -1);
            nb[(ix * d.dim() + a) * 2 + 1] = d.neighbor(ix, a, 1);
        }
    }
    return nb;
}

void check_solvable(const Scenario& s) {
    if (!(s.lambda > 0.0)) throw PreconditionError("solver requires lambda > 0");
    if (s.gamma != 0.0) throw PreconditionError("solver supports gamma = 0 only");
}

void check_inputs(const Scenario& s, const GridFunction& g, const GridFunction& psi) {
    if (g.grid_ptr() != s.grid && !(g.x_count() == s.grid->x_count() && g.v_count() == s.grid->v_count()))
        throw GridError("source field is not on the scenario grid");
    if (psi.x_count() != s.grid->x_count() || psi.v_count() != s.grid->v_count())
        throw GridError("boundary field is not on the scenario grid");
}

GridFunction initial_iterate(const Scenario& s, const GridFunction& g, const GridFunction& psi, InitialGuess init) {
    double fill = 0.0;
    if (init != InitialGuess::zero) {
        const double m = barrier_bound(g, psi, s.lambda);
        fill = init == InitialGuess::upper_barrier ? m : -m;
    }
    GridFunction u(s.grid, fill);
    const Domain& xd = s.grid->x_domain();
    for (Index ix = 0; ix < xd.node_count(); ++ix) {
        if (is_dirichlet(xd, ix)) u.values().row(ix) = psi.values().row(ix);
    }
    return u;
}

bool better(double candidate, double best, OptimizationMode mode) {
    return mode == OptimizationMode::sup ? candidate < best : candidate > best;
}

// Runs `sweep` (returns the sup-norm change) until the contraction bound
// certifies the tolerance and `accept` agrees.
template <typename Sweep, typename Accept>
void iterate(SolveResult& r, const SolverConfig& config, double q, Sweep sweep, Accept accept) {
    const double factor = q < 1.0 ? std::max(1.0, q / (1.0 - q)) : kInf;
    for (Index it = 1; it <= config.max_iterations; ++it) {
        const double delta = sweep();
        r.iterations = it;
        r.update_norm = delta;
        r.updates.push_back(delta);
        if (delta * factor <= config.tolerance && accept()) return;
    }
    throw ConvergenceError(static_cast<long>(r.iterations), r.update_norm);
}

template <typename RowFn>
void for_rows(Index rows, int threads, RowFn fn, std::vector<double>& local_delta) {
    const int t = std::max(1, std::min<int>(threads, static_cast<int>(rows)));
    local_delta.assign(t, 0.0);
    if (t == 1) {
        for (Index ix = 0; ix < rows; ++ix) local_delta[0] = std::max(local_delta[0], fn(ix));
        return;
    }
    std::vector<std::thread> pool;
    const Index chunk = (rows + t - 1) / t;
    for (int w = 0; w < t; ++w) {
        pool.emplace_back([&, w] {
            const Index lo = w * chunk;
            const Index hi = std::min(rows, lo + chunk);
            for (Index ix = lo; ix < hi; ++ix) local_delta[w] = std::max(local_delta[w], fn(ix));
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

double hamiltonian(const Vector& x, const Vector& v, const Vector& p, const DriftField& drift,
                   OptimizationMode mode) {
    double best = mode == OptimizationMode::sup ? -kInf : kInf;
    for (Index k = 0; k < drift.term_count(); ++k) {
        const double h = -drift.evaluate(x, v, k).dot(p);
        best = mode == OptimizationMode::sup ? std::max(best, h) : std::min(best, h);
    }
    return best;
}

Vector upwind_gradient(const GridFunction& u, Index ix, Index iv, const Vector& direction) {
    const Domain& d = u.grid().x_domain();
    Vector grad(d.dim());
    for (int a = 0; a < d.dim(); ++a) {
        const double h = d.spacing(a);
        const Index fwd = d.neighbor(ix, a, 1);
        const Index bwd = d.neighbor(ix, a, -1);
        const bool forward = direction[a] > 0.0 || (direction[a] == 0.0 && fwd >= 0);
        if (forward) {
            if (fwd < 0) throw GridError("upwind stencil leaves the grid at x-node " + std::to_string(ix));
            grad[a] = (u(fwd, iv) - u(ix, iv)) / h;
        } else {
            if (bwd < 0) throw GridError("upwind stencil leaves the grid at x-node " + std::to_string(ix));
            grad[a] = (u(ix, iv) - u(bwd, iv)) / h;
        }
    }
    return grad;
}

bool is_dirichlet(const Domain& x, Index ix) { return !x.is_interior(ix); }

double barrier_bound(const GridFunction& g, const GridFunction& psi, double lambda) {
    const double gs = g.values().cwiseAbs().maxCoeff();
    const double ps = psi.values().cwiseAbs().maxCoeff();
    return std::max(lambda > 0.0 ? gs / lambda : 0.0, ps);
}

SolveResult solve_stationary(const Scenario& s, const SolverConfig& config, InitialGuess init) {
    return solve_stationary(s, grid_sample(s.g, s.grid), grid_sample(s.psi, s.grid), config, init);
}

SolveResult solve_stationary(const Scenario& s, const GridFunction& g, const GridFunction& psi,
                             const SolverConfig& config, InitialGuess init) {
    check_solvable(s);
    check_inputs(s, g, psi);
    const PhaseGrid& grid = *s.grid;
    const Domain& xd = grid.x_domain();
    const int dim = xd.dim();
    const Index kc = s.drift.term_count();
    const Index nv = grid.v_count();
    const double m = grid.measure_mass();
    const bool levy = grid.nonlocal() == NonlocalKind::levy;
    const std::vector<Term> terms = upwind_terms(s);
    const std::vector<Index> nb = neighbor_table(xd);

    double q = 0.0;
    for (const Term& t : terms) q = std::max(q, (m + t.coef_sum) / (s.lambda + m + t.coef_sum));

    SolveResult r;
    r.solution = initial_iterate(s, g, psi, init);
    GridFunction& u = r.solution;

    // New value at (ix, iv) read from `src`.
    auto node_value = [&](const GridFunction& src, Index ix, Index iv, double gain) {
        double best = s.mode == OptimizationMode::sup ? kInf : -kInf;
        for (Index k = 0; k < kc; ++k) {
            const Term& t = terms[iv * kc + k];
            double acc = g(ix, iv) + gain;
            for (const Arm& arm : t.arms) acc += arm.coef * src(nb[(ix * dim + arm.axis) * 2 + (arm.step > 0)], iv);
            const double val = acc / (s.lambda + m + t.coef_sum);
            if (better(val, best, s.mode)) best = val;
        }
        return best;
    };

    auto update_row = [&](const GridFunction& src, GridFunction& dst, Index ix, bool reverse) {
        if (is_dirichlet(xd, ix)) return 0.0;
        const double row_gain = levy ? 0.0 : jump_gain(src, ix, 0);
        double delta = 0.0;
        for (Index j = 0; j < nv; ++j) {
            const Index iv = reverse ? nv - 1 - j : j;
            const double gain = levy ? jump_gain(src, ix, iv) : row_gain;
            const double val = node_value(src, ix, iv, gain);
            delta = std::max(delta, std::abs(val - src(ix, iv)));
            dst(ix, iv) = val;
        }
        return delta;
    };

    GridFunction scratch = u;
    std::vector<double> local;
    auto sweep = [&]() {
        if (config.sweep == SweepOrder::jacobi) {
            for_rows(xd.node_count(), config.threads,
                     [&](Index ix) { return update_row(u, scratch, ix, false); }, local);
            std::swap(u.values(), scratch.values());
            double d = 0.0;
            for (double x : local) d = std::max(d, x);
            return d;
        }
        scratch.values() = u.values();
        for (Index ix = 0; ix < xd.node_count(); ++ix) update_row(u, u, ix, false);
        for (Index ix = xd.node_count() - 1; ix >= 0; --ix) update_row(u, u, ix, true);
        return (u.values() - scratch.values()).cwiseAbs().maxCoeff();
    };
    auto accept = [&]() {
        r.residual_norm = residual(u, s, g, psi).values().cwiseAbs().maxCoeff();
        return r.residual_norm <= 10.0 * config.tolerance;
    };
    iterate(r, config, q, sweep, accept);
    return r;
}

SolveResult semi_lagrangian_value(const Scenario& s, const SolverConfig& config, InitialGuess init) {
    return semi_lagrangian_value(s, grid_sample(s.g, s.grid), grid_sample(s.psi, s.grid), config, init);
}

SolveResult semi_lagrangian_value(const Scenario& s, const GridFunction& g, const GridFunction& psi,
                                  const SolverConfig& config, InitialGuess init) {
    check_solvable(s);
    check_inputs(s, g, psi);
    const PhaseGrid& grid = *s.grid;
    const Domain& xd = grid.x_domain();
    const Index kc = s.drift.term_count();
    const Index nv = grid.v_count();
    const Index nx = xd.node_count();
    const double m = grid.measure_mass();
    const double lam = s.lambda + m;
    const bool levy = grid.nonlocal() == NonlocalKind::levy;

    double bmax = 0.0;
    const Vector x0 = grid.x_point(0);
    for (Index iv = 0; iv < nv; ++iv)
        for (Index k = 0; k < kc; ++k) bmax = std::max(bmax, s.drift.evaluate(x0, grid.v_point(iv), k).norm());
    const double h = xd.min_spacing();
    double dt = config.time_step > 0.0 ? config.time_step : (bmax > 0.0 ? h / bmax : h);
    if (dt * bmax > h * (1.0 + 1e-12))
        throw PreconditionError("semi-Lagrangian step violates the CFL bound dt * max|b| <= min spacing");

    struct Foot {
        Stencil stencil;  // on u, or on psi when the path exits
        double decay;
        double beta;
        bool exits;
    };
    std::vector<Foot> feet(nx * nv * kc);
    for (Index ix = 0; ix < nx; ++ix) {
        if (is_dirichlet(xd, ix)) continue;
        const Vector x = grid.x_point(ix);
        for (Index iv = 0; iv < nv; ++iv) {
            for (Index k = 0; k < kc; ++k) {
                const Vector b = s.drift.evaluate(x, grid.v_point(iv), k);
                const double tau = xd.exit_time(x, b);
                Foot& f = feet[(ix * nv + iv) * kc + k];
                const double t = std::min(tau, dt);
                f.exits = tau < dt;
                f.decay = std::exp(-lam * t);
                f.beta = (1.0 - f.decay) / lam;
                f.stencil = multilinear_stencil(xd, x + t * b);
            }
        }
    }
    const double q = m / lam * (1.0 - std::exp(-lam * dt)) + std::exp(-lam * dt);

    SolveResult r;
    r.solution = initial_iterate(s, g, psi, init);
    GridFunction& u = r.solution;

    auto column = [](const GridFunction& f, const Stencil& st, Index iv) {
        double acc = 0.0;
        for (const auto& e : st) acc += e.weight * f(e.v, iv);
        return acc;
    };

    auto update_row = [&](const GridFunction& src, GridFunction& dst, Index ix, bool reverse) {
        if (is_dirichlet(xd, ix)) return 0.0;
        const double row_gain = levy ? 0.0 : jump_gain(src, ix, 0);
        double delta = 0.0;
        for (Index j = 0; j < nv; ++j) {
            const Index iv = reverse ? nv - 1 - j : j;
            const double gain = levy ? jump_gain(src, ix, iv) : row_gain;
            double best = s.mode == OptimizationMode::sup ? kInf : -kInf;
            for (Index k = 0; k < kc; ++k) {
                const Foot& f = feet[(ix * nv + iv) * kc + k];
                const double tail = column(f.exits ? psi : src, f.stencil, iv);
                const double val = f.beta * (g(ix, iv) + gain) + f.decay * tail;
                if (better(val, best, s.mode)) best = val;
            }
            delta = std::max(delta, std::abs(best - src(ix, iv)));
            dst(ix, iv) = best;
        }
        return delta;
    };

    GridFunction scratch = u;
    std::vector<double> local;
    auto sweep = [&]() {
        if (config.sweep == SweepOrder::jacobi) {
            for_rows(nx, config.threads, [&](Index ix) { return update_row(u, scratch, ix, false); }, local);
            std::swap(u.values(), scratch.values());
            double d = 0.0;
            for (double x : local) d = std::max(d, x);
            return d;
        }
        scratch.values() = u.values();
        for (Index ix = 0; ix < nx; ++ix) update_row(u, u, ix, false);
        for (Index ix = nx - 1; ix >= 0; --ix) update_row(u, u, ix, true);
        return (u.values() - scratch.values()).cwiseAbs().maxCoeff();
    };
    iterate(r, config, q, sweep, [] { return true; });
    r.residual_norm = residual(u, s, g, psi).values().cwiseAbs().maxCoeff();
    return r;
}

GridFunction residual(const GridFunction& u, const Scenario& s) {
    return residual(u, s, grid_sample(s.g, u.grid_ptr()), grid_sample(s.psi, u.grid_ptr()));
}

GridFunction residual(const GridFunction& u, const Scenario& s, const GridFunction& g, const GridFunction& psi) {
    const PhaseGrid& grid = u.grid();
    const Domain& xd = grid.x_domain();
    const Index kc = s.drift.term_count();
    const std::vector<Term> terms = upwind_terms(s);
    GridFunction out(u.grid_ptr());
    for (Index ix = 0; ix < xd.node_count(); ++ix) {
        if (is_dirichlet(xd, ix)) {
            out.values().row(ix) = u.values().row(ix) - psi.values().row(ix);
            continue;
        }
        const double weight = rho_power(s.gamma == 0.0 ? 1.0 : rho(u, ix), s.gamma, ix);
        for (Index iv = 0; iv < grid.v_count(); ++iv) {
            double h = s.mode == OptimizationMode::sup ? -kInf : kInf;
            for (Index k = 0; k < kc; ++k) {
                const Term& t = terms[iv * kc + k];
                double hk = 0.0;
                for (const Arm& arm : t.arms) hk += arm.coef * (u(ix, iv) - u(xd.neighbor(ix, arm.axis, arm.step), iv));
                h = s.mode == OptimizationMode::sup ? std::max(h, hk) : std::min(h, hk);
            }
            out(ix, iv) = s.lambda * u(ix, iv) + h - weight * jump_apply(u, ix, iv) - g(ix, iv);
        }
    }
    return out;
}

ComparisonReport comparison_check(const GridFunction& u, const GridFunction& w, const Scenario& s, double tol) {
    if (!u.same_grid(w)) throw GridError("comparison_check: fields live on different grids");
    (void)s;
    const Domain& xd = u.grid().x_domain();
    ComparisonReport rep;
    rep.max_excess = -kInf;
    for (Index ix = 0; ix < u.x_count(); ++ix) {
        const bool boundary = is_dirichlet(xd, ix);
        for (Index iv = 0; iv < u.v_count(); ++iv) {
            const double excess = u(ix, iv) - w(ix, iv);
            rep.max_excess = std::max(rep.max_excess, excess);
            if (excess <= tol) continue;
            (boundary ? rep.boundary_violations : rep.violations).push_back({ix, iv});
        }
    }
    rep.boundary_ordered = rep.boundary_violations.empty();
    return rep;
}

}  // namespace rtsmp
