#pragma once

#include "rtsmp/field.hpp"
#include "rtsmp/registry.hpp"
#include "rtsmp/scenario.hpp"

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <tuple>

namespace rtsmp::test {

inline Scenario scenario_from(const std::string& text) { return build_scenario(ScenarioConfig::parse(text)); }

using Override = std::tuple<const char*, const char*, std::string>;

inline ScenarioConfig with(ScenarioConfig c, std::initializer_list<Override> overrides) {
    for (const auto& [section, key, value] : overrides) c.set(section, key, value);
    return c;
}

inline Scenario example(const std::string& name, std::initializer_list<Override> overrides = {}) {
    return build_scenario(with(find_example(name).config(), overrides));
}

/// Deterministic generator; every property suite derives its own seed.
class Gen {
  public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
    Index integer(Index a, Index b) { return std::uniform_int_distribution<Index>(a, b)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    Vector vector(int dim, double a, double b) {
        Vector v(dim);
        for (int i = 0; i < dim; ++i) v[i] = uniform(a, b);
        return v;
    }

    /// Smooth random field: a few random cosine modes in x and v.
    GridFunction smooth_field(const std::shared_ptr<const PhaseGrid>& grid, int modes = 3, double amplitude = 1.0) {
        struct Mode {
            Vector kx, kv;
            double phase, amp;
        };
        std::vector<Mode> ms;
        for (int m = 0; m < modes; ++m) {
            ms.push_back({vector(grid->x_dim(), -3.0, 3.0), vector(grid->v_dim(), -2.0, 2.0), uniform(0.0, 6.3),
                          uniform(-amplitude, amplitude)});
        }
        GridFunction u(grid);
        for (Index ix = 0; ix < grid->x_count(); ++ix) {
            const Vector x = grid->x_point(ix);
            for (Index iv = 0; iv < grid->v_count(); ++iv) {
                const Vector v = grid->v_point(iv);
                double acc = 0.0;
                for (const auto& m : ms) acc += m.amp * std::cos(m.kx.dot(x) + m.kv.dot(v) + m.phase);
                u(ix, iv) = acc;
            }
        }
        return u;
    }

    /// Nodewise uniform noise in [a, b].
    GridFunction noise(const std::shared_ptr<const PhaseGrid>& grid, double a, double b) {
        GridFunction u(grid);
        for (Index i = 0; i < u.values().size(); ++i) u.values().data()[i] = uniform(a, b);
        return u;
    }

  private:
    std::mt19937_64 rng_;
};

inline double sup_diff(const GridFunction& a, const GridFunction& b) {
    return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

}  // namespace rtsmp::test
