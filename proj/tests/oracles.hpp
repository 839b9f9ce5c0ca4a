#pragma once

// Reference implementations used only by tests. They work cell by cell on
// coordinates and share no code with the word-parallel or queue engines.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "bootgrid/lattice.hpp"
#include "bootgrid/rules.hpp"

namespace bootgrid::oracle {

inline std::int64_t count_cells(const Configuration& cfg) {
    std::int64_t n = 0;
    for (std::int64_t i = 0; i < cfg.grid().cell_count(); ++i) n += cfg.get(i);
    return n;
}

// Occupancy at c + offset under the grid's boundary rule.
inline bool neighbour(const Configuration& cfg, const Coord& c, const Coord& offset) {
    const GridSpec& g = cfg.grid();
    Coord q{c[0] + offset[0], c[1] + offset[1], c[2] + offset[2]};
    for (int a = 0; a < 3; ++a) {
        if (g.boundary() == Boundary::periodic) {
            q[a] = ((q[a] % g.extent(a)) + g.extent(a)) % g.extent(a);
        } else if (q[a] < 0 || q[a] >= g.extent(a)) {
            return false;
        }
    }
    return cfg.get(q);
}

inline bool predicate(const Configuration& cfg, const Coord& c, const Rule& rule) {
    if (rule.kind() == RuleKind::modified) {
        for (int a = 0; a < rule.dimension(); ++a) {
            Coord plus{0, 0, 0}, minus{0, 0, 0};
            plus[a] = 1;
            minus[a] = -1;
            if (!neighbour(cfg, c, plus) && !neighbour(cfg, c, minus)) return false;
        }
        return true;
    }
    int count = 0;
    for (const Coord& o : rule.stencil()) count += neighbour(cfg, c, o);
    return count >= rule.theta();
}

inline std::pair<Configuration, std::int64_t> reference_step(const Configuration& cfg, const Rule& rule) {
    Configuration next = cfg;
    std::int64_t changed = 0;
    for (std::int64_t i = 0; i < cfg.grid().cell_count(); ++i) {
        const Coord c = cfg.grid().coord(i);
        if (!cfg.get(c) && predicate(cfg, c, rule)) {
            next.set(c);
            ++changed;
        }
    }
    return {next, changed};
}

inline Configuration reference_closure(Configuration cfg, const Rule& rule) {
    for (;;) {
        auto [next, changed] = reference_step(cfg, rule);
        if (changed == 0) return cfg;
        cfg = std::move(next);
    }
}

/// Counts, per occupied-cell weight, the configurations of `cells` free cells
/// for which `event(mask)` holds.
inline std::vector<std::int64_t> enumerate_weights(int cells, const std::function<bool(std::uint64_t)>& event) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(cells + 1), 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask)
        if (event(mask)) ++counts[static_cast<std::size_t>(__builtin_popcountll(mask))];
    return counts;
}

inline double bernstein(const std::vector<std::int64_t>& counts, double p) {
    const int m = static_cast<int>(counts.size()) - 1;
    double s = 0;
    for (int k = 0; k <= m; ++k) s += static_cast<double>(counts[static_cast<std::size_t>(k)]) * std::pow(p, k) * std::pow(1 - p, m - k);
    return s;
}

/// Bisection root of a nondecreasing function on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double target, double lo, double hi, double tol) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// All rule families exercised by randomized suites.
inline std::vector<RuleFamily> all_families() {
    return {RuleFamily::standard(2), RuleFamily::standard(3), RuleFamily::modified(2), RuleFamily::modified(3),
            RuleFamily::one_two(),   RuleFamily::one_b(3),    RuleFamily::duarte(),    RuleFamily::abc(1, 1, 2),
            RuleFamily::standard(1)};
}

inline GridSpec grid_for(const RuleFamily& f, std::int64_t side2d, std::int64_t side3d, Boundary b) {
    switch (f.dimension()) {
        case 1: return GridSpec({side2d * side2d}, b);
        case 2: return GridSpec({side2d, side2d}, b);
        default: return GridSpec({side3d, side3d, side3d}, b);
    }
}

}  // namespace bootgrid::oracle
