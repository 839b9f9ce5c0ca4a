#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "montecarlo.hpp"
#include "parallel.hpp"
#include "polynomial.hpp"
#include "rules.hpp"

// Rectangle growth events of the (1,2) rule, each on the smallest open grid
// that holds the rectangle and its helper cells. Cells outside that grid could
// never fill in an empty environment (each sees at most two occupied cells of
// the rectangle), so the tight grid does not change the event.

namespace bootgrid {

enum class GrowthDirection { east_column, north_rows };

inline std::string to_string(GrowthDirection d) { return d == GrowthDirection::east_column ? "east_column" : "north_rows"; }

struct GrowthEventSpec {
    GrowthDirection direction = GrowthDirection::east_column;
    int size = 1;  // rectangle height n (east_column) or width x (north_rows)

    /// Random columns (east_column) or rows (north_rows) next to the rectangle.
    int helper_depth() const noexcept { return direction == GrowthDirection::east_column ? 1 : 2; }
};

using GrowthPolynomial = WeightPolynomial;

/// Occupied rectangle, the helper cells that receive random occupancy, and
/// the cells that must all be occupied in the closure for the event to hold.
struct GrowthScene {
    Configuration base;
    std::vector<Coord> helpers;
    std::vector<Coord> target;
};

inline GrowthScene make_growth_scene(const GrowthEventSpec& spec) {
    if (spec.size < 1) throw std::domain_error("growth rectangle size must be >= 1");
    const std::int64_t s = spec.size;
    if (spec.direction == GrowthDirection::east_column) {
        // 2 x n rectangle in columns 0-1, helper column 2.
        GrowthScene scene{Configuration(GridSpec({3, s})), {}, {}};
        occupy_rect(scene.base, Rect{{0, 0, 0}, {2, s, 1}});
        for (std::int64_t y = 0; y < s; ++y) scene.helpers.push_back({2, y, 0});
        scene.target = scene.helpers;
        return scene;
    }
    // x x 2 rectangle in rows 0-1, helper rows 2-3; the event is row 2 full.
    GrowthScene scene{Configuration(GridSpec({s, 4})), {}, {}};
    occupy_rect(scene.base, Rect{{0, 0, 0}, {s, 2, 1}});
    for (std::int64_t row = 2; row < 4; ++row)
        for (std::int64_t x = 0; x < s; ++x) scene.helpers.push_back({x, row, 0});
    for (std::int64_t x = 0; x < s; ++x) scene.target.push_back({x, 2, 0});
    return scene;
}

namespace detail {
inline bool growth_event_holds(QueueClosure& engine, const GrowthScene& scene, const Configuration& start) {
    const Configuration closed = engine.run(start);
    for (const Coord& c : scene.target)
        if (!closed.get(c)) return false;
    return true;
}

inline GrowthPolynomial enumerate_growth(const GrowthEventSpec& spec, int threads) {
    const GrowthScene scene = make_growth_scene(spec);
    const Rule rule = make_rule(RuleFamily::one_two());
    const int m = static_cast<int>(scene.helpers.size());
    const std::int64_t total = std::int64_t{1} << m;
    const int workers = std::max(threads, 1);
    std::vector<std::vector<std::int64_t>> partial(static_cast<std::size_t>(workers),
                                                   std::vector<std::int64_t>(static_cast<std::size_t>(m + 1), 0));
    std::atomic<int> slot{0};
    parallel_blocks(total, workers, [&](std::int64_t begin, std::int64_t end) {
        QueueClosure engine(scene.base.grid(), rule);
        auto& counts = partial[static_cast<std::size_t>(slot++)];
        for (std::int64_t mask = begin; mask < end; ++mask) {
            Configuration cfg = scene.base;
            for (int i = 0; i < m; ++i)
                if ((mask >> i) & 1) cfg.set(scene.helpers[static_cast<std::size_t>(i)]);
            if (growth_event_holds(engine, scene, cfg))
                ++counts[static_cast<std::size_t>(std::popcount(static_cast<std::uint64_t>(mask)))];
        }
    });
    GrowthPolynomial poly{std::vector<std::int64_t>(static_cast<std::size_t>(m + 1), 0)};
    for (const auto& counts : partial)
        for (int k = 0; k <= m; ++k) poly.weight_counts[static_cast<std::size_t>(k)] += counts[static_cast<std::size_t>(k)];
    return poly;
}
}  // namespace detail

/// Probability that a full 2 x n rectangle plus a random east column of
/// height n closes over that whole column. Exhaustive over 2^n columns.
inline GrowthPolynomial column_growth_polynomial(int n, int threads = 1) {
    if (n < 1) throw std::domain_error("column height must be >= 1");
    if (n > 20) throw std::domain_error("column enumeration refused for n > 20");
    return detail::enumerate_growth({GrowthDirection::east_column, n}, threads);
}

/// Probability that a full x x 2 rectangle plus two random rows of width x
/// on its north side closes over the first of those rows. Exhaustive over
/// 2^(2x) helper configurations.
inline GrowthPolynomial row_growth_polynomial(int x, int threads = 1) {
    if (x < 1) throw std::domain_error("row width must be >= 1");
    if (x > 12) throw std::domain_error("row enumeration refused for x > 12");
    return detail::enumerate_growth({GrowthDirection::north_rows, x}, threads);
}

inline GrowthPolynomial growth_polynomial(const GrowthEventSpec& spec, int threads = 1) {
    return spec.direction == GrowthDirection::east_column ? column_growth_polynomial(spec.size, threads)
                                                          : row_growth_polynomial(spec.size, threads);
}

/// Monte Carlo estimate of the same event; each helper cell consumes one
/// uniform from trial_stream(seed, trial).
inline Estimate estimate_growth_mc(const GrowthEventSpec& spec, double p, std::int64_t trials, std::uint64_t seed,
                                   int threads = 1) {
    detail::require_probability(p);
    if (trials < 1) throw std::domain_error("trials must be >= 1");
    const GrowthScene scene = make_growth_scene(spec);
    const Rule rule = make_rule(RuleFamily::one_two());
    const BernoulliThreshold occupied(p);
    std::vector<std::int64_t> successes(static_cast<std::size_t>(std::max(threads, 1)), 0);
    std::atomic<int> slot{0};
    parallel_blocks(trials, threads, [&](std::int64_t begin, std::int64_t end) {
        QueueClosure engine(scene.base.grid(), rule);
        std::int64_t local = 0;
        for (std::int64_t t = begin; t < end; ++t) {
            Stream s = trial_stream(seed, static_cast<std::uint64_t>(t));
            Configuration cfg = scene.base;
            for (const Coord& c : scene.helpers)
                if (occupied(s())) cfg.set(c);
            local += detail::growth_event_holds(engine, scene, cfg);
        }
        successes[static_cast<std::size_t>(slot++)] = local;
    });
    std::int64_t total = 0;
    for (auto s : successes) total += s;
    return bernoulli_estimate(total, trials, seed);
}

/// Width of the growth-strategy rectangle of height n: exp(3np) / (3p).
inline double strategy_width(double p, double n) {
    const double e = 3.0 * n * p;
    if (e > 700.0) throw std::range_error("strategy width exp(3np) overflows: 3np = " + std::to_string(e));
    return std::exp(e) / (3.0 * p);
}

/// Probability of crossing the x_{n+1} - x_n fresh columns that separate
/// stage n from stage n+1, each crossed with probability 1 - (1-p)^(3n).
/// Since (x_{n+1} - x_n) (1-p)^(3n) -> 1, the value tends to 1/e as p -> 0.
inline double horizontal_step_probability(double p, double n) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("horizontal step probability needs 0 < p < 1");
    if (!(n >= 1.0)) throw std::domain_error("stage height must be >= 1");
    const double columns = strategy_width(p, n + 1.0) - strategy_width(p, n);
    const double column_failure = std::exp(3.0 * n * std::log1p(-p));
    return std::exp(columns * std::log1p(-column_failure));
}

}  // namespace bootgrid
