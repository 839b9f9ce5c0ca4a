#pragma once

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lattice.hpp"
#include "parallel.hpp"
#include "polynomial.hpp"
#include "rng.hpp"
#include "rules.hpp"

namespace bootgrid {

struct Estimate {
    double mean = 0;
    double std_error = 0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
};

inline Estimate bernoulli_estimate(std::int64_t successes, std::int64_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::domain_error("an estimate needs at least one trial");
    const double m = static_cast<double>(successes) / static_cast<double>(trials);
    return {m, std::sqrt(m * (1.0 - m) / static_cast<double>(trials)), trials, seed};
}

namespace detail {
inline void require_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("probability must lie in [0,1]");
}
}  // namespace detail

/// One fill trial: the p-random configuration drawn from trial_stream(seed,
/// trial) closes to the full grid. Same (seed, trial) at larger p gives a
/// superset configuration, hence a fill whenever the smaller p fills.
inline bool fill_trial(QueueClosure& engine, const GridSpec& grid, double p, std::uint64_t seed, std::uint64_t trial) {
    Stream s = trial_stream(seed, trial);
    return engine.run(random_configuration(grid, p, s)).is_full();
}

inline bool fill_trial(const Rule& rule, const GridSpec& grid, double p, std::uint64_t seed, std::uint64_t trial) {
    QueueClosure engine(grid, rule);
    return fill_trial(engine, grid, p, seed, trial);
}

inline Estimate fill_probability(const Rule& rule, const GridSpec& grid, double p, std::int64_t trials,
                                 std::uint64_t seed, int threads = 1) {
    detail::require_probability(p);
    if (trials < 1) throw std::domain_error("trials must be >= 1");
    if (grid.dimension() != rule.dimension()) throw std::domain_error("rule dimension does not match grid dimension");
    std::vector<std::int64_t> successes(static_cast<std::size_t>(std::max(threads, 1)), 0);
    std::atomic<int> slot{0};
    parallel_blocks(trials, threads, [&](std::int64_t begin, std::int64_t end) {
        QueueClosure engine(grid, rule);
        std::int64_t local = 0;
        for (std::int64_t t = begin; t < end; ++t) local += fill_trial(engine, grid, p, seed, static_cast<std::uint64_t>(t));
        successes[static_cast<std::size_t>(slot++)] = local;
    });
    std::int64_t total = 0;
    for (auto s : successes) total += s;
    return bernoulli_estimate(total, trials, seed);
}

/// Exhaustive fill polynomial over all 2^cells initial configurations.
inline WeightPolynomial fill_polynomial_exact(const Rule& rule, const GridSpec& grid) {
    if (grid.cell_count() > 20) throw std::domain_error("exact fill enumeration is limited to 20 cells");
    if (grid.dimension() != rule.dimension()) throw std::domain_error("rule dimension does not match grid dimension");
    const auto cells = static_cast<int>(grid.cell_count());
    WeightPolynomial poly{std::vector<std::int64_t>(static_cast<std::size_t>(cells + 1), 0)};
    QueueClosure engine(grid, rule);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask) {
        Configuration cfg(grid);
        for (int i = 0; i < cells; ++i)
            if ((mask >> i) & 1U) cfg.set(i);
        if (engine.run(cfg).is_full()) ++poly.weight_counts[static_cast<std::size_t>(std::popcount(mask))];
    }
    return poly;
}

inline double fill_probability_exact(const Rule& rule, const GridSpec& grid, double p) {
    detail::require_probability(p);
    return fill_polynomial_exact(rule, grid)(p);
}

struct PcOptions {
    double target = 0.5;
    double p_tolerance = 1e-3;
    std::int64_t trials_per_probe = 1000;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// Bisection for the density where the fill probability crosses `target`.
/// Every probe reuses the same seed, so the sampled response curve is
/// nondecreasing in p and the bracket is well defined. Returns the bracket
/// midpoint with std_error = bracket half-width; `trials` totals all probes.
inline Estimate estimate_pc(const Rule& rule, const GridSpec& grid, const PcOptions& opt = {}) {
    if (!(opt.target > 0.0 && opt.target < 1.0)) throw std::domain_error("pc target must lie in (0,1)");
    if (!(opt.p_tolerance > 0.0)) throw std::domain_error("pc tolerance must be positive");
    if (opt.trials_per_probe < 1) throw std::domain_error("trials per probe must be >= 1");
    double lo = 0.0, hi = 1.0;
    std::int64_t probes = 0;
    while (hi - lo > opt.p_tolerance) {
        const double mid = 0.5 * (lo + hi);
        const Estimate e = fill_probability(rule, grid, mid, opt.trials_per_probe, opt.seed, opt.threads);
        ++probes;
        (e.mean < opt.target ? lo : hi) = mid;
    }
    return {0.5 * (lo + hi), 0.5 * (hi - lo), probes * opt.trials_per_probe, opt.seed};
}

struct SweepRow {
    RuleFamily family;
    GridSpec grid;
    double p = 0;
    Estimate fill;
};

/// Fill estimates for every (grid, p) pair, grids outermost, in input order.
/// All rows share the seed, so along p the trials are coupled.
inline std::vector<SweepRow> sweep(const RuleFamily& family, const std::vector<GridSpec>& grids,
                                   const std::vector<double>& ps, std::int64_t trials, std::uint64_t seed,
                                   int threads = 1) {
    if (grids.empty() || ps.empty()) throw std::domain_error("sweep needs at least one grid and one probability");
    const Rule rule = make_rule(family);
    std::vector<SweepRow> rows;
    rows.reserve(grids.size() * ps.size());
    for (const GridSpec& g : grids)
        for (double p : ps) rows.push_back({family, g, p, fill_probability(rule, g, p, trials, seed, threads)});
    return rows;
}

}  // namespace bootgrid
