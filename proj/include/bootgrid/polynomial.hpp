#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bootgrid {

/// Probability of an event over m independent Bernoulli(p) cells, stored as
/// exact integer counts: weight_counts[k] is the number of the C(m,k)
/// configurations with k occupied cells on which the event holds.
struct WeightPolynomial {
    std::vector<std::int64_t> weight_counts;

    int cells() const noexcept { return static_cast<int>(weight_counts.size()) - 1; }

    /// Exact power-basis coefficients: sum_k f_k p^k (1-p)^(m-k) expanded.
    std::vector<std::int64_t> coefficients() const {
        const int m = cells();
        std::vector<std::int64_t> out(static_cast<std::size_t>(m + 1), 0);
        for (int j = 0; j <= m; ++j) {
            __int128 acc = 0;
            for (int k = 0; k <= j; ++k) {
                const __int128 term = static_cast<__int128>(weight_counts[static_cast<std::size_t>(k)]) * binomial(m - k, j - k);
                acc += ((j - k) % 2 == 0) ? term : -term;
            }
            if (acc > std::numeric_limits<std::int64_t>::max() || acc < std::numeric_limits<std::int64_t>::min())
                throw std::overflow_error("polynomial coefficient exceeds 64 bits");
            out[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(acc);
        }
        return out;
    }

    /// Evaluated in the counting (Bernstein) form, which has no cancellation on [0,1].
    double operator()(double p) const {
        const int m = cells();
        long double sum = 0;
        for (int k = 0; k <= m; ++k) {
            const auto f = weight_counts[static_cast<std::size_t>(k)];
            if (f == 0) continue;
            sum += static_cast<long double>(f) * std::pow(static_cast<long double>(p), k) *
                   std::pow(1.0L - static_cast<long double>(p), m - k);
        }
        return static_cast<double>(sum);
    }

    static std::int64_t binomial(int n, int k) {
        if (k < 0 || k > n) return 0;
        std::int64_t r = 1;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    }
};

/// Horner evaluation of a power-basis coefficient list.
inline long double evaluate_power_basis(const std::vector<std::int64_t>& coeffs, long double p) {
    long double acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * p + static_cast<long double>(*it);
    return acc;
}

}  // namespace bootgrid
