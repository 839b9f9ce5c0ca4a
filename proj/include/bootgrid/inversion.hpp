#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string_view>

#include "asymptotics.hpp"

namespace bootgrid {

/// Solves critical_log_volume(m, p) = lnV for p in (0, e^-2] by bisection on
/// u = ln(1/p), stopping once the bracket is 1e-12 wide in u (relative width
/// 1e-12 in p).
inline double invert_numeric(double lnV, const ScalingModel& m) {
    m.validate();
    constexpr double u_min = 2.0;
    auto forward = [&m](double u) { return (m.C * u * u + m.Cprime * u) * std::exp(u); };
    const double floor_lnV = forward(u_min);
    if (!std::isfinite(lnV) || lnV < floor_lnV * (1.0 - 1e-12))
        throw std::domain_error("ln V below the invertible range (ln V_c at p = e^-2)");
    if (lnV <= floor_lnV) return std::exp(-u_min);
    double lo = u_min, hi = u_min;
    while (forward(hi) < lnV) {
        lo = hi;
        hi *= 2.0;
        if (hi > 700.0) throw std::range_error("ln V too large to invert in double precision");
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (forward(mid) < lnV ? lo : hi) = mid;
    }
    return std::exp(-0.5 * (lo + hi));
}

struct ExpansionTerms {
    double term1 = 0;  // C ln^2 ln V / ln V
    double term2 = 0;  // -4C ln ln ln V ln ln V / ln V
    double term3 = 0;  // (-2C ln C + C') ln ln V / ln V
    double total = 0;  // summed in ascending magnitude
    static constexpr std::string_view remainder_order = "ln^2 lnln V / ln V";
};

/// Three-term asymptotic expansion of p_c(V) obtained by substituting
/// ln(1/p_c) ~ ln ln V - 2 ln ln ln V - ln C into p_c ln V = C ln^2(1/p_c) + C' ln(1/p_c).
inline ExpansionTerms pc_expansion(double lnV, const ScalingModel& m) {
    m.validate();
    if (!(lnV > std::exp(std::numbers::e)) || !std::isfinite(lnV))
        throw std::domain_error("expansion needs ln V > e^e (ln ln ln V > 0)");
    const double ll = std::log(lnV);
    const double lll = std::log(ll);
    ExpansionTerms t;
    t.term1 = m.C * ll * ll / lnV;
    t.term2 = -4.0 * m.C * lll * ll / lnV;
    t.term3 = (-2.0 * m.C * std::log(m.C) + m.Cprime) * ll / lnV;
    std::array<double, 3> parts{t.term1, t.term2, t.term3};
    std::sort(parts.begin(), parts.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    t.total = (parts[0] + parts[1]) + parts[2];
    return t;
}

/// (p_numeric - expansion total) ln V / ln^2 ln ln V: the remainder measured
/// in units of its nominal order.
inline double expansion_residual(double lnV, const ScalingModel& m) {
    const ExpansionTerms t = pc_expansion(lnV, m);
    const double p = invert_numeric(lnV, m);
    const double lll = std::log(std::log(lnV));
    return (p - t.total) * lnV / (lll * lll);
}

/// Status of the chains
///   1/p <= ln V <= p^-(1+eps),
///   ln(1/p) <= ln ln V <= (1+eps) ln(1/p),
///   ln ln(1/p) <= ln ln ln V <= ln ln(1/p) + eps
/// at ln V = critical_log_volume(m, p).
struct BracketingReport {
    double p = 0;
    double lnV = 0;
    bool lower_bounds_hold = false;
    /// Smallest eps for which every upper bound holds (0 if they hold at eps = 0).
    double epsilon = std::numeric_limits<double>::quiet_NaN();

    bool holds(double eps) const noexcept { return lower_bounds_hold && epsilon <= eps; }
};

inline BracketingReport bracketing(double p, const ScalingModel& m) {
    m.validate();
    BracketingReport r;
    r.p = p;
    r.lnV = critical_log_volume(m, p);
    const double inv = std::log(1.0 / p);
    // All three lower bounds are ln V >= 1/p after taking logarithms.
    r.lower_bounds_hold = r.lnV * p >= 1.0;
    if (!r.lower_bounds_hold) return r;
    const double ll = std::log(r.lnV);
    const double eps_volume = (ll - inv) / inv;               // first and second chains
    const double eps_triple = std::log(ll) - std::log(inv);   // third chain
    r.epsilon = std::max({eps_volume, eps_triple, 0.0});
    return r;
}

inline bool bracketing_check(double p, const ScalingModel& m, double eps) { return bracketing(p, m).holds(eps); }

}  // namespace bootgrid
