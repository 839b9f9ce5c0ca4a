#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "lattice.hpp"
#include "rules.hpp"

namespace bootgrid {

// Leading constant of the (1,b) models, (b-1)^2 / (2(b+1)), as a reduced fraction.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Fraction&, const Fraction&) = default;
};

inline Fraction anisotropic_constant_exact(std::int64_t b) {
    if (b < 1) throw std::domain_error("(1,b) constant requires b >= 1");
    std::int64_t num = (b - 1) * (b - 1), den = 2 * (b + 1);
    const std::int64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

inline double anisotropic_constant(std::int64_t b) { return anisotropic_constant_exact(b).value(); }

/// Coefficient of (1/p) ln(1/p) in the log-probability of the (1,2) growth
/// strategy: (1/3) ln(8 / (3e)), slightly negative.
inline double nucleation_second_coefficient() { return std::log(8.0 / (3.0 * std::numbers::e)) / 3.0; }

/// C' of the (1,2) critical volume. V_c is the inverse nucleation
/// probability, so C' = -(1/3) ln(8 / (3e)) = (1/3) ln(3e / 8).
inline double one_two_second_constant() { return -nucleation_second_coefficient(); }

/// Coefficients of ln V_c(p) = (C/p) ln^2(1/p) + (C'/p) ln(1/p) together with
/// the family whose leading-order law they describe.
struct ScalingModel {
    RuleFamily family = RuleFamily::one_two();
    double C = 1.0 / 6.0;
    double Cprime = 0.0;

    /// Constants for a rule family. The (1,2) and (1,b) constants are known;
    /// standard and modified families default to C = 1 (an order constant the
    /// caller is expected to override). Duarte and (a,b,c) have no sharp
    /// constants and are rejected.
    static ScalingModel for_family(const RuleFamily& f, std::optional<double> C = {},
                                   std::optional<double> Cprime = {}) {
        f.validate();
        ScalingModel m{f, 1.0, 0.0};
        using Tag = RuleFamily::Tag;
        switch (f.tag) {
            case Tag::one_two:
                m.C = 1.0 / 6.0;
                m.Cprime = one_two_second_constant();
                break;
            case Tag::one_b:
                m.C = anisotropic_constant(f.b);
                m.Cprime = f.b == 2 ? one_two_second_constant() : 0.0;
                break;
            case Tag::standard:
            case Tag::modified:
                if (f.d < 2) throw unsupported_error("no finite-volume scaling law for one-dimensional families");
                break;
            case Tag::duarte: throw unsupported_error("the Duarte model has no sharp scaling constant");
            case Tag::abc: throw unsupported_error("(a,b,c) models have order-of-magnitude scaling only");
        }
        if (C) m.C = *C;
        if (Cprime) m.Cprime = *Cprime;
        m.validate();
        return m;
    }

    static ScalingModel custom(double C, double Cprime) {
        ScalingModel m{RuleFamily::one_two(), C, Cprime};
        m.validate();
        return m;
    }

    bool unbalanced() const noexcept {
        return family.tag == RuleFamily::Tag::one_two || family.tag == RuleFamily::Tag::one_b;
    }

    void validate() const {
        if (!(C > 0.0) || !std::isfinite(C)) throw std::domain_error("scaling constant C must be positive");
        if (!std::isfinite(Cprime)) throw std::domain_error("scaling constant C' must be finite");
    }
};

// ---------------------------------------------------------------------------
// Growth-strategy stages.

struct StrategyRange {
    double n0 = 0;  // (2/p) ln ln(1/p)
    double nf = 0;  // (1/(3p)) ln(1/p)
    double first = 0;  // ceil(n0)
    double last = 0;   // floor(nf)

    bool empty() const noexcept { return first > last; }
    double stage_count() const noexcept { return empty() ? 0.0 : last - first + 1.0; }
};

inline StrategyRange strategy_range(double p) {
    if (!(p > 0.0 && p < std::exp(-1.0))) throw std::domain_error("strategy range needs 0 < p < 1/e");
    const double inv = std::log(1.0 / p);
    StrategyRange r;
    r.n0 = 2.0 / p * std::log(inv);
    r.nf = inv / (3.0 * p);
    r.first = std::ceil(r.n0);
    r.last = std::floor(r.nf);
    return r;
}

/// ln prod_{n=first}^{last} (8p/(3e)) exp(3np), by the arithmetic series
/// K ln(8p/(3e)) + 3p (first + last) K / 2 with K = last - first + 1.
inline double stage_log_product(double p, double first, double last) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("stage product needs 0 < p < 1");
    if (first > last) throw std::domain_error("empty stage range");
    const long double K = static_cast<long double>(last) - first + 1.0L;
    const long double factor = std::log(8.0L * p / (3.0L * std::numbers::e_v<long double>));
    const long double series = 0.5L * (static_cast<long double>(first) + last) * K;
    return static_cast<double>(K * factor + 3.0L * p * series);
}

/// Log-probability of the growth strategy over the integer stages
/// ceil(n0) .. floor(nf).
inline double nucleation_log_prob_sum(double p) {
    const StrategyRange r = strategy_range(p);
    if (r.empty())
        throw std::domain_error("growth-strategy range is empty at p = " + std::to_string(p) +
                                " (ceil(n0) > floor(nf))");
    return stage_log_product(p, r.first, r.last);
}

struct NucleationTerms {
    double leading = 0;  // -(1/(6p)) ln^2(1/p)
    double second = 0;   // (1/3) ln(8/(3e)) (1/p) ln(1/p)
    double total() const noexcept { return leading + second; }
};

inline NucleationTerms nucleation_log_prob_closed(double p) {
    if (!(p > 0.0 && p < std::exp(-1.0))) throw std::domain_error("closed nucleation form needs 0 < p < 1/e");
    const double L = std::log(1.0 / p);
    return {-L * L / (6.0 * p), nucleation_second_coefficient() * L / p};
}

// ---------------------------------------------------------------------------
// Critical volume and leading-order thresholds.

/// ln V_c = (C/p) ln^2(1/p) + (C'/p) ln(1/p), restricted to p <= e^-2.
inline double critical_log_volume(const ScalingModel& m, double p) {
    if (!(p > 0.0 && p <= std::exp(-2.0))) throw std::domain_error("critical volume needs 0 < p <= e^-2");
    const double L = std::log(1.0 / p);
    return (m.C * L * L + m.Cprime * L) / p;
}

namespace detail {
inline void require_lnv_above_e(double lnV) {
    if (!(lnV > std::numbers::e) || !std::isfinite(lnV)) throw std::domain_error("ln V must exceed e");
}
}  // namespace detail

inline double leading_pc(const ScalingModel& m, double lnV) {
    detail::require_lnv_above_e(lnV);
    const double ll = std::log(lnV);
    if (m.unbalanced()) return m.C * ll * ll / lnV;
    switch (m.family.d) {
        case 2: return m.C / lnV;
        case 3: return m.C / ll;
        default: throw unsupported_error("no leading threshold law for family " + m.family.name());
    }
}

/// Order-of-magnitude width of the window where the fill probability rises
/// from eps to 1-eps: ln ln V / ln^2 V (standard, d=2) or ln^3 ln V / ln^2 V
/// (the (1,2) model). Scaled by `prefactor`.
inline double epsilon_window(const RuleFamily& family, double lnV, double prefactor = 1.0) {
    detail::require_lnv_above_e(lnV);
    const double ll = std::log(lnV);
    using Tag = RuleFamily::Tag;
    const bool one_two = family.tag == Tag::one_two || (family.tag == Tag::one_b && family.b == 2);
    if (one_two) return prefactor * ll * ll * ll / (lnV * lnV);
    if (family.tag == Tag::standard && family.d == 2) return prefactor * ll / (lnV * lnV);
    throw unsupported_error("no epsilon-window law for family " + family.name());
}

}  // namespace bootgrid
