#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lattice.hpp"

namespace bootgrid {

enum class RuleKind {
    threshold,  // empty cell fills when >= theta stencil cells are occupied
    modified,   // empty cell fills when every axis has an occupied +-e_i neighbour
};

/// Monotone local growth predicate.
class Rule {
public:
    static Rule threshold(int dimension, std::vector<Coord> stencil, int theta) {
        if (dimension < 1 || dimension > 3) throw std::domain_error("rule dimension must be 1, 2 or 3");
        if (stencil.empty()) throw std::domain_error("stencil must be nonempty");
        std::set<Coord> seen;
        for (const Coord& o : stencil) {
            if (o == Coord{0, 0, 0}) throw std::domain_error("stencil offsets must be nonzero");
            for (int a = dimension; a < 3; ++a)
                if (o[a] != 0) throw std::domain_error("stencil offset exceeds rule dimension");
            if (!seen.insert(o).second) throw std::domain_error("stencil offsets must be distinct");
        }
        if (theta < 1 || theta > static_cast<int>(stencil.size()))
            throw std::domain_error("threshold must lie in [1, stencil size]");
        return Rule(RuleKind::threshold, dimension, std::move(stencil), theta);
    }

    static Rule modified(int dimension) {
        if (dimension < 1 || dimension > 3) throw std::domain_error("rule dimension must be 1, 2 or 3");
        return Rule(RuleKind::modified, dimension, axis_stencil(dimension), dimension);
    }

    RuleKind kind() const noexcept { return kind_; }
    int dimension() const noexcept { return dimension_; }
    /// Offsets inspected by the predicate. For the modified kind these are
    /// +-e_i in axis order.
    const std::vector<Coord>& stencil() const noexcept { return stencil_; }
    /// Threshold count; for the modified kind, the number of axes to satisfy.
    int theta() const noexcept { return theta_; }

    /// Axis an offset of the modified kind belongs to.
    static int axis_of(const Coord& o) noexcept { return o[0] ? 0 : (o[1] ? 1 : 2); }

    friend bool operator==(const Rule&, const Rule&) = default;

private:
    Rule(RuleKind k, int d, std::vector<Coord> s, int t)
        : kind_(k), dimension_(d), stencil_(std::move(s)), theta_(t) {}

    static std::vector<Coord> axis_stencil(int d) {
        std::vector<Coord> s;
        for (int a = 0; a < d; ++a) {
            Coord plus{0, 0, 0}, minus{0, 0, 0};
            plus[a] = 1;
            minus[a] = -1;
            s.push_back(plus);
            s.push_back(minus);
        }
        return s;
    }

    RuleKind kind_;
    int dimension_;
    std::vector<Coord> stencil_;
    int theta_;
};

struct RuleFamily {
    enum class Tag { standard, modified, one_two, one_b, duarte, abc };

    Tag tag = Tag::standard;
    int d = 2;                  // standard / modified
    int a = 0, b = 0, c = 0;    // one_b uses b; abc uses all three

    static RuleFamily standard(int dim) { return {Tag::standard, dim}; }
    static RuleFamily modified(int dim) { return {Tag::modified, dim}; }
    static RuleFamily one_two() { return {Tag::one_two, 2}; }
    static RuleFamily one_b(int reach) { return {Tag::one_b, 2, 0, reach, 0}; }
    static RuleFamily duarte() { return {Tag::duarte, 2}; }
    static RuleFamily abc(int ra, int rb, int rc) { return {Tag::abc, 3, ra, rb, rc}; }

    int dimension() const noexcept {
        switch (tag) {
            case Tag::standard:
            case Tag::modified: return d;
            case Tag::abc: return 3;
            default: return 2;
        }
    }

    void validate() const {
        switch (tag) {
            case Tag::standard:
            case Tag::modified:
                if (d < 1 || d > 3) throw std::domain_error("family dimension must be 1, 2 or 3");
                break;
            case Tag::one_b:
                if (b < 1) throw std::domain_error("(1,b) family requires b >= 1");
                break;
            case Tag::abc:
                if (a < 1 || !(a <= b && b <= c)) throw std::domain_error("(a,b,c) family requires 1 <= a <= b <= c");
                break;
            default: break;
        }
    }

    /// CLI spelling: standard2, modified2, 12, 1b:3, duarte, abc:1,1,2.
    std::string name() const {
        switch (tag) {
            case Tag::standard: return "standard" + std::to_string(d);
            case Tag::modified: return "modified" + std::to_string(d);
            case Tag::one_two: return "12";
            case Tag::one_b: return "1b:" + std::to_string(b);
            case Tag::duarte: return "duarte";
            case Tag::abc: return "abc:" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c);
        }
        return {};
    }

    friend bool operator==(const RuleFamily&, const RuleFamily&) = default;
};

namespace detail {
inline int parse_int(std::string_view s, std::string_view what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw std::invalid_argument("malformed " + std::string(what) + " '" + std::string(s) + "'");
    return v;
}
}  // namespace detail

inline RuleFamily parse_family(std::string_view s) {
    RuleFamily f;
    if (s == "12") {
        f = RuleFamily::one_two();
    } else if (s == "duarte") {
        f = RuleFamily::duarte();
    } else if (s.rfind("standard", 0) == 0) {
        f = RuleFamily::standard(detail::parse_int(s.substr(8), "family dimension"));
    } else if (s.rfind("modified", 0) == 0) {
        f = RuleFamily::modified(detail::parse_int(s.substr(8), "family dimension"));
    } else if (s.rfind("1b:", 0) == 0) {
        f = RuleFamily::one_b(detail::parse_int(s.substr(3), "(1,b) reach"));
    } else if (s.rfind("abc:", 0) == 0) {
        std::string_view rest = s.substr(4);
        int v[3];
        for (int i = 0; i < 3; ++i) {
            const auto comma = rest.find(',');
            if ((i < 2) != (comma != std::string_view::npos))
                throw std::invalid_argument("abc family needs exactly three reaches: abc:<a>,<b>,<c>");
            v[i] = detail::parse_int(rest.substr(0, comma), "(a,b,c) reach");
            if (i < 2) rest = rest.substr(comma + 1);
        }
        f = RuleFamily::abc(v[0], v[1], v[2]);
    } else {
        throw std::invalid_argument("unknown rule family '" + std::string(s) + "'");
    }
    f.validate();
    return f;
}

inline Rule make_rule(const RuleFamily& family) {
    family.validate();
    using Tag = RuleFamily::Tag;
    std::vector<Coord> s;
    auto axis_run = [&s](int axis, int reach) {
        for (int i = 1; i <= reach; ++i) {
            Coord plus{0, 0, 0}, minus{0, 0, 0};
            plus[axis] = i;
            minus[axis] = -i;
            s.push_back(plus);
            s.push_back(minus);
        }
    };
    switch (family.tag) {
        case Tag::standard:
            for (int a = 0; a < family.d; ++a) axis_run(a, 1);
            return Rule::threshold(family.d, s, family.d);
        case Tag::modified:
            return Rule::modified(family.d);
        case Tag::one_two:
            return make_rule(RuleFamily::one_b(2));
        case Tag::one_b:
            axis_run(0, family.b);
            axis_run(1, 1);
            return Rule::threshold(2, s, family.b + 1);
        case Tag::duarte:
            // North, East, South.
            return Rule::threshold(2, {{0, 1, 0}, {1, 0, 0}, {0, -1, 0}}, 2);
        case Tag::abc:
            axis_run(0, family.a);
            axis_run(1, family.b);
            axis_run(2, family.c);
            return Rule::threshold(3, s, family.a + family.b + family.c);
    }
    throw std::domain_error("unknown rule family");
}

inline void require_matching_dimension(const Configuration& cfg, const Rule& rule) {
    if (cfg.grid().dimension() != rule.dimension())
        throw std::domain_error("rule dimension " + std::to_string(rule.dimension()) +
                                " does not match grid dimension " + std::to_string(cfg.grid().dimension()));
}

/// Word-parallel synchronous update. Counts occupied stencil cells for 64
/// cells at a time with a bit-sliced adder. Periodic wrap is applied per
/// offset, so on grids smaller than the stencil reach one cell may be
/// counted more than once.
class StepKernel {
public:
    using Word = Configuration::Word;

    StepKernel(const GridSpec& grid, const Rule& rule)
        : grid_(grid),
          rule_(rule),
          wpr_((grid.extent(0) + 63) / 64),
          planes_(static_cast<std::size_t>(std::bit_width(rule.stencil().size())) * static_cast<std::size_t>(wpr_)),
          shifted_(static_cast<std::size_t>(wpr_)),
          extra_(static_cast<std::size_t>(wpr_)),
          acc_(static_cast<std::size_t>(wpr_)) {
        if (grid.dimension() != rule.dimension())
            throw std::domain_error("rule dimension does not match grid dimension");
        nbits_ = std::bit_width(rule.stencil().size());
        const std::int64_t r = grid.extent(0) % 64;
        tail_ = r == 0 ? ~Word{0} : (Word{1} << r) - 1;
    }

    /// next = cur with every rule-satisfied empty cell filled. Returns the
    /// number of newly occupied cells. `next` must be on the same grid.
    std::int64_t step(const Configuration& cur, Configuration& next) {
        std::int64_t changed = 0;
        for (std::int64_t z = 0; z < grid_.extent(2); ++z) {
            for (std::int64_t y = 0; y < grid_.extent(1); ++y) {
                const std::int64_t r = y + grid_.extent(1) * z;
                born_row(cur, y, z);
                const Word* src = cur.row(r);
                Word* dst = next.row(r);
                for (std::int64_t w = 0; w < wpr_; ++w) {
                    Word born = acc_[w] & ~src[w];
                    if (w == wpr_ - 1) born &= tail_;
                    changed += std::popcount(born);
                    dst[w] = src[w] | born;
                }
            }
        }
        return changed;
    }

private:
    static Word bits_at(const Word* row, std::int64_t wpr, std::int64_t start) noexcept {
        const std::int64_t wi = start >= 0 ? start / 64 : -((-start + 63) / 64);
        const int sh = static_cast<int>(start - wi * 64);
        const Word lo = (wi >= 0 && wi < wpr) ? row[wi] : 0;
        if (sh == 0) return lo;
        const Word hi = (wi + 1 >= 0 && wi + 1 < wpr) ? row[wi + 1] : 0;
        return (lo >> sh) | (hi << (64 - sh));
    }

    // out bit x = occupancy of cell (x, y, z) + offset, zero when that cell
    // lies outside an open grid.
    void shifted_row(const Configuration& cur, std::int64_t y, std::int64_t z, const Coord& off, Word* out) const {
        std::int64_t sy = y + off[1], sz = z + off[2];
        const bool periodic = grid_.boundary() == Boundary::periodic;
        if (periodic) {
            sy = floor_mod(sy, grid_.extent(1));
            sz = floor_mod(sz, grid_.extent(2));
        } else if (sy < 0 || sy >= grid_.extent(1) || sz < 0 || sz >= grid_.extent(2)) {
            std::fill(out, out + wpr_, Word{0});
            return;
        }
        const Word* src = cur.row(sy + grid_.extent(1) * sz);
        const std::int64_t width = grid_.extent(0);
        if (periodic) {
            const std::int64_t d = floor_mod(off[0], width);
            for (std::int64_t w = 0; w < wpr_; ++w)
                out[w] = bits_at(src, wpr_, 64 * w + d) | (d ? bits_at(src, wpr_, 64 * w + d - width) : 0);
        } else {
            for (std::int64_t w = 0; w < wpr_; ++w) out[w] = bits_at(src, wpr_, 64 * w + off[0]);
        }
        out[wpr_ - 1] &= tail_;
    }

    // acc_ = predicate mask for row (y, z), ignoring current occupancy.
    void born_row(const Configuration& cur, std::int64_t y, std::int64_t z) {
        const auto& stencil = rule_.stencil();
        if (rule_.kind() == RuleKind::modified) {
            std::fill(acc_.begin(), acc_.end(), ~Word{0});
            for (std::size_t i = 0; i + 1 < stencil.size(); i += 2) {
                shifted_row(cur, y, z, stencil[i], shifted_.data());
                shifted_row(cur, y, z, stencil[i + 1], extra_.data());
                for (std::int64_t w = 0; w < wpr_; ++w) acc_[w] &= shifted_[w] | extra_[w];
            }
            return;
        }
        std::fill(planes_.begin(), planes_.end(), Word{0});
        for (const Coord& off : stencil) {
            shifted_row(cur, y, z, off, shifted_.data());
            for (std::int64_t w = 0; w < wpr_; ++w) {
                Word carry = shifted_[w];
                for (int k = 0; k < nbits_ && carry; ++k) {
                    Word& plane = planes_[static_cast<std::size_t>(k * wpr_ + w)];
                    const Word t = plane & carry;
                    plane ^= carry;
                    carry = t;
                }
            }
        }
        // count >= theta, evaluated most significant plane first.
        const unsigned theta = static_cast<unsigned>(rule_.theta());
        for (std::int64_t w = 0; w < wpr_; ++w) {
            Word gt = 0, eq = ~Word{0};
            for (int k = nbits_ - 1; k >= 0; --k) {
                const Word plane = planes_[static_cast<std::size_t>(k * wpr_ + w)];
                if ((theta >> k) & 1U) {
                    eq &= plane;
                } else {
                    gt |= eq & plane;
                    eq &= ~plane;
                }
            }
            acc_[w] = gt | eq;
        }
    }

    GridSpec grid_;
    Rule rule_;
    std::int64_t wpr_;
    int nbits_ = 1;
    Word tail_ = ~Word{0};
    std::vector<Word> planes_, shifted_, extra_, acc_;
};

struct StepResult {
    Configuration next;
    std::int64_t changed = 0;
};

inline StepResult step(const Configuration& cfg, const Rule& rule) {
    require_matching_dimension(cfg, rule);
    StepKernel kernel(cfg.grid(), rule);
    StepResult out{Configuration(cfg.grid()), 0};
    out.changed = kernel.step(cfg, out.next);
    return out;
}

/// Fixed point of repeated synchronous steps.
inline Configuration closure_naive(const Configuration& cfg, const Rule& rule) {
    require_matching_dimension(cfg, rule);
    StepKernel kernel(cfg.grid(), rule);
    Configuration cur = cfg, next(cfg.grid());
    while (kernel.step(cur, next) != 0) std::swap(cur, next);
    return cur;
}

inline bool is_stable(const Configuration& cfg, const Rule& rule) { return step(cfg, rule).changed == 0; }

struct ClosureStats {
    std::int64_t enqueued = 0;   // cells pushed (initially occupied + newly filled)
    std::int64_t processed = 0;  // cells popped; each cell at most once
};

/// Queue closure. Keeps, for every empty cell, its occupied-neighbour count
/// (threshold kind) or satisfied-axis flags (modified kind). Filling a cell
/// updates the cells whose stencil contains it and enqueues those that reach
/// the predicate. Work is O(cells * stencil size). Holds its buffers between
/// calls, so one instance can be reused for many configurations on a grid.
class QueueClosure {
public:
    QueueClosure(const GridSpec& grid, const Rule& rule) : grid_(grid), rule_(rule) {
        if (grid.dimension() != rule.dimension())
            throw std::domain_error("rule dimension does not match grid dimension");
        for (const Coord& o : rule.stencil()) {
            reverse_.push_back({-o[0], -o[1], -o[2]});
            axis_bit_.push_back(static_cast<std::uint16_t>(1U << Rule::axis_of(o)));
        }
        full_axes_ = static_cast<std::uint16_t>((1U << rule.dimension()) - 1);
    }

    Configuration run(const Configuration& cfg, ClosureStats* stats = nullptr) {
        const auto n = static_cast<std::size_t>(grid_.cell_count());
        occupied_.assign(n, 0);
        state_.assign(n, 0);
        queue_.clear();

        const std::int64_t width = grid_.extent(0);
        for (std::int64_t r = 0; r < grid_.row_count(); ++r) {
            const Configuration::Word* line = cfg.row(r);
            for (std::int64_t w = 0; w < cfg.words_per_row(); ++w) {
                for (Configuration::Word bits = line[w]; bits; bits &= bits - 1) {
                    const std::int64_t i = r * width + w * 64 + std::countr_zero(bits);
                    occupied_[static_cast<std::size_t>(i)] = 1;
                    queue_.push_back(i);
                }
            }
        }

        const bool periodic = grid_.boundary() == Boundary::periodic;
        const bool modified = rule_.kind() == RuleKind::modified;
        const auto threshold = static_cast<std::uint16_t>(rule_.theta());
        const Coord& ext = grid_.extents();
        for (std::size_t head = 0; head < queue_.size(); ++head) {
            const std::int64_t i = queue_[head];
            const Coord c = grid_.coord(i);
            for (std::size_t k = 0; k < reverse_.size(); ++k) {
                Coord q{c[0] + reverse_[k][0], c[1] + reverse_[k][1], c[2] + reverse_[k][2]};
                bool inside = true;
                for (int a = 0; a < 3; ++a) {
                    if (q[a] >= 0 && q[a] < ext[a]) continue;
                    if (!periodic) {
                        inside = false;
                        break;
                    }
                    q[a] = floor_mod(q[a], ext[a]);
                }
                if (!inside) continue;
                const auto qi = static_cast<std::size_t>(grid_.index(q));
                if (occupied_[qi]) continue;
                bool fire;
                if (modified) {
                    state_[qi] |= axis_bit_[k];
                    fire = state_[qi] == full_axes_;
                } else {
                    fire = ++state_[qi] >= threshold;
                }
                if (fire) {
                    occupied_[qi] = 1;
                    queue_.push_back(static_cast<std::int64_t>(qi));
                }
            }
        }
        if (stats) {
            stats->enqueued = static_cast<std::int64_t>(queue_.size());
            stats->processed = static_cast<std::int64_t>(queue_.size());
        }

        Configuration out(grid_);
        for (std::int64_t i : queue_) {
            const std::int64_t r = i / width, x = i % width;
            out.row(r)[x / 64] |= Configuration::Word{1} << (x % 64);
        }
        return out;
    }

private:
    GridSpec grid_;
    Rule rule_;
    std::vector<Coord> reverse_;
    std::vector<std::uint16_t> axis_bit_;
    std::uint16_t full_axes_ = 0;
    std::vector<std::uint8_t> occupied_;
    std::vector<std::uint16_t> state_;
    std::vector<std::int64_t> queue_;
};

inline Configuration closure_fast(const Configuration& cfg, const Rule& rule, ClosureStats* stats = nullptr) {
    require_matching_dimension(cfg, rule);
    return QueueClosure(cfg.grid(), rule).run(cfg, stats);
}

}  // namespace bootgrid
