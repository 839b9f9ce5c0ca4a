#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace bootgrid {

/// Thrown for operations that are well-formed but not defined for the
/// given lattice (e.g. a 2D-only seed on a 3D grid).
class unsupported_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class Boundary { open, periodic };

inline std::string_view to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

inline Boundary parse_boundary(std::string_view s) {
    if (s == "open") return Boundary::open;
    if (s == "periodic") return Boundary::periodic;
    throw std::invalid_argument("unknown boundary '" + std::string(s) + "' (expected open|periodic)");
}

/// Lattice coordinate or extent. Unused trailing axes hold 0 (coordinates)
/// or 1 (extents).
using Coord = std::array<std::int64_t, 3>;

constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t m) noexcept {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

class GridSpec {
public:
    static constexpr std::int64_t kMaxCells = std::int64_t{1} << 40;

    GridSpec(std::vector<std::int64_t> dims, Boundary boundary = Boundary::open)
        : boundary_(boundary) {
        if (dims.empty() || dims.size() > 3)
            throw std::domain_error("grid dimension must be 1, 2 or 3");
        dimension_ = static_cast<int>(dims.size());
        std::int64_t cells = 1;
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (dims[i] < 1) throw std::domain_error("grid side lengths must be >= 1");
            if (cells > kMaxCells / dims[i]) throw std::domain_error("grid exceeds 2^40 cells");
            cells *= dims[i];
            extents_[i] = dims[i];
        }
        cells_ = cells;
    }

    static GridSpec square(std::int64_t side, int dimension, Boundary boundary = Boundary::open) {
        return GridSpec(std::vector<std::int64_t>(static_cast<std::size_t>(dimension), side), boundary);
    }

    int dimension() const noexcept { return dimension_; }
    Boundary boundary() const noexcept { return boundary_; }
    std::int64_t cell_count() const noexcept { return cells_; }
    std::int64_t extent(int axis) const noexcept { return extents_[static_cast<std::size_t>(axis)]; }
    const Coord& extents() const noexcept { return extents_; }

    std::vector<std::int64_t> dims() const {
        return {extents_.begin(), extents_.begin() + dimension_};
    }

    /// Number of x-lines (rows) across all y and z.
    std::int64_t row_count() const noexcept { return extents_[1] * extents_[2]; }

    bool contains(const Coord& c) const noexcept {
        for (int a = 0; a < 3; ++a)
            if (c[a] < 0 || c[a] >= extents_[a]) return false;
        return true;
    }

    /// Row-major, x fastest.
    std::int64_t index(const Coord& c) const noexcept {
        return c[0] + extents_[0] * (c[1] + extents_[1] * c[2]);
    }

    Coord coord(std::int64_t i) const noexcept {
        const std::int64_t x = i % extents_[0];
        i /= extents_[0];
        return {x, i % extents_[1], i / extents_[1]};
    }

    /// "32x32" style label.
    std::string label() const {
        std::string s;
        for (int a = 0; a < dimension_; ++a) {
            if (a) s += 'x';
            s += std::to_string(extents_[a]);
        }
        return s;
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    Coord extents_{1, 1, 1};
    std::int64_t cells_ = 1;
    int dimension_ = 1;
    Boundary boundary_ = Boundary::open;
};

/// Axis-aligned box given by its minimal corner and positive extents.
struct Rect {
    Coord corner{0, 0, 0};
    Coord extents{1, 1, 1};

    std::int64_t cell_count() const noexcept { return extents[0] * extents[1] * extents[2]; }

    bool within(const GridSpec& g) const noexcept {
        for (int a = 0; a < 3; ++a) {
            if (extents[a] < 1 || corner[a] < 0 || corner[a] + extents[a] > g.extent(a)) return false;
        }
        return true;
    }
};

/// One bit per cell. Each x-line is padded to whole 64-bit words and the
/// padding bits are kept zero, so lines can be shifted and combined with
/// plain word operations.
class Configuration {
public:
    using Word = std::uint64_t;
    static constexpr int kWordBits = 64;

    explicit Configuration(GridSpec grid)
        : grid_(std::move(grid)),
          words_per_row_((grid_.extent(0) + kWordBits - 1) / kWordBits),
          words_(static_cast<std::size_t>(words_per_row_ * grid_.row_count()), Word{0}) {}

    const GridSpec& grid() const noexcept { return grid_; }
    std::int64_t words_per_row() const noexcept { return words_per_row_; }

    bool get(const Coord& c) const noexcept { return get_in_row(row_of(c), c[0]); }
    bool get(std::int64_t i) const noexcept { return get(grid_.coord(i)); }

    void set(const Coord& c, bool value = true) noexcept {
        Word& w = words_[static_cast<std::size_t>(row_of(c) * words_per_row_ + c[0] / kWordBits)];
        const Word bit = Word{1} << (c[0] % kWordBits);
        w = value ? (w | bit) : (w & ~bit);
    }
    void set(std::int64_t i, bool value = true) noexcept { set(grid_.coord(i), value); }

    std::int64_t count_occupied() const noexcept {
        std::int64_t n = 0;
        for (Word w : words_) n += std::popcount(w);
        return n;
    }

    bool is_full() const noexcept { return count_occupied() == grid_.cell_count(); }
    bool is_empty() const noexcept {
        return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
    }

    /// Every occupied cell of *this is occupied in `other`.
    bool subset_of(const Configuration& other) const {
        require_same_grid(other);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~other.words_[i]) return false;
        return true;
    }

    Configuration& operator|=(const Configuration& other) {
        require_same_grid(other);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
        return *this;
    }

    void clear() noexcept { std::fill(words_.begin(), words_.end(), Word{0}); }

    /// Mask of valid bits in the last word of every row.
    Word tail_mask() const noexcept {
        const std::int64_t r = grid_.extent(0) % kWordBits;
        return r == 0 ? ~Word{0} : (Word{1} << r) - 1;
    }

    const Word* row(std::int64_t r) const noexcept { return words_.data() + r * words_per_row_; }
    Word* row(std::int64_t r) noexcept { return words_.data() + r * words_per_row_; }

    const std::vector<Word>& words() const noexcept { return words_; }

    friend bool operator==(const Configuration& a, const Configuration& b) {
        return a.grid_ == b.grid_ && a.words_ == b.words_;
    }

private:
    std::int64_t row_of(const Coord& c) const noexcept { return c[1] + grid_.extent(1) * c[2]; }

    bool get_in_row(std::int64_t r, std::int64_t x) const noexcept {
        return (words_[static_cast<std::size_t>(r * words_per_row_ + x / kWordBits)] >> (x % kWordBits)) & 1U;
    }

    void require_same_grid(const Configuration& other) const {
        if (!(grid_ == other.grid_)) throw std::domain_error("configurations live on different grids");
    }

    GridSpec grid_;
    std::int64_t words_per_row_;
    std::vector<Word> words_;
};

/// Each cell occupied independently with probability p, drawing exactly one
/// 64-bit uniform per cell in row-major order. The draw count does not depend
/// on p, so two calls with equal stream state and p1 <= p2 give nested
/// configurations.
inline Configuration random_configuration(const GridSpec& grid, double p, Stream& stream) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("occupation probability must lie in [0,1]");
    Configuration cfg(grid);
    const BernoulliThreshold occupied(p);
    const std::int64_t width = grid.extent(0);
    for (std::int64_t r = 0; r < grid.row_count(); ++r) {
        Configuration::Word* line = cfg.row(r);
        for (std::int64_t x = 0; x < width; ++x) {
            if (occupied(stream())) line[x / 64] |= Configuration::Word{1} << (x % 64);
        }
    }
    return cfg;
}

inline Configuration random_configuration(const GridSpec& grid, double p, std::uint64_t seed) {
    Stream s(seed);
    return random_configuration(grid, p, s);
}

inline void occupy_rect(Configuration& cfg, const Rect& r) {
    if (!r.within(cfg.grid())) throw std::domain_error("rectangle lies outside the grid");
    for (std::int64_t z = r.corner[2]; z < r.corner[2] + r.extents[2]; ++z)
        for (std::int64_t y = r.corner[1]; y < r.corner[1] + r.extents[1]; ++y)
            for (std::int64_t x = r.corner[0]; x < r.corner[0] + r.extents[0]; ++x) cfg.set({x, y, z});
}

enum class Parity { even = 0, odd = 1 };

/// Occupies the cells (x, y) of r with (x + y) mod 2 equal to `parity`.
inline void checkerboard_rect(Configuration& cfg, const Rect& r, Parity parity) {
    if (cfg.grid().dimension() != 2) throw unsupported_error("checkerboard seeds are defined on 2D grids only");
    if (!r.within(cfg.grid())) throw std::domain_error("rectangle lies outside the grid");
    const std::int64_t want = static_cast<std::int64_t>(parity);
    for (std::int64_t y = r.corner[1]; y < r.corner[1] + r.extents[1]; ++y)
        for (std::int64_t x = r.corner[0]; x < r.corner[0] + r.extents[0]; ++x)
            if ((x + y) % 2 == want) cfg.set({x, y, 0});
}

/// Moves every occupied cell by `shift`. Periodic grids wrap; on open grids
/// cells leaving the grid are dropped.
inline Configuration translate(const Configuration& cfg, const Coord& shift) {
    const GridSpec& g = cfg.grid();
    Configuration out(g);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        if (!cfg.get(i)) continue;
        Coord c = g.coord(i);
        for (int a = 0; a < 3; ++a) c[a] += shift[a];
        if (g.boundary() == Boundary::periodic) {
            for (int a = 0; a < 3; ++a) c[a] = floor_mod(c[a], g.extent(a));
        } else if (!g.contains(c)) {
            continue;
        }
        out.set(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text format:
//   dims: L1 [L2 [L3]]
//   boundary: open|periodic
//   one line of '0'/'1' per x-line, y ascending; z-blocks separated by a blank line.
// Lines starting with '#' before the header are ignored.

inline void write_text(std::ostream& os, const Configuration& cfg) {
    const GridSpec& g = cfg.grid();
    os << "dims:";
    for (auto d : g.dims()) os << ' ' << d;
    os << "\nboundary: " << to_string(g.boundary()) << '\n';
    std::string line(static_cast<std::size_t>(g.extent(0)), '0');
    for (std::int64_t z = 0; z < g.extent(2); ++z) {
        if (z) os << '\n';
        for (std::int64_t y = 0; y < g.extent(1); ++y) {
            for (std::int64_t x = 0; x < g.extent(0); ++x) line[static_cast<std::size_t>(x)] = cfg.get({x, y, z}) ? '1' : '0';
            os << line << '\n';
        }
    }
}

inline std::string to_text(const Configuration& cfg) {
    std::ostringstream os;
    write_text(os, cfg);
    return os.str();
}

inline Configuration read_text(std::istream& is) {
    std::string line;
    auto next_line = [&](bool skip_comments) {
        while (std::getline(is, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (skip_comments && !line.empty() && line.front() == '#') continue;
            return true;
        }
        return false;
    };
    auto fail = [](const std::string& what) -> Configuration { throw std::invalid_argument("configuration text: " + what); };

    if (!next_line(true) || line.rfind("dims:", 0) != 0) return fail("missing 'dims:' header");
    std::vector<std::int64_t> dims;
    {
        std::istringstream hs(line.substr(5));
        std::int64_t d;
        while (hs >> d) dims.push_back(d);
        if (!hs.eof()) return fail("malformed 'dims:' header");
    }
    if (!next_line(false) || line.rfind("boundary:", 0) != 0) return fail("missing 'boundary:' header");
    std::string b = line.substr(9);
    b.erase(0, b.find_first_not_of(' '));
    Configuration cfg(GridSpec(dims, parse_boundary(b)));
    const GridSpec& g = cfg.grid();

    for (std::int64_t z = 0; z < g.extent(2); ++z) {
        if (z && (!next_line(false) || !line.empty())) return fail("expected blank line between z-blocks");
        for (std::int64_t y = 0; y < g.extent(1); ++y) {
            if (!next_line(false)) return fail("unexpected end of input");
            if (static_cast<std::int64_t>(line.size()) != g.extent(0)) return fail("row has wrong length");
            for (std::int64_t x = 0; x < g.extent(0); ++x) {
                const char ch = line[static_cast<std::size_t>(x)];
                if (ch != '0' && ch != '1') return fail("rows may contain only '0' and '1'");
                if (ch == '1') cfg.set({x, y, z});
            }
        }
    }
    while (next_line(false))
        if (!line.empty()) return fail("trailing data after last row");
    return cfg;
}

inline Configuration from_text(std::string_view text) {
    std::istringstream is{std::string(text)};
    return read_text(is);
}

}  // namespace bootgrid
