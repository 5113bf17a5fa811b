#ifndef P3T_SPARSEGRID_HPP
#define P3T_SPARSEGRID_HPP

// Sparse grid construction and the point-hitting primitives built on it.
//
// The grid lives on a (14N+1) x (14N+1) section of the integer lattice and
// keeps the points (x,y) with 2^q | x*y, plus length-2^q diagonal runs of
// slope +1 ("forward") and -1 ("backward") anchored at points whose
// coordinates are both multiples of 2^q.  Membership is evaluated through
// congruences with explicit anchor-feasibility checks at the boundary; the
// definitional enumeration is kept in the test suite as an oracle.

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "p3t/common.hpp"

namespace p3t {

struct GridParams {
    std::int64_t n_input = 0;   // requested vertex count
    std::int64_t n_eff = 0;     // smallest power of 4 >= n_input
    int q = 0;                  // n_eff^(1/2) == 2^q
    std::int64_t side = 0;      // 14 * n_eff, max coordinate
    std::int64_t init_side = 0; // 10 * n_eff, initial embedding box
    std::int64_t stretch_base = 0; // 28 * n_eff

    std::int64_t spacing() const { return std::int64_t{1} << q; }
    std::int64_t mask() const { return spacing() - 1; }
};

struct GridPoint {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
    friend auto operator<=>(const GridPoint&, const GridPoint&) = default;
};

// Image of a grid point under (x, y) -> (x, (28*n_eff)^y).
struct StretchedPoint {
    std::int64_t x = 0;
    BigInt y;
};

// Open axis-aligned rectangle (x1,x2) x (y1,y2) with integer bounds.
struct OpenRect {
    std::int64_t x1 = 0, x2 = 0, y1 = 0, y2 = 0;

    std::int64_t width() const { return x2 - x1; }
    std::int64_t height() const { return y2 - y1; }
    std::int64_t area() const { return width() * height(); }
    bool valid() const { return x1 < x2 && y1 < y2; }
    bool contains_point(GridPoint p) const {
        return p.x > x1 && p.x < x2 && p.y > y1 && p.y < y2;
    }
    bool contains_rect(const OpenRect& r) const {
        return r.x1 >= x1 && r.x2 <= x2 && r.y1 >= y1 && r.y2 <= y2;
    }
    friend bool operator==(const OpenRect&, const OpenRect&) = default;
};

inline GridParams make_params(std::int64_t n) {
    if (n < 3) throw PreconditionError("make_params: n must be >= 3");
    GridParams g;
    g.n_input = n;
    g.n_eff = 4;
    g.q = 1;
    while (g.n_eff < n) {
        g.n_eff *= 4;
        g.q += 1;
    }
    g.side = 14 * g.n_eff;
    g.init_side = 10 * g.n_eff;
    g.stretch_base = 28 * g.n_eff;
    return g;
}

// One escalation step: the next grid in the power-of-four family.
inline GridParams escalate(const GridParams& g) {
    GridParams out = g;
    out.n_eff *= 4;
    out.q += 1;
    out.side = 14 * out.n_eff;
    out.init_side = 10 * out.n_eff;
    out.stretch_base = 28 * out.n_eff;
    return out;
}

inline bool in_bounds(GridPoint p, const GridParams& g) {
    return p.x >= 0 && p.x <= g.side && p.y >= 0 && p.y <= g.side;
}

// Forward diagonal member: (i+k, j+k) with 2^q | i, 2^q | j, k in [1, 2^q],
// anchor (i, j) inside the lattice section.  Reduces to x == y (mod 2^q)
// with x, y >= 1.
inline bool on_forward_diagonal(GridPoint p, const GridParams& g) {
    if (!in_bounds(p, g) || p.x < 1 || p.y < 1) return false;
    return ((p.x ^ p.y) & g.mask()) == 0;
}

// Backward diagonal member: (i+k, j-k) likewise; x + y == 0 (mod 2^q) with
// x >= 1 and anchor row j = y + k within the section.
inline bool on_backward_diagonal(GridPoint p, const GridParams& g) {
    if (!in_bounds(p, g) || p.x < 1) return false;
    if (((p.x + p.y) & g.mask()) != 0) return false;
    std::int64_t k = ((p.x - 1) & g.mask()) + 1;
    return p.y + k <= g.side;
}

inline bool contains(GridPoint p, const GridParams& g) {
    if (!in_bounds(p, g))
        throw PreconditionError("contains: point outside [0, side]^2");
    if (((p.x * p.y) & g.mask()) == 0) return true;
    if ((p.x & g.mask()) == (p.y & g.mask()) && p.x >= 1 && p.y >= 1) return true;
    return on_backward_diagonal(p, g);
}

// Exact |B_n| by counting whole residue classes per row; matches the
// definitional enumeration (checked against the oracle in tests).
inline std::int64_t count_points(const GridParams& g) {
    const std::int64_t m = g.spacing();
    const std::int64_t per_class = g.side / m; // side is a multiple of 2^q
    std::int64_t total = 0;
    for (std::int64_t y = 0; y <= g.side; ++y) {
        for (std::int64_t r = 0; r < m; ++r) {
            bool member = ((r * y) & g.mask()) == 0;
            if (!member && r >= 1) {
                if (y >= 1 && (y & g.mask()) == r) member = true;
                if (!member && ((r + y) & g.mask()) == 0) {
                    std::int64_t k = ((r - 1) & g.mask()) + 1;
                    member = y + k <= g.side;
                }
            }
            if (member) total += per_class + (r == 0 ? 1 : 0);
        }
    }
    return total;
}

namespace detail {
// Count of multiples of s strictly inside (a, b).
inline std::int64_t multiples_in_open(std::int64_t s, std::int64_t a, std::int64_t b) {
    if (b - a < 2) return 0;
    return (b - 1) / s - a / s;
}

inline std::int64_t first_multiple_above(std::int64_t s, std::int64_t a) {
    return (a / s + 1) * s;
}

// Largest k >= 0 with 2^k < v, or -1 when v <= 1.
inline int floor_log2_below(std::int64_t v) {
    if (v <= 1) return -1;
    return std::bit_width(static_cast<std::uint64_t>(v - 1)) - 1;
}
}  // namespace detail

// Constructive point of B_n strictly inside r, following the row/column
// construction: take the largest 2^k < w(r) and 2^l < h(r); the first
// multiple-of-2^k column and multiple-of-2^l row intersect inside r and the
// product is divisible by 2^(k+l), k+l >= q.
inline GridPoint point_in_rect(const OpenRect& r, const GridParams& g) {
    if (!r.valid() || r.x1 < 0 || r.y1 < 0 || r.x2 > g.side || r.y2 > g.side)
        throw PreconditionError("point_in_rect: rectangle not inside the grid section");
    if (r.width() <= 1 || r.height() <= 1 || r.area() < 4 * g.spacing())
        throw PreconditionError("point_in_rect: rectangle below the density threshold");
    int k = detail::floor_log2_below(r.width());
    int l = detail::floor_log2_below(r.height());
    GridPoint p{detail::first_multiple_above(std::int64_t{1} << k, r.x1),
                detail::first_multiple_above(std::int64_t{1} << l, r.y1)};
    if (!r.contains_point(p) || k + l < g.q || !contains(p, g))
        throw InvariantViolation(-1, "point_in_rect construction left the rectangle");
    return p;
}

enum class Diagonal { Forward, Backward };

namespace detail {
// Lowest, then leftmost point of the requested diagonal class strictly
// inside r.  Every row y < 14N admits feasible backward points of the
// matching residue, so scanning 2^q + 2 rows from the bottom suffices
// whenever the rectangle satisfies the density precondition.
inline std::optional<GridPoint> find_diagonal_point(const OpenRect& r, Diagonal dir,
                                                    const GridParams& g) {
    const std::int64_t m = g.spacing();
    const std::int64_t y_stop = std::min(r.y2 - 1, r.y1 + 2 * m + 2);
    for (std::int64_t y = r.y1 + 1; y <= y_stop; ++y) {
        std::int64_t t = dir == Diagonal::Forward ? (y & g.mask()) : ((m - (y & g.mask())) & g.mask());
        std::int64_t x = r.x1 + 1 + ((t - ((r.x1 + 1) & g.mask())) & g.mask());
        if (x >= r.x2) continue;
        GridPoint p{x, y};
        if (dir == Diagonal::Forward ? on_forward_diagonal(p, g) : on_backward_diagonal(p, g))
            return p;
    }
    return std::nullopt;
}
}  // namespace detail

inline GridPoint diagonal_point_in_rect(const OpenRect& r, Diagonal dir, const GridParams& g) {
    if (!r.valid() || r.x1 < 0 || r.y1 < 0 || r.x2 > g.side || r.y2 > g.side)
        throw PreconditionError("diagonal_point_in_rect: rectangle not inside the grid section");
    bool wide = r.width() > g.spacing() && r.height() > 1;
    bool tall = r.height() > g.spacing() && r.width() > 1;
    if (!wide && !tall)
        throw PreconditionError("diagonal_point_in_rect: rectangle below the diagonal threshold");
    auto p = detail::find_diagonal_point(r, dir, g);
    if (!p) throw InvariantViolation(-1, "diagonal_point_in_rect found no point");
    return *p;
}

struct CrossProduct {
    int k = 0;                      // X spacing 2^k, Y spacing 2^(q-k)
    std::vector<std::int64_t> xs;   // sorted multiples of 2^k inside r
    std::vector<std::int64_t> ys;   // sorted multiples of 2^(q-k) inside r
};

namespace detail {
inline std::optional<CrossProduct> try_cross_product(const OpenRect& r, std::int64_t m,
                                                     const GridParams& g) {
    auto valid_k = [&](int k) {
        std::int64_t sx = std::int64_t{1} << k;
        std::int64_t sy = std::int64_t{1} << (g.q - k);
        return multiples_in_open(sx, r.x1, r.x2) >= 2 * m &&
               multiples_in_open(sy, r.y1, r.y2) >= m;
    };
    int k = -1;
    int k0 = floor_log2_below((r.width() - 1) / (2 * m) + 1);
    if (k0 >= 0 && valid_k(std::min(k0, g.q))) {
        k = std::min(k0, g.q);
    } else {
        for (int c = 0; c <= g.q && k < 0; ++c)
            if (valid_k(c)) k = c;
    }
    if (k < 0) return std::nullopt;
    CrossProduct cp;
    cp.k = k;
    std::int64_t sx = std::int64_t{1} << k;
    std::int64_t sy = std::int64_t{1} << (g.q - k);
    for (std::int64_t x = first_multiple_above(sx, r.x1); x < r.x2; x += sx) cp.xs.push_back(x);
    for (std::int64_t y = first_multiple_above(sy, r.y1); y < r.y2; y += sy) cp.ys.push_back(y);
    return cp;
}
}  // namespace detail

// Cross product X x Y inside B_n with |X| >= 2m and |Y| >= m; X are
// multiples of 2^k and Y multiples of 2^(q-k), so every pair lands in B_n.
inline CrossProduct cross_product_in_rect(const OpenRect& r, std::int64_t m,
                                          const GridParams& g) {
    if (!r.valid() || m < 1)
        throw PreconditionError("cross_product_in_rect: bad arguments");
    auto cp = detail::try_cross_product(r, m, g);
    if (!cp) throw PreconditionError("cross_product_in_rect: no k admits the split");
    return *cp;
}

inline BigInt stretch_power(std::int64_t y, const GridParams& g) {
    BigInt b = g.stretch_base;
    BigInt out = 1;
    std::int64_t e = y;
    while (e > 0) {
        if (e & 1) out *= b;
        b *= b;
        e >>= 1;
    }
    return out;
}

inline StretchedPoint stretch(GridPoint p, const GridParams& g) {
    if (!in_bounds(p, g)) throw PreconditionError("stretch: point outside the grid section");
    return StretchedPoint{p.x, stretch_power(p.y, g)};
}

// Memoized powers of the stretch base; verification touches the same
// exponents many times.  Only requested exponents are kept, each derived
// from the nearest smaller cached one.
class StretchTable {
  public:
    explicit StretchTable(const GridParams& g) : g_(g) { cache_.emplace(0, BigInt(1)); }

    const BigInt& power(std::int64_t y) {
        if (y < 0) throw PreconditionError("StretchTable: negative exponent");
        auto it = cache_.lower_bound(y);
        if (it != cache_.end() && it->first == y) return it->second;
        --it; // the {0 -> 1} sentinel guarantees a predecessor
        BigInt val = it->second * stretch_power(y - it->first, g_);
        return cache_.emplace(y, std::move(val)).first->second;
    }

    StretchedPoint operator()(GridPoint p) { return StretchedPoint{p.x, power(p.y)}; }

    const GridParams& params() const { return g_; }

  private:
    GridParams g_;
    std::map<std::int64_t, BigInt> cache_;
};

}  // namespace p3t

#endif
