#ifndef P3T_EMBEDDER_HPP
#define P3T_EMBEDDER_HPP

// Embedding driver: breadth-first traversal of the face tree maintaining
//
//   I1  R(node) inside the open box spanned by the node's drawn triangle,
//   I2  for weight >= 2^q, the lower-left corner of R(node) on a forward
//       diagonal and the lower-right corner on a backward diagonal,
//   I3  area(R) >= 100 * n_eff * weight, or the fringe inequalities hold.
//
// A node whose rectangle admits a cross product for m = weight + 3 is
// finished wholesale by the canonical-ordering shift method composed into
// the stretched cross product; otherwise the node's vertex is placed by one
// of the split cases and the children inherit rectangles.  All failures
// raise InvariantViolation and the driver retries on the next larger grid.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "p3t/common.hpp"
#include "p3t/embedding.hpp"
#include "p3t/exactgeom.hpp"
#include "p3t/sparsegrid.hpp"
#include "p3t/tritree.hpp"

namespace p3t {

enum class CutAxis { Vertical, Horizontal }; // orientation of the cut line

struct RatioCut {
    CutAxis axis = CutAxis::Vertical;
    Rational position; // x for vertical lines, y for horizontal lines
};

struct ShiftEvent {
    CutAxis axis = CutAxis::Vertical;
    Rational threshold;
    std::int64_t amount = 0;
};

struct EmbedState {
    GridParams params;
    FaceTree ft;
    std::vector<GridPoint> placed;
    std::vector<char> is_placed;
    std::vector<OpenRect> rects;
    std::vector<char> rect_active;
    std::vector<int> queue;
    std::size_t queue_head = 0;
    std::vector<ShiftEvent> shift_log;
    int n = 0;
};

struct EscalationExhausted : std::runtime_error {
    int attempts;
    explicit EscalationExhausted(int attempts_)
        : std::runtime_error("embedding failed after " + std::to_string(attempts_) +
                             " grid escalations"),
          attempts(attempts_) {}
};

namespace detail {

inline std::int64_t floor_rat(const Rational& r) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    BigInt q = num / den;
    if (num < 0 && q * den != num) --q;
    return q.convert_to<std::int64_t>();
}

inline std::int64_t ceil_rat(const Rational& r) { return -floor_rat(-r); }

// Smallest integer >= lo congruent to residue mod m.
inline std::int64_t align_up(const Rational& lo, std::int64_t residue, std::int64_t m) {
    std::int64_t x0 = ceil_rat(lo);
    return x0 + (((residue - x0) % m + m) % m);
}

// Largest integer <= hi congruent to residue mod m.
inline std::int64_t align_down(const Rational& hi, std::int64_t residue, std::int64_t m) {
    std::int64_t x0 = floor_rat(hi);
    return x0 - (((x0 - residue) % m + m) % m);
}

}  // namespace detail

inline EmbedState make_embed_state(const TriTree& t, const GridParams& g) {
    EmbedState st;
    st.params = g;
    st.ft = designate_hubs(build_face_tree(t), g);
    st.n = t.n;
    st.placed.resize(static_cast<std::size_t>(t.n));
    st.is_placed.assign(static_cast<std::size_t>(t.n), 0);
    st.rects.resize(st.ft.nodes.size());
    st.rect_active.assign(st.ft.nodes.size(), 0);
    return st;
}

// Vertex that subdivides this (internal) node: the top of its bottom child.
inline int split_vertex(const EmbedState& st, int node) {
    const FaceNode& nd = st.ft.nodes[static_cast<std::size_t>(node)];
    return st.ft.nodes[static_cast<std::size_t>(nd.children[0])].v_top;
}

// Open box spanned by the node's drawn triangle: the lower vertices' x-range
// up to the top vertex.
inline OpenRect box_of(const EmbedState& st, int node) {
    const FaceNode& nd = st.ft.nodes[static_cast<std::size_t>(node)];
    for (int v : {nd.v_left, nd.v_right, nd.v_top})
        if (!st.is_placed[static_cast<std::size_t>(v)])
            throw InvariantViolation(node, "box requested before triangle placed");
    const GridPoint pl = st.placed[static_cast<std::size_t>(nd.v_left)];
    const GridPoint pr = st.placed[static_cast<std::size_t>(nd.v_right)];
    const GridPoint pt = st.placed[static_cast<std::size_t>(nd.v_top)];
    if (!(pl.x < pr.x) || pt.y <= std::max(pl.y, pr.y))
        throw InvariantViolation(node, "triangle lost its left/right/top geometry");
    return OpenRect{pl.x, pr.x, std::max(pl.y, pr.y), pt.y};
}

inline void apply_shift(EmbedState& st, CutAxis axis, const Rational& threshold,
                        std::int64_t amount) {
    for (int v = 0; v < st.n; ++v) {
        if (!st.is_placed[static_cast<std::size_t>(v)]) continue;
        GridPoint& p = st.placed[static_cast<std::size_t>(v)];
        std::int64_t& c = axis == CutAxis::Vertical ? p.x : p.y;
        if (Rational(c) >= threshold) c += amount;
    }
    for (std::size_t i = 0; i < st.rects.size(); ++i) {
        if (!st.rect_active[i]) continue;
        OpenRect& r = st.rects[i];
        auto bump = [&](std::int64_t& c) {
            if (Rational(c) >= threshold) c += amount;
        };
        if (axis == CutAxis::Vertical) {
            bump(r.x1);
            bump(r.x2);
        } else {
            bump(r.y1);
            bump(r.y2);
        }
    }
    st.shift_log.push_back(ShiftEvent{axis, threshold, amount});
}

// Cut lines through the ideal vertex location: the horizontal line splits
// area top : bottom as (w2 + w3 + 2/3) : (w1 + 1/3); the vertical line
// splits the top part left : right as (w2 + 1/3) : (w3 + 1/3).
inline std::pair<RatioCut, RatioCut> ideal_cuts(const OpenRect& r, std::int64_t w1,
                                                std::int64_t w2, std::int64_t w3) {
    if (!r.valid()) throw PreconditionError("ideal_cuts: empty rectangle");
    Rational weight(3 * (w1 + w2 + w3) + 3, 3);
    Rational bottom_share = Rational(3 * w1 + 1, 3) / weight;
    Rational left_share = Rational(3 * w2 + 1, 3) / Rational(3 * (w2 + w3) + 2, 3);
    RatioCut ell_y{CutAxis::Horizontal, Rational(r.y1) + Rational(r.height()) * bottom_share};
    RatioCut ell_x{CutAxis::Vertical, Rational(r.x1) + Rational(r.width()) * left_share};
    return {ell_x, ell_y};
}

namespace detail {

inline bool raw_fringe_ineq(const OpenRect& r, std::int64_t w, const GridParams& g) {
    return r.area() > 8 * g.spacing() * w * w && r.width() > 2 * w && r.height() > w;
}

// Validate a child rectangle against I1-I3 and register it for processing.
inline void assign_child(EmbedState& st, int parent, int child, const OpenRect& r) {
    const FaceNode& nd = st.ft.nodes[static_cast<std::size_t>(child)];
    if (!r.valid()) throw InvariantViolation(parent, "child rectangle is empty");
    if (!box_of(st, child).contains_rect(r))
        throw InvariantViolation(parent, "I1: child rectangle escapes its box");
    const std::int64_t mask = st.params.mask();
    if (nd.weight >= st.params.spacing()) {
        if (((r.x1 ^ r.y1) & mask) != 0)
            throw InvariantViolation(parent, "I2: lower-left corner off the forward diagonal");
        if (((r.x2 + r.y1) & mask) != 0)
            throw InvariantViolation(parent, "I2: lower-right corner off the backward diagonal");
    }
    if (!(r.area() >= 100 * st.params.n_eff * nd.weight || raw_fringe_ineq(r, nd.weight, st.params)))
        throw InvariantViolation(parent, "I3: child rectangle too small");
    st.rects[static_cast<std::size_t>(child)] = r;
    if (nd.weight >= 1) {
        st.rect_active[static_cast<std::size_t>(child)] = 1;
        st.queue.push_back(child);
    }
}

inline void place_split_vertex(EmbedState& st, int node, GridPoint p) {
    int v = split_vertex(st, node);
    if (st.is_placed[static_cast<std::size_t>(v)])
        throw InvariantViolation(node, "vertex placed twice");
    if (!in_bounds(p, st.params) || !contains(p, st.params))
        throw InvariantViolation(node, "vertex left the sparse grid");
    if (!st.rects[static_cast<std::size_t>(node)].contains_point(p))
        throw InvariantViolation(node, "vertex outside its rectangle");
    if (!box_of(st, node).contains_point(p))
        throw InvariantViolation(node, "vertex outside its box");
    st.placed[static_cast<std::size_t>(v)] = p;
    st.is_placed[static_cast<std::size_t>(v)] = 1;
}

// 2-adic valuation capped at q; full rows (y with 2^q | y) behave as cap.
inline int val2_capped(std::int64_t y, int q) {
    if (y == 0) return q;
    int v = std::countr_zero(static_cast<std::uint64_t>(y));
    return v > q ? q : v;
}

enum class RowClass { Any, Forward, Backward };

// Lowest, then leftmost grid point of the requested class strictly inside
// the rational window (x1,x2) x (y1,y2).  Scans at most ~2*2^q rows; by the
// diagonal spacing argument that is enough whenever a point exists at all
// within reach of the diagonal spacing guarantees.
inline std::optional<GridPoint> lowest_leftmost_point(const GridParams& g, RowClass cls,
                                                      const Rational& x1, const Rational& x2,
                                                      const Rational& y1, const Rational& y2) {
    const std::int64_t sp = g.spacing();
    const std::int64_t mask = g.mask();
    const std::int64_t y_first = floor_rat(y1) + 1;
    const std::int64_t y_cap = y_first + 2 * sp + 2;
    for (std::int64_t y = y_first; Rational(y) < y2 && y <= y_cap && y <= g.side; ++y) {
        if (y < 0) continue;
        const std::int64_t x_start = floor_rat(x1) + 1;
        std::int64_t best = -1;
        auto consider = [&](std::int64_t x) {
            if (x < x_start || Rational(x) >= x2 || x > g.side) return;
            if (best < 0 || x < best) best = x;
        };
        if (cls == RowClass::Any) {
            std::int64_t s = std::int64_t{1} << (g.q - val2_capped(y, g.q));
            consider(((x_start + s - 1) / s) * s); // first multiple: x*y divisible
        }
        if (cls != RowClass::Backward && y >= 1) {
            std::int64_t r = y & mask;
            std::int64_t x = x_start + (((r - x_start) % sp + sp) % sp);
            if (x >= 1) consider(x);
        }
        if (cls != RowClass::Forward) {
            std::int64_t r = (sp - (y & mask)) & mask;
            std::int64_t x = x_start + (((r - x_start) % sp + sp) % sp);
            std::int64_t k = ((r - 1) & mask) + 1;
            if (x >= 1 && y + k <= g.side) consider(x);
        }
        if (best >= 0) return GridPoint{best, y};
    }
    return std::nullopt;
}

}  // namespace detail

// Operational fringe test: the rectangle holds a cross product large enough
// to finish the whole subtree (m = weight + 3 counts the triangle).
inline bool fringe_test(const EmbedState& st, int node) {
    if (!st.rect_active[static_cast<std::size_t>(node)]) return false;
    std::int64_t m = st.ft.nodes[static_cast<std::size_t>(node)].weight + 3;
    return detail::try_cross_product(st.rects[static_cast<std::size_t>(node)], m, st.params)
        .has_value();
}

namespace detail {

// --- canonical ordering by reverse leaf peeling -----------------------------
//
// Local ids: 0 = left outer, 1 = right outer, 2 = top outer, then interior
// vertices.  Returns the order v_1..v_m with order[0] = 0, order[1] = 1 and
// order[m-1] = 2; at every prefix the next vertex sees a consecutive contour
// interval, which the drawing pass asserts.
inline std::vector<int> canonical_order(int m, const std::vector<std::vector<int>>& adj,
                                        const std::vector<std::array<int, 3>>& faces) {
    std::vector<int> order(static_cast<std::size_t>(m), -1);
    order[0] = 0;
    order[1] = 1;
    if (m == 3) {
        order[2] = 2;
        return order;
    }
    std::vector<char> face_alive(faces.size(), 1);
    std::vector<std::vector<int>> vfaces(static_cast<std::size_t>(m));
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (int v : faces[f]) vfaces[static_cast<std::size_t>(v)].push_back(static_cast<int>(f));

    std::vector<int> nxt(static_cast<std::size_t>(m), -1), prv(static_cast<std::size_t>(m), -1);
    std::vector<char> on_contour(static_cast<std::size_t>(m), 0);
    nxt[0] = 2;
    nxt[2] = 1;
    prv[1] = 2;
    prv[2] = 0;
    on_contour[0] = on_contour[1] = on_contour[2] = 1;

    auto contour_degree = [&](int w) {
        int c = 0;
        for (int u : adj[static_cast<std::size_t>(w)]) c += on_contour[static_cast<std::size_t>(u)];
        return c;
    };

    for (int k = m - 1; k >= 2; --k) {
        int w = -1;
        if (k == m - 1) {
            w = 2; // the top outer vertex closes the order
        } else {
            for (int cand = nxt[0]; cand != 1; cand = nxt[static_cast<std::size_t>(cand)]) {
                if (contour_degree(cand) == 2 && (w < 0 || cand < w)) w = cand;
            }
        }
        if (w < 0 || contour_degree(w) != 2)
            throw std::logic_error("canonical_order: no chord-free contour vertex");
        order[static_cast<std::size_t>(k)] = w;
        if (k == 2) break;

        // fan walk: link of w between its contour neighbours
        int cl = prv[static_cast<std::size_t>(w)], cr = nxt[static_cast<std::size_t>(w)];
        std::vector<std::array<int, 2>> lnk(static_cast<std::size_t>(m), {-1, -1});
        auto lnk_add = [&](int a, int b) {
            auto& s = lnk[static_cast<std::size_t>(a)];
            if (s[0] < 0)
                s[0] = b;
            else
                s[1] = b;
        };
        for (int f : vfaces[static_cast<std::size_t>(w)]) {
            if (!face_alive[static_cast<std::size_t>(f)]) continue;
            std::array<int, 2> others{};
            int c = 0;
            for (int v : faces[static_cast<std::size_t>(f)])
                if (v != w) others[static_cast<std::size_t>(c++)] = v;
            lnk_add(others[0], others[1]);
            lnk_add(others[1], others[0]);
            face_alive[static_cast<std::size_t>(f)] = 0;
        }
        int cur = cl, prev = -1, at = cl;
        while (cur != cr) {
            auto& s = lnk[static_cast<std::size_t>(cur)];
            int step = (s[0] != prev && s[0] >= 0) ? s[0] : s[1];
            if (step < 0) throw std::logic_error("canonical_order: broken link fan");
            prev = cur;
            cur = step;
            if (cur != cr) {
                nxt[static_cast<std::size_t>(at)] = cur;
                prv[static_cast<std::size_t>(cur)] = at;
                on_contour[static_cast<std::size_t>(cur)] = 1;
                at = cur;
            }
        }
        nxt[static_cast<std::size_t>(at)] = cr;
        prv[static_cast<std::size_t>(cr)] = at;
        on_contour[static_cast<std::size_t>(w)] = 0;
    }
    return order;
}

// --- shift-method drawing on the abstract grid ------------------------------
//
// Classic incremental drawing: contour edges keep slopes +-1, installing a
// vertex shifts the strict interior of its interval (with covered sets) by 1
// and the right part by 2, and the vertex lands on the diagonal intersection
// point of its leftmost and rightmost contour neighbours.
inline std::vector<std::pair<std::int64_t, std::int64_t>> shift_method_draw(
    int m, const std::vector<std::vector<int>>& adj, const std::vector<int>& order) {
    std::vector<std::int64_t> x(static_cast<std::size_t>(m), 0), y(static_cast<std::size_t>(m), 0);
    std::vector<std::vector<int>> cover(static_cast<std::size_t>(m));
    std::vector<char> is_nbr(static_cast<std::size_t>(m), 0);

    const int v1 = order[0], v2 = order[1], v3 = order[2];
    x[static_cast<std::size_t>(v1)] = 0;
    y[static_cast<std::size_t>(v1)] = 0;
    x[static_cast<std::size_t>(v2)] = 2;
    y[static_cast<std::size_t>(v2)] = 0;
    x[static_cast<std::size_t>(v3)] = 1;
    y[static_cast<std::size_t>(v3)] = 1;
    std::vector<int> contour{v1, v3, v2};

    auto shift_subtree = [&](auto&& self, int v, std::int64_t d) -> void {
        x[static_cast<std::size_t>(v)] += d;
        for (int c : cover[static_cast<std::size_t>(v)]) self(self, c, d);
    };

    for (int k = 3; k < m; ++k) {
        const int vk = order[static_cast<std::size_t>(k)];
        for (int u : adj[static_cast<std::size_t>(vk)]) is_nbr[static_cast<std::size_t>(u)] = 1;
        int p = -1, q = -1;
        for (std::size_t i = 0; i < contour.size(); ++i) {
            if (!is_nbr[static_cast<std::size_t>(contour[i])]) continue;
            if (p < 0) p = static_cast<int>(i);
            q = static_cast<int>(i);
        }
        if (p < 0 || q <= p) throw std::logic_error("shift_method_draw: vertex sees no interval");
        for (int i = p; i <= q; ++i)
            if (!is_nbr[static_cast<std::size_t>(contour[static_cast<std::size_t>(i)])])
                throw std::logic_error("shift_method_draw: contour neighbours not consecutive");
        for (int u : adj[static_cast<std::size_t>(vk)]) is_nbr[static_cast<std::size_t>(u)] = 0;

        for (int i = p + 1; i < q; ++i)
            shift_subtree(shift_subtree, contour[static_cast<std::size_t>(i)], 1);
        for (std::size_t i = static_cast<std::size_t>(q); i < contour.size(); ++i)
            shift_subtree(shift_subtree, contour[i], 2);

        const int wp = contour[static_cast<std::size_t>(p)], wq = contour[static_cast<std::size_t>(q)];
        const std::int64_t sx = x[static_cast<std::size_t>(wp)] + x[static_cast<std::size_t>(wq)] +
                                y[static_cast<std::size_t>(wq)] - y[static_cast<std::size_t>(wp)];
        const std::int64_t sy = x[static_cast<std::size_t>(wq)] - x[static_cast<std::size_t>(wp)] +
                                y[static_cast<std::size_t>(wp)] + y[static_cast<std::size_t>(wq)];
        if ((sx & 1) != 0 || (sy & 1) != 0)
            throw std::logic_error("shift_method_draw: off-parity placement");
        x[static_cast<std::size_t>(vk)] = sx / 2;
        y[static_cast<std::size_t>(vk)] = sy / 2;

        cover[static_cast<std::size_t>(vk)].assign(contour.begin() + p + 1, contour.begin() + q);
        contour.erase(contour.begin() + p + 1, contour.begin() + q);
        contour.insert(contour.begin() + p + 1, vk);
    }

    std::vector<std::pair<std::int64_t, std::int64_t>> out(static_cast<std::size_t>(m));
    for (int v = 0; v < m; ++v) out[static_cast<std::size_t>(v)] = {x[static_cast<std::size_t>(v)], y[static_cast<std::size_t>(v)]};
    return out;
}

}  // namespace detail

// Finish a whole subtree inside its rectangle: draw the subtree graph with
// the shift method on the abstract grid, compose the abstract coordinates
// into the stretched cross product, and keep the already-placed triangle as
// the outer face.  Exact stretched containment of every vertex in its host
// triangle is asserted before accepting the placement.
inline void fpp_embed(EmbedState& st, int node) {
    FaceNode& nd = st.ft.nodes[static_cast<std::size_t>(node)];
    const int w = nd.weight;
    st.rect_active[static_cast<std::size_t>(node)] = 0;
    if (w == 0) return;
    const std::int64_t m = w + 3;
    auto cp = detail::try_cross_product(st.rects[static_cast<std::size_t>(node)], m, st.params);
    if (!cp) throw InvariantViolation(node, "fringe cross product vanished");

    // gather subtree insertions (vertex + host triangle) and leaf faces
    struct Ins {
        int vertex, a, b, c;
    };
    std::vector<Ins> subs;
    std::vector<std::array<int, 3>> faces;
    {
        std::vector<int> stack{node};
        while (!stack.empty()) {
            int id = stack.back();
            stack.pop_back();
            const FaceNode& cur = st.ft.nodes[static_cast<std::size_t>(id)];
            if (cur.is_leaf()) {
                faces.push_back({cur.v_left, cur.v_right, cur.v_top});
            } else {
                int u = st.ft.nodes[static_cast<std::size_t>(cur.children[0])].v_top;
                subs.push_back({u, cur.v_left, cur.v_right, cur.v_top});
                for (int c : cur.children) stack.push_back(c);
            }
        }
        std::sort(subs.begin(), subs.end(), [](const Ins& a, const Ins& b) { return a.vertex < b.vertex; });
    }

    // local relabeling: outer left/right/top -> 0/1/2, interiors by vertex id
    std::vector<int> local_of(static_cast<std::size_t>(st.n), -1);
    std::vector<int> global_of;
    auto add_local = [&](int gv) {
        local_of[static_cast<std::size_t>(gv)] = static_cast<int>(global_of.size());
        global_of.push_back(gv);
    };
    add_local(nd.v_left);
    add_local(nd.v_right);
    add_local(nd.v_top);
    for (const Ins& i : subs) add_local(i.vertex);

    std::vector<std::vector<int>> adj(static_cast<std::size_t>(m));
    auto add_edge = [&](int a, int b) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    };
    add_edge(0, 1);
    add_edge(1, 2);
    add_edge(0, 2);
    for (const Ins& i : subs) {
        int lu = local_of[static_cast<std::size_t>(i.vertex)];
        add_edge(lu, local_of[static_cast<std::size_t>(i.a)]);
        add_edge(lu, local_of[static_cast<std::size_t>(i.b)]);
        add_edge(lu, local_of[static_cast<std::size_t>(i.c)]);
    }
    std::vector<std::array<int, 3>> lfaces;
    lfaces.reserve(faces.size());
    for (const auto& f : faces)
        lfaces.push_back({local_of[static_cast<std::size_t>(f[0])], local_of[static_cast<std::size_t>(f[1])],
                          local_of[static_cast<std::size_t>(f[2])]});

    auto order = detail::canonical_order(static_cast<int>(m), adj, lfaces);
    auto abs_pos = detail::shift_method_draw(static_cast<int>(m), adj, order);

    for (int lv = 3; lv < m; ++lv) {
        auto [gx, gy] = abs_pos[static_cast<std::size_t>(lv)];
        if (gx < 0 || gy < 0 || gx >= static_cast<std::int64_t>(cp->xs.size()) ||
            gy >= static_cast<std::int64_t>(cp->ys.size()))
            throw std::logic_error("fpp_embed: abstract drawing escaped the cross product");
        GridPoint p{cp->xs[static_cast<std::size_t>(gx)], cp->ys[static_cast<std::size_t>(gy)]};
        int gv = global_of[static_cast<std::size_t>(lv)];
        if (st.is_placed[static_cast<std::size_t>(gv)])
            throw InvariantViolation(node, "fringe vertex placed twice");
        st.placed[static_cast<std::size_t>(gv)] = p;
        st.is_placed[static_cast<std::size_t>(gv)] = 1;
    }

    // exact certification: every inserted vertex strictly inside its host
    StretchTable tau(st.params);
    auto spt = [&](int gv) { return tau(st.placed[static_cast<std::size_t>(gv)]); };
    for (const Ins& i : subs) {
        if (!detail::point_in_triangle_strict(spt(i.a), spt(i.b), spt(i.c), spt(i.vertex)))
            throw InvariantViolation(node, "fringe drawing violates host-triangle nesting");
    }
}

inline void process_case1(EmbedState& st, int node) {
    const FaceNode& nd = st.ft.nodes[static_cast<std::size_t>(node)];
    const auto [c0, c1, c2] = nd.children;
    const std::int64_t w1 = st.ft.nodes[static_cast<std::size_t>(c0)].weight;
    const std::int64_t w2 = st.ft.nodes[static_cast<std::size_t>(c1)].weight;
    const std::int64_t w3 = st.ft.nodes[static_cast<std::size_t>(c2)].weight;
    const std::int64_t sp = st.params.spacing();
    const std::int64_t mask = st.params.mask();

    const OpenRect before = st.rects[static_cast<std::size_t>(node)];
    auto [ell_x, ell_y] = ideal_cuts(before, w1, w2, w3);
    apply_shift(st, CutAxis::Vertical, ell_x.position, 2 * sp);
    apply_shift(st, CutAxis::Horizontal, ell_y.position, sp);
    const OpenRect r = st.rects[static_cast<std::size_t>(node)]; // expanded

    const std::int64_t t = detail::align_up(ell_y.position, r.y1 & mask, sp);
    const std::int64_t x2r = detail::align_up(ell_x.position, (sp - (t & mask)) & mask, sp);
    const std::int64_t x3l = detail::align_up(ell_x.position + sp, t & mask, sp);

    detail::place_split_vertex(st, node, GridPoint{x2r, t});

    const OpenRect r1{r.x1, r.x2, r.y1, t};
    const OpenRect r2{r.x1, x2r, t, r.y2};
    const OpenRect r3{x3l, r.x2, t, r.y2};

    // expansion only helps: each child keeps at least its ideal-split share
    const std::int64_t total = w1 + w2 + w3 + 1;
    const std::array<std::pair<const OpenRect*, std::int64_t>, 3> parts{
        std::pair{&r1, w1}, std::pair{&r2, w2}, std::pair{&r3, w3}};
    for (auto [ri, wi] : parts)
        if (ri->area() * total < before.area() * wi)
            throw InvariantViolation(node, "case 1 lost the proportional area split");

    detail::assign_child(st, node, c0, r1);
    detail::assign_child(st, node, c1, r2);
    detail::assign_child(st, node, c2, r3);
    st.rect_active[static_cast<std::size_t>(node)] = 0;
}

inline void process_case2(EmbedState& st, int node) {
    const FaceNode& nd = st.ft.nodes[static_cast<std::size_t>(node)];
    const auto [c0, c1, c2] = nd.children;
    const std::int64_t w1 = st.ft.nodes[static_cast<std::size_t>(c0)].weight;
    const std::int64_t w2 = st.ft.nodes[static_cast<std::size_t>(c1)].weight;
    const std::int64_t w3 = st.ft.nodes[static_cast<std::size_t>(c2)].weight;
    const OpenRect r = st.rects[static_cast<std::size_t>(node)];

    auto [ell_x, ell_y] = ideal_cuts(r, w1, w2, w3);
    (void)ell_x;
    // top part split into 6 congruent cells; Q is the lower middle one
    const Rational qx1 = Rational(r.x1) + Rational(r.width(), 3);
    const Rational qx2 = Rational(r.x1) + Rational(2 * r.width(), 3);
    const Rational qy2 = (ell_y.position + Rational(r.y2)) / 2;
    auto v = detail::lowest_leftmost_point(st.params, detail::RowClass::Any, qx1, qx2,
                                           ell_y.position, qy2);
    if (!v) throw InvariantViolation(node, "case 2 found no grid point in Q");
    detail::place_split_vertex(st, node, *v);

    detail::assign_child(st, node, c0, OpenRect{r.x1, r.x2, r.y1, v->y});
    detail::assign_child(st, node, c1, OpenRect{r.x1, v->x, v->y, r.y2});
    detail::assign_child(st, node, c2, OpenRect{v->x, r.x2, v->y, r.y2});
    st.rect_active[static_cast<std::size_t>(node)] = 0;
}

inline void process_case3(EmbedState& st, int node) {
    const FaceNode& nd = st.ft.nodes[static_cast<std::size_t>(node)];
    const auto [c0, c1, c2] = nd.children;
    const std::int64_t w1 = st.ft.nodes[static_cast<std::size_t>(c0)].weight;
    const std::int64_t w2 = st.ft.nodes[static_cast<std::size_t>(c1)].weight;
    const std::int64_t w3 = st.ft.nodes[static_cast<std::size_t>(c2)].weight;
    const std::int64_t sp = st.params.spacing();
    const std::int64_t mask = st.params.mask();
    const bool heavy_left = w2 >= sp;
    if (heavy_left == (w3 >= sp))
        throw InvariantViolation(node, "case 3 expects exactly one heavy side child");
    const std::int64_t wh = heavy_left ? w2 : w3;
    const std::int64_t d2 = w1 + (heavy_left ? w3 : w2) + 1;
    const OpenRect r = st.rects[static_cast<std::size_t>(node)];

    if (4 * d2 * sp <= r.width() && 4 * d2 * sp <= r.height()) {
        // Case 3A: explicit slab / inset-block / column layout
        const std::int64_t vy = r.y1 + 2 * d2;
        const std::int64_t vx = heavy_left ? r.x2 - 2 * d2 : r.x1 + 2 * d2;
        detail::place_split_vertex(st, node, GridPoint{vx, vy});
        const OpenRect r1{r.x1, r.x2, r.y1, vy};
        const OpenRect r2 = heavy_left ? OpenRect{r.x1 + 2 * d2, vx, vy, r.y2}
                                       : OpenRect{r.x1, vx, vy, r.y2};
        const OpenRect r3 = heavy_left ? OpenRect{vx, r.x2, vy, r.y2}
                                       : OpenRect{vx, r.x2 - 2 * d2, vy, r.y2};
        detail::assign_child(st, node, c0, r1);
        detail::assign_child(st, node, c1, r2);
        detail::assign_child(st, node, c2, r3);
        st.rect_active[static_cast<std::size_t>(node)] = 0;
        return;
    }

    // Case 3B: cut lines around the heavy child, vertex on a diagonal in Q,
    // partner corner on the opposite diagonal beyond the heavy block.
    const Rational total(wh + d2);
    const Rational l0 = Rational(r.y1) + Rational(r.height() * d2, 3) / total;
    const Rational side_w = Rational(r.width() * d2) / Rational(3 * wh + 2 * d2);
    const Rational l1 = Rational(r.x1) + side_w;
    const Rational l2 = Rational(r.x2) - side_w;
    const Rational mid = (Rational(r.y1) + l0) / 2;
    const OpenRect box = box_of(st, node);

    if (heavy_left) {
        auto p = detail::lowest_leftmost_point(st.params, detail::RowClass::Backward, l2,
                                               (l2 + Rational(r.x2)) / 2, mid, l0);
        if (!p) throw InvariantViolation(node, "case 3B found no backward-diagonal point in Q");
        const std::int64_t ppx = detail::align_down(l1, p->y & mask, sp);
        if (ppx < box.x1)
            throw InvariantViolation(node, "case 3B partner corner escapes the box");
        detail::place_split_vertex(st, node, *p);
        detail::assign_child(st, node, c0, OpenRect{r.x1, r.x2, r.y1, p->y});
        detail::assign_child(st, node, c1, OpenRect{ppx, p->x, p->y, r.y2});
        detail::assign_child(st, node, c2, OpenRect{p->x, r.x2, p->y, r.y2});
    } else {
        auto p = detail::lowest_leftmost_point(st.params, detail::RowClass::Forward,
                                               (Rational(r.x1) + l1) / 2, l1, mid, l0);
        if (!p) throw InvariantViolation(node, "case 3B found no forward-diagonal point in Q");
        const std::int64_t ppx = detail::align_up(l2, (sp - (p->y & mask)) & mask, sp);
        if (ppx > box.x2)
            throw InvariantViolation(node, "case 3B partner corner escapes the box");
        detail::place_split_vertex(st, node, *p);
        detail::assign_child(st, node, c0, OpenRect{r.x1, r.x2, r.y1, p->y});
        detail::assign_child(st, node, c1, OpenRect{r.x1, p->x, p->y, r.y2});
        detail::assign_child(st, node, c2, OpenRect{p->x, ppx, p->y, r.y2});
    }
    st.rect_active[static_cast<std::size_t>(node)] = 0;
}

inline void process_node(EmbedState& st, int node) {
    const FaceNode& nd = st.ft.nodes[static_cast<std::size_t>(node)];
    if (nd.is_leaf() || nd.weight == 0) {
        st.rect_active[static_cast<std::size_t>(node)] = 0;
        return;
    }
    if (fringe_test(st, node)) {
        fpp_embed(st, node);
        return;
    }
    bool hub_child = false;
    bool heavy_side = false;
    for (int i = 0; i < 3; ++i) {
        const FaceNode& c = st.ft.nodes[static_cast<std::size_t>(nd.children[static_cast<std::size_t>(i)])];
        hub_child |= c.is_hub;
        if (i > 0) heavy_side |= c.weight >= st.params.spacing();
    }
    if (hub_child)
        process_case1(st, node);
    else if (heavy_side)
        process_case3(st, node);
    else
        process_case2(st, node);
}

inline void run_embedding(EmbedState& st) {
    const std::int64_t s = st.params.init_side;
    st.placed[0] = GridPoint{0, 0};
    st.placed[1] = GridPoint{s, 0};
    st.placed[2] = GridPoint{s, s};
    st.is_placed[0] = st.is_placed[1] = st.is_placed[2] = 1;
    if (st.n > 3) {
        st.rects[FaceTree::root] = OpenRect{0, s, 0, s};
        st.rect_active[FaceTree::root] = 1;
        st.queue.push_back(FaceTree::root);
        while (st.queue_head < st.queue.size()) {
            int node = st.queue[st.queue_head++];
            process_node(st, node);
        }
    }
    for (int v = 0; v < st.n; ++v)
        if (!st.is_placed[static_cast<std::size_t>(v)])
            throw std::logic_error("run_embedding: vertex never placed");
    std::int64_t sx = 0, sy = 0;
    for (const auto& ev : st.shift_log)
        (ev.axis == CutAxis::Vertical ? sx : sy) += ev.amount;
    if (sx > 4 * st.params.n_eff || sy > 4 * st.params.n_eff)
        throw InvariantViolation(FaceTree::root, "accumulated shifts exceed the 4n budget");
    for (int v = 0; v < st.n; ++v) {
        const GridPoint& p = st.placed[static_cast<std::size_t>(v)];
        if (!in_bounds(p, st.params) || !contains(p, st.params))
            throw InvariantViolation(FaceTree::root, "a shifted vertex left the sparse grid");
    }
}

inline Embedding embed(const TriTree& t, int max_escalations = 3) {
    GridParams g = make_params(t.n);
    for (int attempt = 0;; ++attempt) {
        try {
            EmbedState st = make_embed_state(t, g);
            run_embedding(st);
            Embedding e;
            e.params = st.params;
            e.positions = st.placed;
            return e;
        } catch (const InvariantViolation&) {
            if (attempt >= max_escalations) throw EscalationExhausted(attempt + 1);
            g = escalate(g);
        }
    }
}

}  // namespace p3t

#endif
