#ifndef P3T_EXACTGEOM_HPP
#define P3T_EXACTGEOM_HPP

// Exact predicates over stretched coordinates and full drawing verification.
// All decisions are signs of integer determinants in arbitrary precision;
// there is no floating point anywhere on these paths.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "p3t/common.hpp"
#include "p3t/embedding.hpp"
#include "p3t/sparsegrid.hpp"
#include "p3t/tritree.hpp"

namespace p3t {

enum class Orientation { Left, Right, Collinear };

inline int orientation_sign(const StretchedPoint& p, const StretchedPoint& q,
                            const StretchedPoint& r) {
    BigInt d = BigInt(q.x - p.x) * (r.y - p.y) - BigInt(r.x - p.x) * (q.y - p.y);
    return d.sign();
}

inline Orientation orientation(const StretchedPoint& p, const StretchedPoint& q,
                               const StretchedPoint& r) {
    int s = orientation_sign(p, q, r);
    return s > 0 ? Orientation::Left : s < 0 ? Orientation::Right : Orientation::Collinear;
}

namespace detail {

// r collinear with pq and strictly between p and q.
inline bool strictly_between(const StretchedPoint& p, const StretchedPoint& q,
                             const StretchedPoint& r) {
    if (orientation_sign(p, q, r) != 0) return false;
    if (p.x != q.x) return (p.x < r.x && r.x < q.x) || (q.x < r.x && r.x < p.x);
    return (p.y < r.y && r.y < q.y) || (q.y < r.y && r.y < p.y);
}

// Proper crossing or collinear interior overlap of segments ab and cd; the
// four endpoints are assumed pairwise distinct as points.
inline bool segments_cross(const StretchedPoint& a, const StretchedPoint& b,
                           const StretchedPoint& c, const StretchedPoint& d) {
    int d1 = orientation_sign(c, d, a);
    int d2 = orientation_sign(c, d, b);
    int d3 = orientation_sign(a, b, c);
    int d4 = orientation_sign(a, b, d);
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    if (d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0) {
        // collinear: overlapping interiors are invalid drawings
        auto lo_hi = [&](const StretchedPoint& u, const StretchedPoint& v) {
            if (u.x != v.x ? u.x < v.x : u.y < v.y) return std::pair(&u, &v);
            return std::pair(&v, &u);
        };
        auto [a1, a2] = lo_hi(a, b);
        auto [b1, b2] = lo_hi(c, d);
        auto less = [](const StretchedPoint* u, const StretchedPoint* v) {
            return u->x != v->x ? u->x < v->x : u->y < v->y;
        };
        return less(b1, a2) && less(a1, b2);
    }
    return false;
}

inline bool point_in_triangle_strict(const StretchedPoint& a, const StretchedPoint& b,
                                     const StretchedPoint& c, const StretchedPoint& p) {
    int s1 = orientation_sign(a, b, p);
    int s2 = orientation_sign(b, c, p);
    int s3 = orientation_sign(c, a, p);
    return s1 != 0 && s1 == s2 && s2 == s3;
}

}  // namespace detail

struct VerifyReport {
    using Edge = std::pair<int, int>;
    bool ok = true;
    std::vector<std::pair<Edge, Edge>> crossings;
    std::vector<std::pair<int, int>> coincidences;     // vertex pairs at equal positions
    std::vector<std::pair<int, Edge>> incidences;      // vertex interior to non-incident edge
    std::vector<int> off_grid;                         // vertices not in B_n
};

// Pairwise proper-intersection test over all non-adjacent edge pairs in
// stretched coordinates, plus distinctness, grid membership, and
// vertex-on-edge incidences.  Unstretched bounding boxes give a sound
// prefilter because the stretch is monotone per axis.
inline VerifyReport verify_drawing(const TriTree& t, const Embedding& e) {
    if (e.n() != t.n) throw PreconditionError("verify_drawing: embedding does not cover the tree");
    const GridParams& g = e.params;
    VerifyReport rep;

    for (int v = 0; v < t.n; ++v) {
        GridPoint p = e.positions[static_cast<std::size_t>(v)];
        if (!in_bounds(p, g) || !contains(p, g)) rep.off_grid.push_back(v);
    }

    {
        std::vector<int> order(static_cast<std::size_t>(t.n));
        for (int v = 0; v < t.n; ++v) order[static_cast<std::size_t>(v)] = v;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return e.positions[static_cast<std::size_t>(a)] < e.positions[static_cast<std::size_t>(b)] ||
                   (e.positions[static_cast<std::size_t>(a)] == e.positions[static_cast<std::size_t>(b)] && a < b);
        });
        for (std::size_t i = 0; i + 1 < order.size(); ++i)
            if (e.positions[static_cast<std::size_t>(order[i])] ==
                e.positions[static_cast<std::size_t>(order[i + 1])])
                rep.coincidences.emplace_back(std::min(order[i], order[i + 1]),
                                              std::max(order[i], order[i + 1]));
        std::sort(rep.coincidences.begin(), rep.coincidences.end());
    }

    auto edges = edge_list(t);
    StretchTable tau(g);
    std::vector<StretchedPoint> sp;
    sp.reserve(static_cast<std::size_t>(t.n));
    for (int v = 0; v < t.n; ++v) sp.push_back(tau(e.positions[static_cast<std::size_t>(v)]));
    auto pos = [&](int v) -> const GridPoint& { return e.positions[static_cast<std::size_t>(v)]; };

    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto [a, b] = edges[i];
        std::int64_t xlo = std::min(pos(a).x, pos(b).x), xhi = std::max(pos(a).x, pos(b).x);
        std::int64_t ylo = std::min(pos(a).y, pos(b).y), yhi = std::max(pos(a).y, pos(b).y);
        for (std::size_t j = i + 1; j < edges.size(); ++j) {
            auto [c, d] = edges[j];
            if (a == c || a == d || b == c || b == d) continue;
            if (std::max(pos(c).x, pos(d).x) < xlo || std::min(pos(c).x, pos(d).x) > xhi ||
                std::max(pos(c).y, pos(d).y) < ylo || std::min(pos(c).y, pos(d).y) > yhi)
                continue;
            if (detail::segments_cross(sp[static_cast<std::size_t>(a)], sp[static_cast<std::size_t>(b)],
                                       sp[static_cast<std::size_t>(c)], sp[static_cast<std::size_t>(d)]))
                rep.crossings.emplace_back(edges[i], edges[j]);
        }
        for (int v = 0; v < t.n; ++v) {
            if (v == a || v == b) continue;
            if (pos(v).x < xlo || pos(v).x > xhi || pos(v).y < ylo || pos(v).y > yhi) continue;
            if (detail::strictly_between(sp[static_cast<std::size_t>(a)], sp[static_cast<std::size_t>(b)],
                                         sp[static_cast<std::size_t>(v)]))
                rep.incidences.emplace_back(v, edges[i]);
        }
    }
    std::sort(rep.incidences.begin(), rep.incidences.end());

    rep.ok = rep.crossings.empty() && rep.coincidences.empty() && rep.incidences.empty() &&
             rep.off_grid.empty();
    return rep;
}

// ---------------------------------------------------------------------------
// Brute-force point-set embeddability for tiny instances: backtracking over
// vertex -> point assignments in insertion order, pruning with the rule that
// every inserted vertex must land strictly inside its host triangle.

constexpr int kPsembedMaxN = 8;
constexpr int kPsembedMaxPoints = 60;

namespace detail {

class OrientationCache {
  public:
    OrientationCache(const std::vector<GridPoint>& pts, const GridParams& g)
        : n_(pts.size()), signs_(n_ * n_ * n_, 2) {
        StretchTable tau(g);
        sp_.reserve(n_);
        for (const auto& p : pts) sp_.push_back(tau(p));
    }

    int sign(int i, int j, int k) {
        std::size_t idx = (static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)) * n_ +
                          static_cast<std::size_t>(k);
        if (signs_[idx] == 2)
            signs_[idx] = static_cast<std::int8_t>(orientation_sign(
                sp_[static_cast<std::size_t>(i)], sp_[static_cast<std::size_t>(j)],
                sp_[static_cast<std::size_t>(k)]));
        return signs_[idx];
    }

    bool strictly_inside(int a, int b, int c, int p) {
        int s1 = sign(a, b, p), s2 = sign(b, c, p), s3 = sign(c, a, p);
        return s1 != 0 && s1 == s2 && s2 == s3;
    }

  private:
    std::size_t n_;
    std::vector<StretchedPoint> sp_;
    std::vector<std::int8_t> signs_;
};

}  // namespace detail

inline std::optional<Embedding> brute_force_psembed(const TriTree& t,
                                                    const std::vector<GridPoint>& points,
                                                    const GridParams& g) {
    if (t.n > kPsembedMaxN)
        throw CapError("brute_force_psembed: n exceeds cap of " + std::to_string(kPsembedMaxN));
    if (points.size() > static_cast<std::size_t>(kPsembedMaxPoints))
        throw CapError("brute_force_psembed: point count exceeds cap of " +
                       std::to_string(kPsembedMaxPoints));
    if (points.size() < static_cast<std::size_t>(t.n)) return std::nullopt;

    // host triangle (3 vertex ids) per inserted vertex; node labels are fixed
    // at creation time, so the final face tree carries them
    FaceTree ft = build_face_tree(t);
    std::vector<std::array<int, 3>> host(static_cast<std::size_t>(t.n), {0, 1, 2});
    for (const auto& ins : t.insertions) {
        const FaceNode& h = ft.nodes[static_cast<std::size_t>(ins.host_node)];
        host[static_cast<std::size_t>(ins.vertex)] = {h.v_left, h.v_right, h.v_top};
    }

    detail::OrientationCache cache(points, g);
    const int np = static_cast<int>(points.size());
    std::vector<int> assign(static_cast<std::size_t>(t.n), -1);
    std::vector<bool> used(static_cast<std::size_t>(np), false);

    // deterministic candidate order: lowest, then leftmost point first
    std::vector<int> order(static_cast<std::size_t>(np));
    for (int i = 0; i < np; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const GridPoint &pa = points[static_cast<std::size_t>(a)], &pb = points[static_cast<std::size_t>(b)];
        return pa.y != pb.y ? pa.y < pb.y : pa.x < pb.x;
    });

    auto rec = [&](auto&& self, int v) -> bool {
        if (v == t.n) return true;
        for (int oi = 0; oi < np; ++oi) {
            int cand = order[static_cast<std::size_t>(oi)];
            if (used[static_cast<std::size_t>(cand)]) continue;
            bool feasible;
            if (v < 3) {
                feasible = v < 2 || cache.sign(assign[0], assign[1], cand) != 0;
            } else {
                const auto& h = host[static_cast<std::size_t>(v)];
                feasible = cache.strictly_inside(assign[static_cast<std::size_t>(h[0])],
                                                 assign[static_cast<std::size_t>(h[1])],
                                                 assign[static_cast<std::size_t>(h[2])], cand);
            }
            if (!feasible) continue;
            assign[static_cast<std::size_t>(v)] = cand;
            used[static_cast<std::size_t>(cand)] = true;
            if (self(self, v + 1)) return true;
            used[static_cast<std::size_t>(cand)] = false;
            assign[static_cast<std::size_t>(v)] = -1;
        }
        return false;
    };

    if (!rec(rec, 0)) return std::nullopt;
    Embedding e;
    e.params = g;
    e.positions.resize(static_cast<std::size_t>(t.n));
    for (int v = 0; v < t.n; ++v)
        e.positions[static_cast<std::size_t>(v)] = points[static_cast<std::size_t>(assign[static_cast<std::size_t>(v)])];
    return e;
}

// The oracle's validity rule applied to an arbitrary assignment: distinct
// positions, non-degenerate root triangle, every inserted vertex strictly
// inside its host triangle under the stretch.
inline bool psembed_valid(const TriTree& t, const Embedding& e) {
    if (e.n() != t.n) return false;
    for (int a = 0; a < t.n; ++a)
        for (int b = a + 1; b < t.n; ++b)
            if (e.positions[static_cast<std::size_t>(a)] == e.positions[static_cast<std::size_t>(b)])
                return false;
    StretchTable tau(e.params);
    std::vector<StretchedPoint> sp;
    sp.reserve(static_cast<std::size_t>(t.n));
    for (int v = 0; v < t.n; ++v) sp.push_back(tau(e.positions[static_cast<std::size_t>(v)]));
    if (orientation_sign(sp[0], sp[1], sp[2]) == 0) return false;
    FaceTree ft = build_face_tree(t);
    for (const auto& ins : t.insertions) {
        const FaceNode& h = ft.nodes[static_cast<std::size_t>(ins.host_node)];
        // the host node's stored labels are the triangle at split time
        if (!detail::point_in_triangle_strict(sp[static_cast<std::size_t>(h.v_left)],
                                              sp[static_cast<std::size_t>(h.v_right)],
                                              sp[static_cast<std::size_t>(h.v_top)],
                                              sp[static_cast<std::size_t>(ins.vertex)]))
            return false;
    }
    return true;
}

}  // namespace p3t

#endif
