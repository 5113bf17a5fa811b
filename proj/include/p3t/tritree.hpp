#ifndef P3T_TRITREE_HPP
#define P3T_TRITREE_HPP

// Planar 3-trees as construction sequences over a root triangle, plus the
// face-representative tree with left/right/top labels, subtree weights and
// hub designation.
//
// Face-tree node ids are fixed by the construction: the root triangle is
// node 0 and the insertion of vertex k+3 creates nodes 3k+1 (bottom),
// 3k+2 (left) and 3k+3 (right).  File hosts refer to this numbering.

#include <array>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "p3t/common.hpp"
#include "p3t/sparsegrid.hpp"

namespace p3t {

struct TriTree {
    struct Insertion {
        int vertex = 0;    // new vertex id, insertion k introduces k+3
        int host_node = 0; // face-tree node split by this insertion
    };

    int n = 3;
    std::vector<Insertion> insertions;

    int edge_count() const { return 3 * n - 6; }
};

struct FaceNode {
    int v_left = -1;
    int v_right = -1;
    int v_top = -1;
    // children[0] = bottom, [1] = left, [2] = right; -1 while a leaf
    std::array<int, 3> children{-1, -1, -1};
    int weight = 0;
    bool is_hub = false;

    bool is_leaf() const { return children[0] < 0; }
};

struct FaceTree {
    std::vector<FaceNode> nodes;
    static constexpr int root = 0;
};

inline FaceTree build_face_tree(const TriTree& t) {
    FaceTree ft;
    ft.nodes.reserve(1 + 3 * static_cast<std::size_t>(t.n - 3));
    ft.nodes.push_back(FaceNode{0, 1, 2});
    for (const auto& ins : t.insertions) {
        FaceNode& host = ft.nodes[static_cast<std::size_t>(ins.host_node)];
        const int u = ins.vertex;
        const int vl = host.v_left, vr = host.v_right, vt = host.v_top;
        int base = static_cast<int>(ft.nodes.size());
        host.children = {base, base + 1, base + 2};
        ft.nodes.push_back(FaceNode{vl, vr, u});  // bottom: u becomes top
        ft.nodes.push_back(FaceNode{vl, u, vt});  // left: u becomes right
        ft.nodes.push_back(FaceNode{u, vr, vt});  // right: u becomes left
    }
    // weights bottom-up; children always have larger ids
    for (int i = static_cast<int>(ft.nodes.size()) - 1; i >= 0; --i) {
        FaceNode& nd = ft.nodes[static_cast<std::size_t>(i)];
        if (!nd.is_leaf())
            nd.weight = 1 + ft.nodes[static_cast<std::size_t>(nd.children[0])].weight +
                        ft.nodes[static_cast<std::size_t>(nd.children[1])].weight +
                        ft.nodes[static_cast<std::size_t>(nd.children[2])].weight;
    }
    return ft;
}

// Top-down hub rule: the root is a hub; a node is a hub iff its weight is at
// least 2^q and at most (nearest hub ancestor's weight) - 2^q.  Hub-ancestor
// weights only decrease along a root path, so the nearest one is binding.
inline FaceTree designate_hubs(FaceTree ft, const GridParams& g) {
    const std::int64_t threshold = g.spacing();
    struct Item {
        int node;
        std::int64_t nearest_hub_weight;
    };
    std::vector<Item> stack{{FaceTree::root, -1}};
    while (!stack.empty()) {
        auto [id, anc] = stack.back();
        stack.pop_back();
        FaceNode& nd = ft.nodes[static_cast<std::size_t>(id)];
        bool hub = id == FaceTree::root ||
                   (nd.weight >= threshold && nd.weight <= anc - threshold);
        nd.is_hub = hub;
        std::int64_t down = hub ? nd.weight : anc;
        if (!nd.is_leaf())
            for (int c : nd.children) stack.push_back({c, down});
    }
    return ft;
}

inline int count_hubs(const FaceTree& ft) {
    int h = 0;
    for (const auto& nd : ft.nodes) h += nd.is_hub ? 1 : 0;
    return h;
}

// ---------------------------------------------------------------------------
// File format (UTF-8, line oriented):
//   p3t <n>
//   root 0 1 2
//   v <newVertexId> <hostNodeId>     (n-3 lines)
// Canonical serialization writes the v-lines in vertex-id order; the parser
// accepts them in any order since host node ids are fixed by vertex id.

inline TriTree parse_tritree(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };
    auto fail = [&](const std::string& msg) -> void {
        throw ParseError("line " + std::to_string(lineno) + ": " + msg);
    };

    if (!next_line()) fail("missing header");
    TriTree t;
    {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag >> t.n) || tag != "p3t" || t.n < 3) fail("expected 'p3t <n>' with n >= 3");
        std::string rest;
        if (ls >> rest) fail("trailing tokens after header");
    }
    if (!next_line()) fail("missing root line");
    {
        std::istringstream ls(line);
        std::string tag;
        int a = -1, b = -1, c = -1;
        if (!(ls >> tag >> a >> b >> c) || tag != "root") fail("expected 'root <a> <b> <c>'");
        if (a != 0 || b != 1 || c != 2) fail("root triangle must be '0 1 2'");
        std::string rest;
        if (ls >> rest) fail("trailing tokens after root");
    }

    std::vector<int> host_of(static_cast<std::size_t>(t.n), -1);
    std::vector<bool> seen(static_cast<std::size_t>(t.n), false);
    for (int i = 0; i < t.n - 3; ++i) {
        if (!next_line()) fail("expected " + std::to_string(t.n - 3) + " insertion lines");
        std::istringstream ls(line);
        std::string tag;
        int v = -1, host = -1;
        if (!(ls >> tag >> v >> host) || tag != "v") fail("expected 'v <vertex> <hostNode>'");
        std::string rest;
        if (ls >> rest) fail("trailing tokens on insertion line");
        if (v < 3 || v >= t.n) fail("vertex id out of range: " + std::to_string(v));
        if (seen[static_cast<std::size_t>(v)]) fail("duplicate vertex id: " + std::to_string(v));
        if (host < 0 || host > 3 * (t.n - 3)) fail("host node id out of range");
        seen[static_cast<std::size_t>(v)] = true;
        host_of[static_cast<std::size_t>(v)] = host;
    }
    if (next_line()) fail("trailing content after insertions");

    // Validate in vertex-id order: hosts must exist and still be leaves.
    std::vector<bool> split(1 + 3 * static_cast<std::size_t>(t.n - 3), false);
    t.insertions.reserve(static_cast<std::size_t>(t.n - 3));
    for (int v = 3; v < t.n; ++v) {
        int host = host_of[static_cast<std::size_t>(v)];
        int created = 3 * (v - 3); // nodes 0 .. created exist before inserting v
        if (host > created)
            throw ParseError("vertex " + std::to_string(v) + ": host node " +
                             std::to_string(host) + " does not exist yet");
        if (split[static_cast<std::size_t>(host)])
            throw ParseError("vertex " + std::to_string(v) + ": host node " +
                             std::to_string(host) + " is not a leaf");
        split[static_cast<std::size_t>(host)] = true;
        t.insertions.push_back({v, host});
    }
    return t;
}

inline std::string serialize_tritree(const TriTree& t) {
    std::ostringstream out;
    out << "p3t " << t.n << "\n";
    out << "root 0 1 2\n";
    for (const auto& ins : t.insertions) out << "v " << ins.vertex << " " << ins.host_node << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Random 3-tree generation, deterministic per (n, seed, model).

enum class TreeModel { UniformFace, Path, Balanced };

inline TreeModel tree_model_from_name(std::string_view name) {
    if (name == "uniform-face") return TreeModel::UniformFace;
    if (name == "path") return TreeModel::Path;
    if (name == "balanced") return TreeModel::Balanced;
    throw ParseError("unknown tree model: " + std::string(name));
}

inline std::string tree_model_name(TreeModel m) {
    switch (m) {
        case TreeModel::UniformFace: return "uniform-face";
        case TreeModel::Path: return "path";
        case TreeModel::Balanced: return "balanced";
    }
    return "?";
}

inline TriTree generate_random(int n, std::uint64_t seed, TreeModel model) {
    if (n < 3) throw PreconditionError("generate_random: n must be >= 3");
    TriTree t;
    t.n = n;
    std::mt19937_64 rng(seed);
    std::vector<int> leaves{0};  // creation-ordered leaves (uniform/balanced)
    std::size_t fifo_head = 0;   // balanced model: oldest unsplit leaf
    int last_bottom = 0;         // path model: bottom child of last insertion
    for (int v = 3; v < n; ++v) {
        int host = 0;
        int base = 1 + 3 * (v - 3);
        switch (model) {
            case TreeModel::UniformFace: {
                std::size_t pick =
                    fifo_head + static_cast<std::size_t>(rng() % (leaves.size() - fifo_head));
                host = leaves[pick];
                leaves[pick] = base;  // bottom child replaces the host in place
                break;
            }
            case TreeModel::Path:
                host = last_bottom;
                leaves.push_back(base);
                break;
            case TreeModel::Balanced:
                host = leaves[fifo_head++];
                leaves.push_back(base);
                break;
        }
        leaves.push_back(base + 1);
        leaves.push_back(base + 2);
        last_bottom = base;
        t.insertions.push_back({v, host});
    }
    return t;
}

// Undirected edge list: the root triangle plus three edges per insertion.
inline std::vector<std::pair<int, int>> edge_list(const TriTree& t) {
    std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}, {0, 2}};
    FaceTree ft = build_face_tree(t);
    // rebuild hosts incrementally to know each inserted vertex's triangle
    std::vector<std::array<int, 3>> tri(ft.nodes.size());
    for (std::size_t i = 0; i < ft.nodes.size(); ++i)
        tri[i] = {ft.nodes[i].v_left, ft.nodes[i].v_right, ft.nodes[i].v_top};
    for (const auto& ins : t.insertions)
        for (int w : tri[static_cast<std::size_t>(ins.host_node)])
            edges.emplace_back(std::min(ins.vertex, w), std::max(ins.vertex, w));
    return edges;
}

inline int face_tree_depth(const FaceTree& ft) {
    // depth in edges, iterative to spare the stack on path-shaped trees
    std::vector<std::pair<int, int>> stack{{FaceTree::root, 0}};
    int best = 0;
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        const FaceNode& nd = ft.nodes[static_cast<std::size_t>(id)];
        if (!nd.is_leaf())
            for (int c : nd.children) stack.push_back({c, d + 1});
    }
    return best;
}

}  // namespace p3t

#endif
