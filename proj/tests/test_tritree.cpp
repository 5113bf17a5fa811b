#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "p3t/sparsegrid.hpp"
#include "p3t/tritree.hpp"

using namespace p3t;

namespace {

// chain `count` vertices into the subtree rooted at face node `host`,
// starting with vertex id `v`; returns the next free vertex id
int chain_into(TriTree& t, int host, int count, int v) {
    for (int i = 0; i < count; ++i) {
        t.insertions.push_back({v, host});
        host = 3 * (v - 3) + 1; // bottom child of the insertion just made
        ++v;
    }
    return v;
}

// root split plus chains of the given sizes in the three child subtrees
TriTree weighted_root_tree(int w_bottom, int w_left, int w_right) {
    TriTree t;
    t.n = 4 + w_bottom + w_left + w_right;
    t.insertions.push_back({3, 0});
    int v = 4;
    v = chain_into(t, 1, w_bottom, v);
    v = chain_into(t, 2, w_left, v);
    v = chain_into(t, 3, w_right, v);
    return t;
}

}  // namespace

TEST_CASE("parse: K4 and canonical roundtrip") {
    TriTree t = parse_tritree("p3t 4\nroot 0 1 2\nv 3 0\n");
    CHECK(t.n == 4);
    REQUIRE(t.insertions.size() == 1);
    CHECK(t.insertions[0].vertex == 3);
    CHECK(t.insertions[0].host_node == 0);
    CHECK(serialize_tritree(t) == "p3t 4\nroot 0 1 2\nv 3 0\n");
}

TEST_CASE("parse: v-lines in any order serialize canonically") {
    TriTree t = parse_tritree("p3t 5\nroot 0 1 2\nv 4 1\nv 3 0\n");
    CHECK(serialize_tritree(t) == "p3t 5\nroot 0 1 2\nv 3 0\nv 4 1\n");
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_tritree(""), ParseError);
    CHECK_THROWS_AS(parse_tritree("p3t 2\nroot 0 1 2\n"), ParseError);
    CHECK_THROWS_AS(parse_tritree("p3t 4\nroot 0 2 1\nv 3 0\n"), ParseError);
    CHECK_THROWS_AS(parse_tritree("p3t 4\nroot 0 1 2\nw 3 0\n"), ParseError);
    CHECK_THROWS_AS(parse_tritree("p3t 4\nroot 0 1 2\nv 3 0 1 2\n"), ParseError);
    // host already split: node 0 is no longer a leaf
    CHECK_THROWS_AS(parse_tritree("p3t 5\nroot 0 1 2\nv 3 0\nv 4 0\n"), ParseError);
    // duplicate vertex id
    CHECK_THROWS_AS(parse_tritree("p3t 5\nroot 0 1 2\nv 3 0\nv 3 1\n"), ParseError);
    // host node does not exist yet
    CHECK_THROWS_AS(parse_tritree("p3t 5\nroot 0 1 2\nv 3 2\nv 4 1\n"), ParseError);
    // truncated insertion list
    CHECK_THROWS_AS(parse_tritree("p3t 5\nroot 0 1 2\nv 3 0\n"), ParseError);
}

TEST_CASE("roundtrip identity over a random corpus") {
    for (TreeModel model : {TreeModel::UniformFace, TreeModel::Path, TreeModel::Balanced})
        for (std::uint64_t seed = 0; seed < 34; ++seed) {
            TriTree t = generate_random(20 + static_cast<int>(seed % 30), seed, model);
            std::string s = serialize_tritree(t);
            CHECK(serialize_tritree(parse_tritree(s)) == s);
        }
}

TEST_CASE("generate_random: smallest case and determinism") {
    TriTree t3 = generate_random(3, 99, TreeModel::UniformFace);
    CHECK(t3.n == 3);
    CHECK(t3.insertions.empty());

    TriTree a = generate_random(100, 7, TreeModel::UniformFace);
    TriTree b = generate_random(100, 7, TreeModel::UniformFace);
    CHECK(serialize_tritree(a) == serialize_tritree(b));
    CHECK_THROWS_AS(generate_random(2, 0, TreeModel::Path), PreconditionError);
}

TEST_CASE("path model produces a deep face tree") {
    TriTree t = generate_random(50, 1, TreeModel::Path);
    FaceTree ft = build_face_tree(t);
    CHECK(face_tree_depth(ft) >= 47);
}

TEST_CASE("build_face_tree: node counts, labels, weights") {
    TriTree k4 = parse_tritree("p3t 4\nroot 0 1 2\nv 3 0\n");
    FaceTree ft = build_face_tree(k4);
    REQUIRE(ft.nodes.size() == 4);
    CHECK(ft.nodes[0].weight == 1);
    for (int c = 1; c <= 3; ++c) {
        CHECK(ft.nodes[static_cast<std::size_t>(c)].is_leaf());
        CHECK(ft.nodes[static_cast<std::size_t>(c)].weight == 0);
    }
    // the new vertex is top of the bottom child, right of the left child,
    // left of the right child
    CHECK(ft.nodes[1].v_top == 3);
    CHECK(ft.nodes[2].v_right == 3);
    CHECK(ft.nodes[3].v_left == 3);

    // two chained insertions: 7 nodes, root weight 2
    TriTree t5 = parse_tritree("p3t 5\nroot 0 1 2\nv 3 0\nv 4 1\n");
    FaceTree ft5 = build_face_tree(t5);
    CHECK(ft5.nodes.size() == 7);
    CHECK(ft5.nodes[0].weight == 2);
}

TEST_CASE("face tree properties over a generated corpus") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        TriTree t = generate_random(40, seed, TreeModel::UniformFace);
        FaceTree ft = build_face_tree(t);
        REQUIRE(ft.nodes.size() == static_cast<std::size_t>(1 + 3 * (t.n - 3)));
        int leaves = 0;
        for (const auto& nd : ft.nodes) {
            if (nd.is_leaf()) {
                ++leaves;
                CHECK(nd.weight == 0);
            } else {
                std::int64_t sum = 1;
                for (int c : nd.children) sum += ft.nodes[static_cast<std::size_t>(c)].weight;
                CHECK(nd.weight == sum);
            }
        }
        CHECK(leaves == 2 * (t.n - 3) + 1);
        CHECK(edge_list(t).size() == static_cast<std::size_t>(3 * t.n - 6));
    }
}

TEST_CASE("designate_hubs on a descending chain") {
    // path tree on 16 vertices: bottom-chain weights 13, 12, ..., 0; 2^q = 4
    TriTree t = generate_random(16, 0, TreeModel::Path);
    GridParams g = make_params(16);
    FaceTree ft = designate_hubs(build_face_tree(t), g);
    std::multiset<int> hub_weights;
    for (const auto& nd : ft.nodes)
        if (nd.is_hub) hub_weights.insert(nd.weight);
    CHECK(hub_weights == std::multiset<int>{13, 9, 5});
}

TEST_CASE("designate_hubs: degenerate and sibling cases") {
    // all weights below the threshold: only the root is a hub
    TriTree small = weighted_root_tree(1, 1, 0);
    GridParams g16 = make_params(16); // threshold 4, root weight 3
    FaceTree ft = designate_hubs(build_face_tree(small), g16);
    CHECK(count_hubs(ft) == 1);
    CHECK(ft.nodes[0].is_hub);

    // two heavy children of the root are both hubs
    TriTree two = weighted_root_tree(4, 4, 0);
    FaceTree ft2 = designate_hubs(build_face_tree(two), make_params(16));
    CHECK(ft2.nodes[0].is_hub);
    CHECK(ft2.nodes[1].is_hub);
    CHECK(ft2.nodes[2].is_hub);
    CHECK_FALSE(ft2.nodes[3].is_hub);
}

TEST_CASE("hub invariants over a generated corpus") {
    GridParams g = make_params(256);
    const std::int64_t sp = g.spacing();
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        TriTree t = generate_random(256, seed, TreeModel::UniformFace);
        FaceTree ft = designate_hubs(build_face_tree(t), g);
        CHECK(count_hubs(ft) <= 2 * sp); // at most 2 * n^(1/2)

        // check gap and sibling properties by walking with nearest hub weight
        struct Item {
            int node;
            std::int64_t nearest;
        };
        std::vector<Item> stack{{FaceTree::root, -1}};
        while (!stack.empty()) {
            auto [id, nearest] = stack.back();
            stack.pop_back();
            const FaceNode& nd = ft.nodes[static_cast<std::size_t>(id)];
            if (nd.is_hub && id != FaceTree::root) {
                REQUIRE(nd.weight >= sp);
                REQUIRE(nd.weight <= nearest - sp);
            }
            if (!nd.is_leaf()) {
                int heavy = 0, hub = 0;
                for (int c : nd.children) {
                    const FaceNode& ch = ft.nodes[static_cast<std::size_t>(c)];
                    heavy += ch.weight >= sp ? 1 : 0;
                    hub += ch.is_hub ? 1 : 0;
                }
                if (heavy >= 2) REQUIRE(hub == heavy); // heavy siblings are hubs
                std::int64_t down = nd.is_hub ? nd.weight : nearest;
                for (int c : nd.children) stack.push_back({c, down});
            }
        }
    }
}
