#ifndef P3T_EMBEDDING_HPP
#define P3T_EMBEDDING_HPP

// Result of the embedding pipeline: one grid point per vertex plus the grid
// parameters the points live on (which may be larger than requested when the
// driver escalated).

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "p3t/common.hpp"
#include "p3t/sparsegrid.hpp"

namespace p3t {

struct Embedding {
    GridParams params;
    std::vector<GridPoint> positions; // indexed by vertex id

    int n() const { return static_cast<int>(positions.size()); }
};

// File format: `emb <n> <nEff> <q>` then `<id> <x> <y>` per vertex in id
// order.  The stretched variant replaces y by (28*nEff)^y in decimal.
inline std::string write_embedding(const Embedding& e, bool stretched = false) {
    std::ostringstream out;
    out << "emb " << e.n() << " " << e.params.n_eff << " " << e.params.q << "\n";
    StretchTable tau(e.params);
    for (int v = 0; v < e.n(); ++v) {
        const GridPoint& p = e.positions[static_cast<std::size_t>(v)];
        if (stretched)
            out << v << " " << p.x << " " << tau.power(p.y).str() << "\n";
        else
            out << v << " " << p.x << " " << p.y << "\n";
    }
    return out.str();
}

inline Embedding read_embedding(const std::string& text) {
    std::istringstream in(text);
    std::string tag;
    int n = 0;
    std::int64_t n_eff = 0;
    int q = 0;
    if (!(in >> tag >> n >> n_eff >> q) || tag != "emb" || n < 3)
        throw ParseError("embedding: expected 'emb <n> <nEff> <q>'");
    Embedding e;
    e.params.n_input = n;
    e.params.n_eff = n_eff;
    e.params.q = q;
    e.params.side = 14 * n_eff;
    e.params.init_side = 10 * n_eff;
    e.params.stretch_base = 28 * n_eff;
    if (n_eff != (std::int64_t{1} << (2 * q)))
        throw ParseError("embedding: nEff is not 4^q");
    e.positions.resize(static_cast<std::size_t>(n));
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
        int id = -1;
        std::int64_t x = 0, y = 0;
        if (!(in >> id >> x >> y)) throw ParseError("embedding: truncated vertex list");
        if (id < 0 || id >= n || seen[static_cast<std::size_t>(id)])
            throw ParseError("embedding: bad or duplicate vertex id");
        seen[static_cast<std::size_t>(id)] = true;
        e.positions[static_cast<std::size_t>(id)] = GridPoint{x, y};
    }
    return e;
}

}  // namespace p3t

#endif
