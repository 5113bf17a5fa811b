#ifndef P3T_SVG_HPP
#define P3T_SVG_HPP

// SVG rendering of the unstretched view.  Straight segments between
// stretched points map back to Jordan arcs between grid points; edges are
// drawn by sampling the preimage curve y(x) = log_base of the linear
// interpolation between the stretched endpoints.  Floating point is fine
// here: this is display only, no algorithmic decisions.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include "p3t/common.hpp"
#include "p3t/embedding.hpp"
#include "p3t/sparsegrid.hpp"
#include "p3t/tritree.hpp"

namespace p3t {

struct RenderOptions {
    double scale = 6.0;      // pixels per grid unit
    int arc_samples = 32;    // samples per edge
    bool show_grid = false;  // draw B_n points as small marks
    bool stretched_y = false; // annotate vertices with stretched Y values
};

inline std::string render_svg(const TriTree& t, const Embedding& e, const RenderOptions& opt) {
    if (opt.arc_samples < 2) throw PreconditionError("render_svg: arcSamples must be >= 2");
    if (e.n() != t.n) throw PreconditionError("render_svg: embedding does not cover the tree");
    const GridParams& g = e.params;
    const double lnb = std::log(static_cast<double>(g.stretch_base));

    std::int64_t max_x = 1, max_y = 1;
    for (const auto& p : e.positions) {
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
    const double margin = 1.5;
    const double wpx = (static_cast<double>(max_x) + 2 * margin) * opt.scale;
    const double hpx = (static_cast<double>(max_y) + 2 * margin) * opt.scale;
    auto px = [&](double x) { return (x + margin) * opt.scale; };
    auto py = [&](double y) { return (static_cast<double>(max_y) + margin - y) * opt.scale; };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << wpx << "\" height=\"" << hpx
        << "\" viewBox=\"0 0 " << wpx << " " << hpx << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (opt.show_grid) {
        for (std::int64_t y = 0; y <= max_y + 1 && y <= g.side; ++y)
            for (std::int64_t x = 0; x <= max_x + 1 && x <= g.side; ++x)
                if (contains(GridPoint{x, y}, g))
                    out << "<rect x=\"" << px(static_cast<double>(x)) - 1 << "\" y=\""
                        << py(static_cast<double>(y)) - 1 << "\" width=\"2\" height=\"2\" fill=\"#bbb\"/>\n";
    }

    // preimage of the straight segment between stretched endpoints
    for (auto [a, b] : edge_list(t)) {
        const GridPoint pa = e.positions[static_cast<std::size_t>(a)];
        const GridPoint pb = e.positions[static_cast<std::size_t>(b)];
        out << "<path fill=\"none\" stroke=\"#333\" stroke-width=\"1\" d=\"M " << px(static_cast<double>(pa.x))
            << " " << py(static_cast<double>(pa.y));
        if (pa.x == pb.x) {
            out << " L " << px(static_cast<double>(pb.x)) << " " << py(static_cast<double>(pb.y));
        } else {
            const double yhi = static_cast<double>(std::max(pa.y, pb.y));
            const double ylo = static_cast<double>(std::min(pa.y, pb.y));
            const double ratio = std::exp((ylo - yhi) * lnb); // base^(ylo-yhi) <= 1
            for (int s = 1; s < opt.arc_samples; ++s) {
                const double tt = static_cast<double>(s) / opt.arc_samples;
                const double x = static_cast<double>(pa.x) + (static_cast<double>(pb.x - pa.x)) * tt;
                // weight of the high endpoint along the segment; interior
                // samples keep it positive, so the log stays finite even
                // when the ratio underflows
                const double whi = (pa.y >= pb.y) ? 1.0 - tt : tt;
                const double y = yhi + std::log(whi + (1.0 - whi) * ratio) / lnb;
                out << " L " << px(x) << " " << py(y);
            }
            out << " L " << px(static_cast<double>(pb.x)) << " " << py(static_cast<double>(pb.y));
        }
        out << "\"/>\n";
    }

    StretchTable tau(g);
    for (int v = 0; v < t.n; ++v) {
        const GridPoint p = e.positions[static_cast<std::size_t>(v)];
        out << "<circle cx=\"" << px(static_cast<double>(p.x)) << "\" cy=\"" << py(static_cast<double>(p.y))
            << "\" r=\"3\" fill=\"#c33\"/>\n";
        out << "<text x=\"" << px(static_cast<double>(p.x)) + 4 << "\" y=\"" << py(static_cast<double>(p.y)) - 4
            << "\" font-size=\"10\">" << v;
        if (opt.stretched_y) out << " (" << p.x << "," << tau.power(p.y).str() << ")";
        out << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace p3t

#endif
