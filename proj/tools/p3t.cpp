// Command-line surface for the planar 3-tree universal point set pipeline.
//
// Exit codes: 0 ok, 2 parse error (flags, files, malformed content),
// 3 verification failure, 4 invariant escalation exhausted, 5 cap exceeded.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "p3t/embedder.hpp"
#include "p3t/exactgeom.hpp"
#include "p3t/svg.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitVerify = 3;
constexpr int kExitEscalation = 4;
constexpr int kExitCap = 5;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw p3t::ParseError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw p3t::ParseError("cannot write file: " + path);
    out << content;
}

std::string edge_str(const std::pair<int, int>& e) {
    return std::to_string(e.first) + "-" + std::to_string(e.second);
}

void print_report(const p3t::VerifyReport& rep, std::ostream& out) {
    for (const auto& [e1, e2] : rep.crossings)
        out << "CROSS " << edge_str(e1) << " " << edge_str(e2) << "\n";
    for (const auto& [a, b] : rep.coincidences) out << "COINCIDE " << a << " " << b << "\n";
    for (const auto& [v, e] : rep.incidences) out << "ONEDGE " << v << " " << edge_str(e) << "\n";
    for (int v : rep.off_grid) out << "OFFGRID " << v << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"universal point sets and straight-line embeddings for planar 3-trees"};
    app.require_subcommand(1);

    // --- gen-tree ---
    auto* gen = app.add_subcommand("gen-tree", "generate a random planar 3-tree file");
    int gen_n = 10;
    std::uint64_t gen_seed = 0;
    std::string gen_model = "uniform-face";
    std::string gen_out;
    gen->add_option("--n", gen_n, "vertex count (>= 3)")->required();
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--model", gen_model, "uniform-face | path | balanced");
    gen->add_option("--out", gen_out, "output file (stdout if omitted)");

    // --- pointset ---
    auto* ps = app.add_subcommand("pointset", "query the sparse point set B_n");
    std::int64_t ps_n = 0;
    bool ps_count = false, ps_list = false, ps_stretched = false;
    std::vector<std::int64_t> ps_contains;
    ps->add_option("--n", ps_n, "vertex count the set is built for")->required();
    ps->add_flag("--count", ps_count, "print |B_n|");
    ps->add_flag("--list", ps_list, "print all points as 'x y' lines");
    ps->add_option("--contains", ps_contains, "x y: membership query")->expected(2);
    ps->add_flag("--stretched", ps_stretched, "list with stretched Y coordinates");

    // --- embed ---
    auto* em = app.add_subcommand("embed", "embed a 3-tree file onto the point set");
    std::string em_in, em_out;
    bool em_verify = false, em_stretched = false;
    int em_max_esc = 3;
    em->add_option("--in", em_in, "3-tree input file")->required();
    em->add_option("--out", em_out, "embedding output file (stdout if omitted)");
    em->add_flag("--verify", em_verify, "exactly verify the drawing and set the exit code");
    em->add_flag("--stretched", em_stretched, "write stretched Y coordinates");
    em->add_option("--max-escalations", em_max_esc, "grid escalations before giving up");

    // --- verify ---
    auto* ve = app.add_subcommand("verify", "exactly verify an embedding file");
    std::string ve_tree, ve_emb;
    ve->add_option("--tree", ve_tree, "3-tree file")->required();
    ve->add_option("--emb", ve_emb, "embedding file")->required();

    // --- render ---
    auto* re = app.add_subcommand("render", "render an embedding as SVG (unstretched view)");
    std::string re_tree, re_emb, re_svg;
    p3t::RenderOptions ropt;
    re->add_option("--tree", re_tree, "3-tree file")->required();
    re->add_option("--emb", re_emb, "embedding file")->required();
    re->add_option("--svg", re_svg, "SVG output file")->required();
    re->add_option("--scale", ropt.scale, "pixels per grid unit");
    re->add_option("--samples", ropt.arc_samples, "samples per edge arc");
    re->add_flag("--show-grid", ropt.show_grid, "draw nearby B_n points");
    re->add_flag("--stretched-y", ropt.stretched_y, "annotate vertices with stretched coordinates");

    // --- stats ---
    auto* stc = app.add_subcommand("stats", "point-set sizes and hub statistics");
    std::string st_list = "16,64,256,1024";
    stc->add_option("--n-list", st_list, "comma-separated n values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }

    if (gen->parsed()) {
        p3t::TriTree t = p3t::generate_random(gen_n, gen_seed, p3t::tree_model_from_name(gen_model));
        std::string text = p3t::serialize_tritree(t);
        if (gen_out.empty())
            std::cout << text;
        else
            write_file(gen_out, text);
        return kExitOk;
    }

    if (ps->parsed()) {
        p3t::GridParams g = p3t::make_params(ps_n);
        if (ps_count) {
            std::cout << p3t::count_points(g) << "\n";
        } else if (ps_list) {
            std::ostringstream out;
            p3t::BigInt row_power = 1; // (28*nEff)^y, advanced per row
            for (std::int64_t y = 0; y <= g.side; ++y) {
                std::string ystr = ps_stretched ? row_power.str() : std::to_string(y);
                for (std::int64_t x = 0; x <= g.side; ++x)
                    if (p3t::contains(p3t::GridPoint{x, y}, g)) out << x << " " << ystr << "\n";
                row_power *= g.stretch_base;
            }
            std::cout << out.str();
        } else if (!ps_contains.empty()) {
            bool in = p3t::contains(p3t::GridPoint{ps_contains[0], ps_contains[1]}, g);
            std::cout << (in ? "true" : "false") << "\n";
        } else {
            std::cerr << "error: pointset needs one of --count, --list, --contains\n";
            return kExitParse;
        }
        return kExitOk;
    }

    if (em->parsed()) {
        p3t::TriTree t = p3t::parse_tritree(read_file(em_in));
        p3t::Embedding e = p3t::embed(t, em_max_esc);
        std::string text = p3t::write_embedding(e, em_stretched);
        if (em_out.empty())
            std::cout << text;
        else
            write_file(em_out, text);
        if (em_verify) {
            p3t::VerifyReport rep = p3t::verify_drawing(t, e);
            print_report(rep, std::cerr);
            return rep.ok ? kExitOk : kExitVerify;
        }
        return kExitOk;
    }

    if (ve->parsed()) {
        p3t::TriTree t = p3t::parse_tritree(read_file(ve_tree));
        p3t::Embedding e = p3t::read_embedding(read_file(ve_emb));
        p3t::VerifyReport rep = p3t::verify_drawing(t, e);
        print_report(rep, std::cout);
        return rep.ok ? kExitOk : kExitVerify;
    }

    if (re->parsed()) {
        p3t::TriTree t = p3t::parse_tritree(read_file(re_tree));
        p3t::Embedding e = p3t::read_embedding(read_file(re_emb));
        write_file(re_svg, p3t::render_svg(t, e, ropt));
        return kExitOk;
    }

    if (stc->parsed()) {
        std::vector<std::int64_t> ns;
        std::stringstream ss(st_list);
        std::string item;
        while (std::getline(ss, item, ',')) ns.push_back(std::stoll(item));
        std::cout << "n_eff\t|B_n|\t|B_n|/(n^1.5*log2 n)\tmax_hubs\thub_bound\n";
        for (std::int64_t n : ns) {
            p3t::GridParams g = p3t::make_params(n);
            std::int64_t cnt = p3t::count_points(g);
            double denom = std::pow(static_cast<double>(g.n_eff), 1.5) *
                           std::log2(static_cast<double>(g.n_eff));
            int max_hubs = 0;
            for (std::uint64_t seed = 0; seed < 100; ++seed) {
                auto t = p3t::generate_random(static_cast<int>(g.n_eff), seed,
                                              p3t::TreeModel::UniformFace);
                auto ft = p3t::designate_hubs(p3t::build_face_tree(t), g);
                max_hubs = std::max(max_hubs, p3t::count_hubs(ft));
            }
            std::cout << g.n_eff << "\t" << cnt << "\t" << static_cast<double>(cnt) / denom
                      << "\t" << max_hubs << "\t" << 2 * g.spacing() << "\n";
        }
        return kExitOk;
    }

    return kExitParse;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const p3t::CapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCap;
    } catch (const p3t::EscalationExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEscalation;
    } catch (const p3t::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
}
