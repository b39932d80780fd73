#include "linkforge/linkforge.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace lf = linkforge;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

std::string to_hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

json load_json_file(const std::string& path) {
    if (path == "-") return json::parse(std::cin);
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    return json::parse(in);
}

// Accepts either a bare payload or a report envelope produced by this tool;
// envelopes are unwrapped to their results and then to the named field.
json unwrap(json j, std::initializer_list<const char*> keys) {
    if (j.is_object() && j.contains("results") && j.contains("command")) j = j["results"];
    for (const char* k : keys)
        if (j.is_object() && j.contains(k)) return j[k];
    return j;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument("");
        } catch (...) {
            throw std::invalid_argument("not an integer list entry: '" + tok + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument("empty integer list");
    return out;
}

lf::Int parse_big(const std::string& s) {
    try {
        return lf::Int(s);
    } catch (...) {
        throw std::invalid_argument("not an integer: '" + s + "'");
    }
}

std::vector<lf::Int> parse_big_list(const std::string& s) {
    std::vector<lf::Int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_big(tok));
    if (out.empty()) throw std::invalid_argument("empty integer list");
    return out;
}

struct Printer {
    bool pretty = false;

    void operator()(const json& j) const { std::cout << (pretty ? j.dump(2) : j.dump()) << "\n"; }
};

json make_report(const char* command, json inputs, json results, Clock::time_point t0) {
    const double ms =
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    json rep;
    rep["command"] = command;
    rep["inputs_digest"] = to_hex64(lf::serialize::digest(inputs));
    rep["inputs"] = std::move(inputs);
    rep["results"] = std::move(results);
    rep["timing_ms"] = ms;
    rep["version"] = lf::kVersion;
    return rep;
}

int run_verify_cg(std::size_t seeds, unsigned threads, const Printer& print) {
    const auto t0 = Clock::now();
    const auto invariants = lf::parallel_map<int>(seeds, threads, [](std::size_t i) {
        const auto e = lf::geomlink::random_general_position_embedding(6, i);
        return lf::geomlink::conway_gordon_invariant(e);
    });
    json failures = json::array();
    for (std::size_t i = 0; i < invariants.size(); ++i)
        if (invariants[i] != 1) failures.push_back(i);
    const bool ok = failures.empty();
    json results{{"checked", seeds}, {"all_one", ok}, {"failures", failures}};
    print(make_report("verify-cg", json{{"seeds", seeds}}, std::move(results), t0));
    return ok ? 0 : 1;
}

int run_lk(const std::string& file, const std::string& c1s, const std::string& c2s,
           const Printer& print) {
    const auto t0 = Clock::now();
    const json ej = unwrap(load_json_file(file), {"embedding"});
    const auto emb = lf::serialize::embedding_from_json(ej);
    lf::geomlink::PolygonalCycle c1{parse_int_list(c1s)}, c2{parse_int_list(c2s)};
    c1.validate();
    c2.validate();
    const long long v = lf::geomlink::linking_number(emb, c1, c2);
    json inputs{{"embedding", ej},
                {"c1", lf::serialize::cycle_to_json(c1)},
                {"c2", lf::serialize::cycle_to_json(c2)}};
    print(make_report("lk", std::move(inputs), json{{"lk", v}}, t0));
    return 0;
}

int run_search_modq(std::size_t N, const std::string& qs, std::uint64_t seed, std::size_t budget,
                    const Printer& print) {
    const auto t0 = Clock::now();
    const lf::Int q = parse_big(qs);
    const auto emb = lf::geomlink::random_general_position_embedding(N, seed);
    const auto witness = lf::geomlink::search_mod_q_link(emb, q, budget);
    json results{{"found", witness.has_value()}};
    if (witness) {
        results["witness"] = json{{"c1", lf::serialize::cycle_to_json(witness->c1)},
                                  {"c2", lf::serialize::cycle_to_json(witness->c2)},
                                  {"lk", witness->lk},
                                  {"pairs_examined", witness->pairs_examined}};
    }
    json inputs{{"N", N}, {"q", lf::serialize::int_to_json(q)}, {"seed", seed},
                {"budget", budget}};
    print(make_report("search-modq", std::move(inputs), std::move(results), t0));
    return witness ? 0 : 1;
}

int run_gen_path(int n, std::size_t len, const Printer& print) {
    const auto t0 = Clock::now();
    const auto p = lf::simplicial::build_path(n, len);
    json results{{"path", lf::serialize::npath_to_json(p)},
                 {"vertex_count", p.complex.vertex_count()},
                 {"facet_count", p.complex.facet_count()}};
    print(make_report("gen-path", json{{"n", n}, {"len", len}}, std::move(results), t0));
    return 0;
}

int run_gen_prism(const std::string& file, const std::string& ms, const Printer& print) {
    const auto t0 = Clock::now();
    const lf::Int m = parse_big(ms);
    const json dj = unwrap(load_json_file(file), {"path", "disc", "complex"});
    lf::simplicial::PrismSphere ps;
    lf::Int upper;
    if (dj.is_object() && dj.contains("order")) {
        const auto p = lf::serialize::npath_from_json(dj);
        ps = lf::simplicial::build_prism_sphere(p, m);
        upper = lf::simplicial::vsphere_upper(p.complex, m);
    } else {
        const auto c = lf::serialize::complex_from_json(dj);
        ps = lf::simplicial::build_prism_sphere(c, m);
        upper = lf::simplicial::vsphere_upper(c, m);
    }
    json results{{"sphere", lf::serialize::sphere_to_json(ps.sphere)},
                 {"vertex_count", ps.sphere.complex.vertex_count()},
                 {"facet_count", ps.sphere.complex.facet_count()},
                 {"extra_facets", ps.extra_facets},
                 {"copy0", ps.copies.image0},
                 {"copy1", ps.copies.image1},
                 {"flags", json::array({ps.copies.flag0, ps.copies.flag1})},
                 {"vsphere_upper", lf::serialize::int_to_json(upper)}};
    json inputs{{"disc", dj}, {"m", lf::serialize::int_to_json(m)}};
    print(make_report("gen-prism", std::move(inputs), std::move(results), t0));
    return 0;
}

int run_stitch(const std::string& file, const std::string& replay_file, const Printer& print) {
    const auto t0 = Clock::now();
    const json ij = unwrap(load_json_file(file), {"input"});
    const auto in = lf::serialize::stitch_input_from_json(ij);
    lf::pipelines::StitchResult res;
    const bool replay = !replay_file.empty();
    if (replay) {
        const json tj = unwrap(load_json_file(replay_file), {"trace"});
        res = lf::pipelines::replay_stitch(in, lf::serialize::stitch_trace_from_json(tj));
    } else {
        res = lf::pipelines::stitch_links(in);
    }
    json results{{"chain", lf::serialize::chain_to_json(res.Z)},
                 {"z", lf::serialize::int_vec_to_json(res.z)},
                 {"trace", lf::serialize::stitch_trace_to_json(res.trace)},
                 {"replay", replay}};
    json inputs{{"input", lf::serialize::stitch_input_to_json(in)}};
    print(make_report("stitch", std::move(inputs), std::move(results), t0));
    return 0;
}

int run_two_component(const std::string& keys_s, const std::string& qs, std::uint64_t seed,
                      const Printer& print) {
    const auto t0 = Clock::now();
    const auto keys = parse_big_list(keys_s);
    const lf::Int q = parse_big(qs);
    lf::pipelines::SupplierSpec supplier;
    supplier.kind = lf::pipelines::SupplierSpec::Kind::Seeded;
    supplier.seed = seed;
    const auto res = lf::pipelines::two_component_pipeline(keys, q, supplier);
    json results{{"chain", lf::serialize::chain_to_json(res.chain)},
                 {"lk", lf::serialize::int_to_json(res.lk)},
                 {"trace", lf::serialize::two_component_trace_to_json(res.trace)}};
    json inputs{{"keys", lf::serialize::int_vec_to_json(keys)},
                {"q", lf::serialize::int_to_json(q)},
                {"seed", seed}};
    print(make_report("two-component", std::move(inputs), std::move(results), t0));
    return 0;
}

int run_bounds(const std::string& qs, const std::string& ns, const std::string& rs,
               const Printer& print) {
    const auto t0 = Clock::now();
    const lf::Int q = parse_big(qs), n = parse_big(ns);
    json results{{"key", lf::serialize::int_to_json(lf::pipelines::bound_key_q(q, n))}};
    json inputs{{"q", lf::serialize::int_to_json(q)}, {"n", lf::serialize::int_to_json(n)}};
    if (!rs.empty()) {
        const lf::Int r = parse_big(rs);
        inputs["r"] = lf::serialize::int_to_json(r);
        // D = the n-path of length q: q+n vertices, q(n-1)+2 boundary ridges.
        const lf::Int d = q + n, t = q * (n - 1) + 2;
        results["disc"] = json{{"d", lf::serialize::int_to_json(d)},
                               {"t", lf::serialize::int_to_json(t)}};
        results["keydisc"] = lf::serialize::int_to_json(lf::pipelines::bound_keydisc(d, t, r, n));
        json sizes = json::array();
        for (const auto& s : lf::pipelines::bound_bipartite_stage_sizes(lf::to_size(r, "r")))
            sizes.push_back(lf::serialize::int_to_json(s));
        results["stage_sizes"] = sizes;
    }
    print(make_report("bounds", std::move(inputs), std::move(results), t0));
    return 0;
}

int run_keyring(const std::string& file, const Printer& print) {
    const auto t0 = Clock::now();
    const json ij = unwrap(load_json_file(file), {"instance"});
    const auto inst = lf::serialize::keyring_instance_from_json(ij);
    const auto sel = lf::pipelines::keyring_search(inst);
    json inputs{{"instance", lf::serialize::keyring_instance_to_json(inst)}};
    print(make_report("keyring", std::move(inputs), lf::serialize::keyring_selection_to_json(sel),
                      t0));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linkforge: triangulated paths, prism spheres and links of"
                 " specified divisibility"};
    app.require_subcommand(1);

    Printer print;
    unsigned threads = lf::default_thread_count();
    app.add_flag("--pretty", print.pretty, "pretty-print the JSON report");
    app.add_option("--threads", threads, "worker thread count")->capture_default_str();

    int code = 0;

    auto* cg = app.add_subcommand("verify-cg", "check the complete-graph linking invariant");
    auto cg_seeds = std::make_shared<std::size_t>(0);
    cg->add_option("--seeds", *cg_seeds, "number of seeded random embeddings")->required();
    cg->callback([&, cg_seeds] { code = run_verify_cg(*cg_seeds, threads, print); });

    auto* lk = app.add_subcommand("lk", "exact linking number of two polygonal cycles");
    auto lk_file = std::make_shared<std::string>();
    auto lk_c1 = std::make_shared<std::string>();
    auto lk_c2 = std::make_shared<std::string>();
    lk->add_option("--embedding", *lk_file, "embedding JSON file ('-' for stdin)")->required();
    lk->add_option("--c1", *lk_c1, "first cycle: comma-separated vertex ids")->required();
    lk->add_option("--c2", *lk_c2, "second cycle: comma-separated vertex ids")->required();
    lk->callback([&, lk_file, lk_c1, lk_c2] { code = run_lk(*lk_file, *lk_c1, *lk_c2, print); });

    auto* sm = app.add_subcommand("search-modq",
                                  "search a random embedding for a link with lk a nonzero"
                                  " multiple of q");
    auto sm_n = std::make_shared<std::size_t>(0);
    auto sm_q = std::make_shared<std::string>();
    auto sm_seed = std::make_shared<std::uint64_t>(0);
    auto sm_budget = std::make_shared<std::size_t>(1000000);
    sm->add_option("--N", *sm_n, "number of vertices")->required();
    sm->add_option("--q", *sm_q, "divisibility modulus")->required();
    sm->add_option("--seed", *sm_seed, "embedding seed")->required();
    sm->add_option("--budget", *sm_budget, "maximum cycle pairs to examine")
        ->capture_default_str();
    sm->callback(
        [&, sm_n, sm_q, sm_seed, sm_budget] {
            code = run_search_modq(*sm_n, *sm_q, *sm_seed, *sm_budget, print);
        });

    auto* gp = app.add_subcommand("gen-path", "build a triangulated n-path");
    auto gp_n = std::make_shared<int>(0);
    auto gp_len = std::make_shared<std::size_t>(0);
    gp->add_option("--n", *gp_n, "dimension")->required();
    gp->add_option("--len", *gp_len, "number of facets")->required();
    gp->callback([&, gp_n, gp_len] { code = run_gen_path(*gp_n, *gp_len, print); });

    auto* pr = app.add_subcommand("gen-prism", "build the prism sphere over a disc");
    auto pr_disc = std::make_shared<std::string>();
    auto pr_m = std::make_shared<std::string>();
    pr->add_option("--disc", *pr_disc, "disc (or path) JSON file ('-' for stdin)")->required();
    pr->add_option("--m", *pr_m, "required spare facet count")->required();
    pr->callback([&, pr_disc, pr_m] { code = run_gen_prism(*pr_disc, *pr_m, print); });

    auto* st = app.add_subcommand("stitch", "run the stitching pipeline on a link system");
    auto st_in = std::make_shared<std::string>();
    auto st_replay = std::make_shared<std::string>();
    st->add_option("--input", *st_in, "stitch input JSON file ('-' for stdin)")->required();
    st->add_option("--replay", *st_replay, "trace JSON file to replay against");
    st->callback([&, st_in, st_replay] { code = run_stitch(*st_in, *st_replay, print); });

    auto* tc = app.add_subcommand("two-component",
                                  "two-component pipeline from ring/key linking numbers");
    auto tc_keys = std::make_shared<std::string>();
    auto tc_q = std::make_shared<std::string>();
    auto tc_seed = std::make_shared<std::uint64_t>(0);
    tc->add_option("--keys", *tc_keys, "comma-separated key linking numbers")->required();
    tc->add_option("--q", *tc_q, "divisibility modulus")->required();
    tc->add_option("--seed", *tc_seed, "segment supplier seed")->capture_default_str();
    tc->callback([&, tc_keys, tc_q, tc_seed] {
        code = run_two_component(*tc_keys, *tc_q, *tc_seed, print);
    });

    auto* bd = app.add_subcommand("bounds", "vertex-count bound formulas");
    auto bd_q = std::make_shared<std::string>();
    auto bd_n = std::make_shared<std::string>();
    auto bd_r = std::make_shared<std::string>();
    bd->add_option("--q", *bd_q, "divisibility modulus")->required();
    bd->add_option("--n", *bd_n, "sphere dimension parameter")->required();
    bd->add_option("--r", *bd_r, "component count for the disc/bipartite bounds");
    bd->callback([&, bd_q, bd_n, bd_r] { code = run_bounds(*bd_q, *bd_n, *bd_r, print); });

    auto* kr = app.add_subcommand("keyring", "exhaustive key-ring toggle search");
    auto kr_file = std::make_shared<std::string>();
    kr->add_option("--instance", *kr_file, "instance JSON file ('-' for stdin)")->required();
    kr->callback([&, kr_file] { code = run_keyring(*kr_file, print); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const lf::pipelines::ReplayMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const lf::pipelines::KeyringModelFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << lf::serialize::keyring_instance_to_json(e.instance).dump() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::length_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::overflow_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return code;
}
