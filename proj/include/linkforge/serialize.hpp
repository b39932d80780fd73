#pragma once

#include "geomlink.hpp"
#include "linkalg.hpp"
#include "numeric.hpp"
#include "pipelines.hpp"
#include "simplicial.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// JSON interchange for every type that crosses the CLI boundary. Integers are
// emitted as JSON numbers while they fit in the 53-bit safe range and as
// decimal strings beyond it; readers accept both. Rationals are always
// "num/den" strings. nlohmann::json keeps object keys sorted, so dump() is
// canonical and digests of equal values agree byte for byte.

namespace linkforge::serialize {

using nlohmann::json;

inline constexpr std::int64_t kSafeInt = 9007199254740992;  // 2^53

inline json int_to_json(const Int& x) {
    if (x >= -Int(kSafeInt) && x <= Int(kSafeInt)) return json(to_ll(x));
    return json(x.str());
}

inline Int int_from_json(const json& j) {
    if (j.is_number_integer()) return Int(j.get<std::int64_t>());
    if (j.is_number_unsigned()) return Int(j.get<std::uint64_t>());
    if (j.is_string()) return Int(j.get<std::string>());
    throw std::invalid_argument("expected an integer (number or decimal string)");
}

inline json int_vec_to_json(const std::vector<Int>& v) {
    json out = json::array();
    for (const auto& e : v) out.push_back(int_to_json(e));
    return out;
}

inline std::vector<Int> int_vec_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("expected an array of integers");
    std::vector<Int> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(int_from_json(e));
    return out;
}

inline json int_matrix_to_json(const std::vector<std::vector<Int>>& m) {
    json out = json::array();
    for (const auto& row : m) out.push_back(int_vec_to_json(row));
    return out;
}

inline std::vector<std::vector<Int>> int_matrix_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("expected a matrix (array of arrays)");
    std::vector<std::vector<Int>> out;
    out.reserve(j.size());
    for (const auto& row : j) out.push_back(int_vec_from_json(row));
    return out;
}

inline json rat_to_json(const Rat& x) { return json(format_rational(x)); }

inline Rat rat_from_json(const json& j) {
    if (j.is_number_integer()) return Rat(Int(j.get<std::int64_t>()));
    if (j.is_number_unsigned()) return Rat(Int(j.get<std::uint64_t>()));
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw std::invalid_argument("expected a rational (\"num/den\" string or integer)");
}

// ---------------------------------------------------------------------------
// Simplicial complexes, paths, spheres
// ---------------------------------------------------------------------------

inline json complex_to_json(const simplicial::SimplicialComplex& c) {
    json facets = json::array();
    for (const auto& f : c.facets())
        facets.push_back(json{{"v", f.simplex.v}, {"sign", f.sign}});
    return json{{"n", c.n()}, {"facets", facets}};
}

inline simplicial::SimplicialComplex complex_from_json(const json& j) {
    const int n = j.at("n").get<int>();
    std::vector<simplicial::OrientedFacet> facets;
    for (const auto& e : j.at("facets")) {
        simplicial::Simplex s(e.at("v").get<std::vector<simplicial::VertexId>>());
        facets.push_back({std::move(s), e.at("sign").get<int>()});
    }
    return simplicial::SimplicialComplex(n, std::move(facets));
}

inline json npath_to_json(const simplicial::NPath& p) {
    json out = complex_to_json(p.complex);
    out["order"] = p.order;
    return out;
}

inline simplicial::NPath npath_from_json(const json& j) {
    simplicial::NPath p{complex_from_json(j), j.at("order").get<std::vector<std::size_t>>()};
    if (!simplicial::validate_path(p)) throw std::invalid_argument("JSON complex is not a path");
    return p;
}

inline json sphere_to_json(const simplicial::TriangulatedSphere& s) {
    return complex_to_json(s.complex);
}

inline simplicial::TriangulatedSphere sphere_from_json(const json& j) {
    return simplicial::make_sphere(complex_from_json(j));
}

// ---------------------------------------------------------------------------
// Embeddings and cycles
// ---------------------------------------------------------------------------

inline json embedding_to_json(const geomlink::PLEmbedding& e) {
    json coords = json::array();
    for (int i = 0; i < static_cast<int>(e.N()); ++i) {
        const auto& p = e.point(i);
        coords.push_back(json::array({rat_to_json(p.x), rat_to_json(p.y), rat_to_json(p.z)}));
    }
    return json{{"N", e.N()}, {"coords", coords}};
}

inline geomlink::PLEmbedding embedding_from_json(const json& j) {
    const int n = j.at("N").get<int>();
    const auto& coords = j.at("coords");
    if (!coords.is_array() || static_cast<int>(coords.size()) != n)
        throw std::invalid_argument("embedding: coords must list exactly N points");
    geomlink::PLEmbedding out;
    out.coords.reserve(coords.size());
    for (const auto& p : coords) {
        if (!p.is_array() || p.size() != 3)
            throw std::invalid_argument("embedding: each point needs 3 coordinates");
        out.coords.push_back({rat_from_json(p[0]), rat_from_json(p[1]), rat_from_json(p[2])});
    }
    return out;
}

inline json cycle_to_json(const geomlink::PolygonalCycle& c) { return json(c.v); }

inline geomlink::PolygonalCycle cycle_from_json(const json& j) {
    geomlink::PolygonalCycle c{j.get<std::vector<int>>()};
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Link systems and chains
// ---------------------------------------------------------------------------

inline json linksystem_to_json(const linkalg::LinkSystem& sys) {
    json comps = json::array();
    for (const auto& c : sys.components())
        comps.push_back(json{{"id", c.id}, {"path_length", int_to_json(c.path_length)}});
    json lk = json::array();
    const auto& cs = sys.components();
    for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t j = i + 1; j < cs.size(); ++j) {
            const Int val = sys.lk(cs[i].id, cs[j].id);
            if (val != 0) lk.push_back(json::array({json(i), json(j), int_to_json(val)}));
        }
    return json{{"components", comps}, {"lk", lk}};
}

inline linkalg::LinkSystem linksystem_from_json(const json& j) {
    linkalg::LinkSystem sys;
    for (const auto& c : j.at("components"))
        sys.add_component(c.at("id").get<std::string>(),
                          c.contains("path_length") ? int_from_json(c.at("path_length")) : Int(0));
    const auto& cs = sys.components();
    for (const auto& entry : j.at("lk")) {
        if (!entry.is_array() || entry.size() != 3)
            throw std::invalid_argument("link system: lk entries must be [i, j, value]");
        const std::size_t a = entry[0].get<std::size_t>();
        const std::size_t b = entry[1].get<std::size_t>();
        if (a >= cs.size() || b >= cs.size())
            throw std::invalid_argument("link system: lk index out of range");
        sys.set_lk(cs[a].id, cs[b].id, int_from_json(entry[2]));
    }
    return sys;
}

inline json chain_to_json(const linkalg::Chain& z) {
    json out = json::object();
    for (const auto& [id, c] : z.coeff) out[id] = int_to_json(c);
    return out;
}

inline linkalg::Chain chain_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("chain: expected an object id -> coefficient");
    linkalg::Chain z;
    for (auto it = j.begin(); it != j.end(); ++it) z.add(it.key(), int_from_json(it.value()));
    return z;
}

// ---------------------------------------------------------------------------
// Pipelines
// ---------------------------------------------------------------------------

inline json supplier_to_json(const pipelines::SupplierSpec& s) {
    using Kind = pipelines::SupplierSpec::Kind;
    json out;
    switch (s.kind) {
        case Kind::Zero:
            out["kind"] = "zero";
            break;
        case Kind::Seeded:
            out["kind"] = "seeded";
            out["seed"] = s.seed;
            out["lo"] = s.lo;
            out["hi"] = s.hi;
            break;
        case Kind::Explicit: {
            out["kind"] = "explicit";
            json table = json::array();
            for (const auto& pair : s.table) table.push_back(int_matrix_to_json(pair));
            out["table"] = table;
            break;
        }
    }
    return out;
}

inline pipelines::SupplierSpec supplier_from_json(const json& j) {
    using Kind = pipelines::SupplierSpec::Kind;
    pipelines::SupplierSpec s;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") {
        s.kind = Kind::Zero;
    } else if (kind == "seeded") {
        s.kind = Kind::Seeded;
        s.seed = j.value("seed", std::uint64_t{0});
        s.lo = j.value("lo", static_cast<long long>(-5));
        s.hi = j.value("hi", static_cast<long long>(5));
    } else if (kind == "explicit") {
        s.kind = Kind::Explicit;
        for (const auto& pair : j.at("table")) s.table.push_back(int_matrix_from_json(pair));
    } else {
        throw std::invalid_argument("supplier: unknown kind " + kind);
    }
    s.validate();
    return s;
}

inline json stitch_input_to_json(const pipelines::StitchInput& in) {
    return json{{"S", in.S},
                {"T", in.T},
                {"q", int_to_json(in.q)},
                {"JX", int_matrix_to_json(in.JX)},
                {"JY", int_matrix_to_json(in.JY)},
                {"LX", int_matrix_to_json(in.LX)},
                {"LY", int_matrix_to_json(in.LY)},
                {"lambda", in.lambda},
                {"supplier", supplier_to_json(in.supplier)}};
}

inline pipelines::StitchInput stitch_input_from_json(const json& j) {
    pipelines::StitchInput in;
    in.S = j.at("S").get<std::size_t>();
    in.T = j.at("T").get<std::size_t>();
    in.q = int_from_json(j.at("q"));
    in.JX = int_matrix_from_json(j.at("JX"));
    in.JY = int_matrix_from_json(j.at("JY"));
    in.LX = int_matrix_from_json(j.at("LX"));
    in.LY = int_matrix_from_json(j.at("LY"));
    in.lambda = j.at("lambda").get<std::uint64_t>();
    in.supplier = supplier_from_json(j.at("supplier"));
    return in;
}

inline json stitch_step_to_json(const pipelines::StitchStep& s) {
    return json{{"mu", s.mu},
                {"lemma_j", s.lemma_j},
                {"lemma_k", s.lemma_k},
                {"range_first", s.range_first},
                {"range_last", s.range_last},
                {"z_after", int_vec_to_json(s.z_after)}};
}

inline pipelines::StitchStep stitch_step_from_json(const json& j) {
    pipelines::StitchStep s;
    s.mu = j.at("mu").get<std::vector<std::size_t>>();
    s.lemma_j = j.at("lemma_j").get<std::size_t>();
    s.lemma_k = j.at("lemma_k").get<std::size_t>();
    s.range_first = j.at("range_first").get<std::size_t>();
    s.range_last = j.at("range_last").get<std::size_t>();
    s.z_after = int_vec_from_json(j.at("z_after"));
    return s;
}

inline json stitch_trace_to_json(const pipelines::StitchTrace& t) {
    json steps = json::array();
    for (const auto& s : t.steps) steps.push_back(stitch_step_to_json(s));
    return json{{"jx_pattern", t.jx_pattern},
                {"x_reversals", t.x_reversals},
                {"ly_pattern", t.ly_pattern},
                {"y_reversals", t.y_reversals},
                {"lx_pattern", t.lx_pattern},
                {"j_rows", t.j_rows},
                {"l_rows", t.l_rows},
                {"alpha0", t.alpha0},
                {"alpha1", t.alpha1},
                {"beta", t.beta},
                {"base_index", t.base_index},
                {"components", t.components},
                {"z0", int_vec_to_json(t.z0)},
                {"steps", steps},
                {"z", int_vec_to_json(t.z)},
                {"chain", chain_to_json(t.chain)}};
}

inline pipelines::StitchTrace stitch_trace_from_json(const json& j) {
    pipelines::StitchTrace t;
    t.jx_pattern = j.at("jx_pattern").get<std::string>();
    t.x_reversals = j.at("x_reversals").get<std::vector<std::size_t>>();
    t.ly_pattern = j.at("ly_pattern").get<std::string>();
    t.y_reversals = j.at("y_reversals").get<std::vector<std::size_t>>();
    t.lx_pattern = j.at("lx_pattern").get<std::string>();
    t.j_rows = j.at("j_rows").get<std::vector<std::size_t>>();
    t.l_rows = j.at("l_rows").get<std::vector<std::size_t>>();
    t.alpha0 = j.at("alpha0").get<std::size_t>();
    t.alpha1 = j.at("alpha1").get<std::size_t>();
    t.beta = j.at("beta").get<std::vector<std::size_t>>();
    t.base_index = j.at("base_index").get<std::size_t>();
    t.components = j.at("components").get<std::vector<std::string>>();
    t.z0 = int_vec_from_json(j.at("z0"));
    for (const auto& s : j.at("steps")) t.steps.push_back(stitch_step_from_json(s));
    t.z = int_vec_from_json(j.at("z"));
    t.chain = chain_from_json(j.at("chain"));
    return t;
}

inline json two_component_trace_to_json(const pipelines::TwoComponentTrace& t) {
    json pairs = json::array();
    for (const auto& p : t.pairs)
        pairs.push_back(json{{"pair_index", p.pair_index},
                             {"window_a", p.window_a},
                             {"window_b", p.window_b},
                             {"f_lk", int_to_json(p.f_lk)}});
    return json{{"reversed", t.reversed}, {"window_a", t.window_a},
                {"window_b", t.window_b}, {"branch", t.branch},
                {"pairs", pairs},         {"chain", chain_to_json(t.chain)},
                {"lk", int_to_json(t.lk)}};
}

inline pipelines::TwoComponentTrace two_component_trace_from_json(const json& j) {
    pipelines::TwoComponentTrace t;
    t.reversed = j.at("reversed").get<bool>();
    t.window_a = j.at("window_a").get<std::size_t>();
    t.window_b = j.at("window_b").get<std::size_t>();
    t.branch = j.at("branch").get<std::string>();
    for (const auto& p : j.at("pairs"))
        t.pairs.push_back({p.at("pair_index").get<std::size_t>(),
                           p.at("window_a").get<std::size_t>(),
                           p.at("window_b").get<std::size_t>(), int_from_json(p.at("f_lk"))});
    t.chain = chain_from_json(j.at("chain"));
    t.lk = int_from_json(j.at("lk"));
    return t;
}

inline json keyring_instance_to_json(const pipelines::KeyRingInstance& k) {
    return json{{"m", k.m}, {"s", k.s}, {"M", k.M}};
}

inline pipelines::KeyRingInstance keyring_instance_from_json(const json& j) {
    pipelines::KeyRingInstance k;
    k.m = j.at("m").get<std::size_t>();
    k.s = j.at("s").get<std::vector<int>>();
    k.M = j.at("M").get<std::vector<std::vector<int>>>();
    k.validate();
    return k;
}

inline json keyring_selection_to_json(const pipelines::KeyRingSelection& s) {
    return json{{"subset", s.subset}, {"index_set", s.index_set}};
}

inline json index_set_to_json(const pipelines::IndexSet& s) {
    if (s.kind == pipelines::IndexSet::Kind::Range)
        return json{{"kind", "range"}, {"lo", int_to_json(s.lo)}, {"hi", int_to_json(s.hi)}};
    return json{{"kind", "explicit"}, {"ids", int_vec_to_json(s.ids)}};
}

inline pipelines::IndexSet index_set_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "range")
        return pipelines::IndexSet::range(int_from_json(j.at("lo")), int_from_json(j.at("hi")));
    if (kind == "explicit") return pipelines::IndexSet::explicit_ids(int_vec_from_json(j.at("ids")));
    throw std::invalid_argument("index set: unknown kind " + kind);
}

// ---------------------------------------------------------------------------
// Canonical dumps and digests
// ---------------------------------------------------------------------------

inline std::string canonical_dump(const json& j) { return j.dump(); }

inline std::uint64_t digest(const json& j) { return fnv1a64(canonical_dump(j)); }

}  // namespace linkforge::serialize
