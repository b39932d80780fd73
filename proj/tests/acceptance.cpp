#include "linkforge/linkforge.hpp"

// Acceptance checks for the whole library: one line of output per criterion,
// each with its own runtime budget. The process exit code is the number of
// failed criteria, so the suite doubles as a CI gate.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace lf = linkforge;
using lf::Int;
using lf::linkalg::LinkingVector;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

int g_failures = 0;

template <typename Fn>
void criterion(int number, const char* description, double budget_seconds, Fn&& body) {
    const auto t0 = Clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out.ok = false;
        out.detail = std::string("unexpected exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool in_budget = secs < budget_seconds;
    const bool pass = out.ok && in_budget;
    if (!pass) ++g_failures;
    std::printf("[%s] %d. %s: %s%s, %.2fs (budget %.0fs)\n", pass ? "PASS" : "FAIL", number,
                description, out.detail.c_str(),
                out.ok && !in_budget ? " [over budget]" : "", secs, budget_seconds);
    std::fflush(stdout);
}

long long rand_in(std::mt19937_64& rng, long long lo, long long hi) {
    return lf::uniform_int(rng, lo, hi);
}

// Smallest admissible stitching input for (S, T, q): row counts and lambda sit
// exactly on the hypothesis thresholds, entries are seeded small integers.
lf::pipelines::StitchInput minimal_stitch_input(std::size_t S, std::size_t T, long long q,
                                                std::uint64_t seed) {
    lf::pipelines::StitchInput in;
    in.S = S;
    in.T = T;
    in.q = q;
    const std::size_t d = S + T;
    const std::size_t A = lf::to_size(lf::ipow(Int(2), S) * lf::ipow(Int(q), d));
    const std::size_t B =
        lf::to_size(lf::ipow(Int(3), S) * lf::ipow(Int(2), T) * Int(d) * lf::ipow(Int(q), d));
    in.lambda = static_cast<std::uint64_t>(lf::to_size(lf::ipow(Int(2 * q), d)));
    std::mt19937_64 rng(seed);
    auto fill = [&](std::size_t rows, std::size_t width, bool nonzero) {
        std::vector<LinkingVector> m(rows, LinkingVector(width));
        for (auto& r : m)
            for (auto& e : r) {
                long long v;
                do {
                    v = rand_in(rng, -3, 3);
                } while (nonzero && v == 0);
                e = v;
            }
        return m;
    };
    in.JX = fill(A, S, true);
    in.JY = fill(A, T, false);
    in.LX = fill(B, S, false);
    in.LY = fill(B, T, true);
    in.supplier.kind = lf::pipelines::SupplierSpec::Kind::Seeded;
    in.supplier.seed = seed ^ 0x9e3779b97f4a7c15ULL;
    in.supplier.lo = -3;
    in.supplier.hi = 3;
    return in;
}

// Synthetic partitioned base whose cross-part linking data satisfies the
// induction step's hypotheses (used for the determinism criterion).
lf::pipelines::PartitionedSystem synthetic_base(std::size_t part_size, const Int& lambda,
                                                std::uint64_t seed) {
    lf::pipelines::PartitionedSystem base;
    std::mt19937_64 rng(seed);
    auto nonzero = [&] {
        long long v;
        do {
            v = rand_in(rng, -3, 3);
        } while (v == 0);
        return Int(v);
    };
    for (std::size_t i = 0; i < part_size; ++i) {
        base.part1.push_back("P" + std::to_string(i + 1));
        base.sys.add_component(base.part1.back(), lambda);
    }
    for (std::size_t i = 0; i < part_size; ++i) {
        base.part2.push_back("Q" + std::to_string(i + 1));
        base.sys.add_component(base.part2.back(), lambda);
    }
    for (const auto& a : base.part1)
        for (const auto& b : base.part2) base.sys.set_lk(a, b, nonzero());
    return base;
}

Outcome check_conway_gordon() {
    const std::size_t seeds = 100;
    const auto invariants =
        lf::parallel_map<int>(seeds, lf::default_thread_count(), [](std::size_t i) {
            const auto e = lf::geomlink::random_general_position_embedding(6, i);
            return lf::geomlink::conway_gordon_invariant(e);
        });
    std::size_t bad = 0;
    for (int v : invariants)
        if (v != 1) ++bad;
    std::ostringstream os;
    os << seeds - bad << "/" << seeds << " seeded embeddings give invariant 1";
    return {bad == 0, os.str()};
}

Outcome check_oracle_agreement() {
    const int trials = 100;
    int conclusive = 0, mismatches = 0;
    for (int i = 0; i < trials; ++i) {
        const auto emb = lf::geomlink::random_general_position_embedding(9, 1000 + i);
        std::mt19937_64 rng(i);
        std::vector<int> ids(9);
        for (int v = 0; v < 9; ++v) ids[v] = v;
        std::shuffle(ids.begin(), ids.end(), rng);
        const int len1 = 3 + static_cast<int>(rand_in(rng, 0, 1));
        const int len2 = 3 + static_cast<int>(rand_in(rng, 0, 1));
        const lf::geomlink::PolygonalCycle c1(std::vector<int>(ids.begin(), ids.begin() + len1));
        const lf::geomlink::PolygonalCycle c2(
            std::vector<int>(ids.begin() + len1, ids.begin() + len1 + len2));
        const long long exact = lf::geomlink::linking_number(emb, c1, c2);
        try {
            const long long approx = lf::geomlink::gauss_linking_oracle(emb, c1, c2);
            ++conclusive;
            if (approx != exact) ++mismatches;
        } catch (const lf::geomlink::OracleInconclusive&) {
        }
    }
    std::ostringstream os;
    os << conclusive << "/" << trials << " conclusive, " << mismatches << " mismatches";
    return {mismatches == 0 && conclusive >= 95, os.str()};
}

Outcome check_shift_lemma() {
    int checked = 0, bad = 0;
    for (std::size_t d = 1; d <= 4; ++d) {
        const std::size_t count = (std::size_t{1} << d) + 1;
        for (int inst = 0; inst < 1000; ++inst) {
            std::mt19937_64 rng(d * 100000 + static_cast<std::size_t>(inst));
            LinkingVector f(d);
            for (auto& e : f) {
                long long v;
                do {
                    v = rand_in(rng, -5, 5);
                } while (v == 0);
                e = v;
            }
            std::vector<LinkingVector> shifts(count, LinkingVector(d));
            for (auto& row : shifts)
                for (auto& e : row) e = rand_in(rng, -5, 5);
            const auto pair = lf::selection::find_nonvanishing_shift(f, shifts);
            const auto valid = lf::selection::brute_force_shift_oracle(f, shifts);
            ++checked;
            if (std::find(valid.begin(), valid.end(), pair) == valid.end()) ++bad;
        }
    }
    std::ostringstream os;
    os << checked << " instances (d = 1..4), " << bad << " oracle rejections";
    return {bad == 0, os.str()};
}

Outcome check_stitching() {
    const struct {
        std::size_t S, T;
        long long q;
    } shapes[] = {{1, 0, 2}, {0, 1, 2}, {1, 1, 2}, {1, 1, 3}};
    int checked = 0, bad = 0;
    for (const auto& sh : shapes)
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            const auto in = minimal_stitch_input(sh.S, sh.T, sh.q, seed);
            const auto res = lf::pipelines::stitch_links(in);
            ++checked;
            if (!lf::linkalg::verify_conclusion(res.z, in.q)) ++bad;
        }
    std::ostringstream os;
    os << checked << " minimal-size runs, " << bad
       << " outputs violating the nonzero-multiple-of-q conclusion";
    return {bad == 0, os.str()};
}

Outcome check_two_component() {
    int checked = 0, bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const long long q = 1 + i % 5;
        const std::size_t nkeys = static_cast<std::size_t>(q) + static_cast<std::size_t>(i % 3);
        std::mt19937_64 rng(static_cast<std::uint64_t>(i));
        const long long sign = (i % 2 == 0) ? 1 : -1;
        std::vector<Int> keys(nkeys);
        for (auto& k : keys) k = Int(sign * rand_in(rng, 1, 6));
        lf::pipelines::SupplierSpec supplier;
        supplier.kind = lf::pipelines::SupplierSpec::Kind::Seeded;
        supplier.seed = static_cast<std::uint64_t>(i) * 977;
        const auto res = lf::pipelines::two_component_pipeline(keys, q, supplier);
        ++checked;
        if (res.lk == 0 || res.lk % q != 0) ++bad;
    }
    std::ostringstream os;
    os << checked << " instances (q <= 5), " << bad << " bad output classes";
    return {bad == 0, os.str()};
}

Outcome check_simplicial_counts() {
    int checked = 0, bad = 0;
    for (int n = 1; n <= 3; ++n)
        for (std::size_t ell = 1; ell <= 12; ++ell) {
            const auto p = lf::simplicial::build_path(n, ell);
            const std::size_t want_vertices = ell + static_cast<std::size_t>(n);
            const std::size_t want_boundary =
                ell * static_cast<std::size_t>(n - 1) + 2;
            bool ok = lf::simplicial::validate_path(p) &&
                      p.complex.vertex_count() == want_vertices &&
                      p.complex.facet_count() == ell &&
                      p.complex.boundary_ridges().size() == want_boundary;
            const Int m = Int(n) * Int(static_cast<std::uint64_t>(want_boundary));
            const auto ps = lf::simplicial::build_prism_sphere(p, m);
            ok = ok && lf::simplicial::validate_sphere(ps.sphere.complex) &&
                 Int(ps.extra_facets) == m &&
                 Int(static_cast<std::uint64_t>(ps.sphere.complex.vertex_count())) ==
                     lf::simplicial::vsphere_upper(p.complex, m);
            ++checked;
            if (!ok) ++bad;
        }
    std::ostringstream os;
    os << checked << " (n, length) pairs with n <= 3, length <= 12, " << bad << " count mismatches";
    return {bad == 0, os.str()};
}

Outcome check_bounds_table() {
    bool ok = lf::pipelines::bound_key_q(1, 1) == 24 && lf::pipelines::bound_key_q(2, 1) == 96 &&
              lf::pipelines::bound_key_q(1, 2) == 36;
    const auto sizes = lf::pipelines::bound_bipartite_stage_sizes(2);
    ok = ok && sizes == std::vector<Int>{1024, 16, 2};
    const auto budget = lf::pipelines::vertex_budget_check(1, 1);
    ok = ok && budget.ok && budget.margin == 7;
    return {ok, "key bounds 24/96/36, stage sizes (1024, 16, 2), budget margin 7"};
}

Outcome check_determinism() {
    namespace ser = lf::serialize;
    int bad = 0;

    // stitching: rerun and replay byte-exactly
    const auto in = minimal_stitch_input(1, 1, 2, 42);
    const auto r1 = lf::pipelines::stitch_links(in);
    const auto r2 = lf::pipelines::replay_stitch(in, r1.trace);
    if (ser::canonical_dump(ser::stitch_trace_to_json(r1.trace)) !=
        ser::canonical_dump(ser::stitch_trace_to_json(r2.trace)))
        ++bad;

    // two-component: rerun and replay byte-exactly
    const std::vector<Int> keys = {Int(2), Int(4), Int(2), Int(6)};
    lf::pipelines::SupplierSpec sup;
    sup.kind = lf::pipelines::SupplierSpec::Kind::Seeded;
    sup.seed = 7;
    const auto t1 = lf::pipelines::two_component_pipeline(keys, 4, sup);
    const auto t2 = lf::pipelines::replay_two_component(keys, 4, sup, t1.trace);
    if (ser::canonical_dump(ser::two_component_trace_to_json(t1.trace)) !=
        ser::canonical_dump(ser::two_component_trace_to_json(t2.trace)))
        ++bad;

    // induction step: identical bases give identical systems and compositions
    const auto params = lf::pipelines::compute_modq_params(0, 1, 1, 2);
    lf::pipelines::SupplierSpec msup;
    msup.kind = lf::pipelines::SupplierSpec::Kind::Seeded;
    msup.seed = 13;
    const auto base_a = synthetic_base(lf::to_size(params.w), params.lambda, 31);
    const auto base_b = synthetic_base(lf::to_size(params.w), params.lambda, 31);
    const auto m1 = lf::pipelines::theorem_modq_step(0, 1, 1, 2, base_a, msup);
    const auto m2 = lf::pipelines::theorem_modq_step(0, 1, 1, 2, base_b, msup);
    if (ser::canonical_dump(ser::linksystem_to_json(m1.system.sys)) !=
            ser::canonical_dump(ser::linksystem_to_json(m2.system.sys)) ||
        ser::canonical_dump(ser::chain_to_json(m1.composition)) !=
            ser::canonical_dump(ser::chain_to_json(m2.composition)))
        ++bad;

    // geometry: seeded embeddings are reproducible coordinate by coordinate
    const auto e1 = lf::geomlink::random_general_position_embedding(9, 5);
    const auto e2 = lf::geomlink::random_general_position_embedding(9, 5);
    if (ser::canonical_dump(ser::embedding_to_json(e1)) !=
        ser::canonical_dump(ser::embedding_to_json(e2)))
        ++bad;

    // key ring search is a deterministic exhaustive scan
    lf::pipelines::KeyRingInstance inst;
    inst.m = 2;
    inst.s = {1, 0, 1, 0};
    inst.M = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    const auto s1 = lf::pipelines::keyring_search(inst);
    const auto s2 = lf::pipelines::keyring_search(inst);
    if (ser::canonical_dump(ser::keyring_selection_to_json(s1)) !=
        ser::canonical_dump(ser::keyring_selection_to_json(s2)))
        ++bad;

    std::ostringstream os;
    os << "5 pipelines rerun and replayed, " << bad << " byte-level differences";
    return {bad == 0, os.str()};
}

}  // namespace

int main() {
    criterion(1, "complete-graph invariant equals 1 on 100 seeded embeddings", 10.0,
              check_conway_gordon);
    criterion(2, "exact and solid-angle linking numbers agree on 100 cycle pairs", 30.0,
              check_oracle_agreement);
    criterion(3, "shift selection validated by brute force on 4000 instances", 10.0,
              check_shift_lemma);
    criterion(4, "stitched classes are nonzero multiples of q on 4000 minimal inputs", 60.0,
              check_stitching);
    criterion(5, "two-component pipeline output classes on 1000 instances", 10.0,
              check_two_component);
    criterion(6, "path and prism-sphere vertex/facet/boundary counts", 10.0,
              check_simplicial_counts);
    criterion(7, "bound formula table values", 10.0, check_bounds_table);
    criterion(8, "reruns and trace replays are byte-exact", 300.0, check_determinism);
    std::printf("acceptance: %d/8 criteria passed\n", 8 - g_failures);
    return g_failures;
}
