#include "linkforge/pipelines.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace linkforge;
using namespace linkforge::pipelines;
using linkalg::Chain;
using linkalg::LinkingVector;
using linkalg::LinkSystem;

namespace {

LinkingVector iv(std::initializer_list<long long> xs) {
    LinkingVector v;
    for (long long x : xs) v.push_back(Int(x));
    return v;
}

std::vector<LinkingVector> rows(std::initializer_list<std::initializer_list<long long>> rs) {
    std::vector<LinkingVector> out;
    for (const auto& r : rs) out.push_back(iv(r));
    return out;
}

Chain chain_of(std::initializer_list<std::pair<const char*, long long>> cs) {
    Chain z;
    for (const auto& [id, c] : cs) z.add(id, Int(c));
    return z;
}

SupplierSpec zero_supplier() { return {}; }

SupplierSpec explicit_supplier(std::vector<std::vector<LinkingVector>> table) {
    SupplierSpec s;
    s.kind = SupplierSpec::Kind::Explicit;
    s.table = std::move(table);
    return s;
}

SupplierSpec seeded_supplier(std::uint64_t seed, long long lo = -3, long long hi = 3) {
    SupplierSpec s;
    s.kind = SupplierSpec::Kind::Seeded;
    s.seed = seed;
    s.lo = lo;
    s.hi = hi;
    return s;
}

// Smallest admissible input for given (S, T, q): A, B and lambda exactly at
// the hypothesis thresholds, with seeded entries in [-3, 3] (nonzero where
// the hypotheses demand it).
StitchInput minimal_stitch_input(std::size_t S, std::size_t T, long long q, std::uint64_t seed) {
    StitchInput in;
    in.S = S;
    in.T = T;
    in.q = q;
    const std::size_t d = S + T;
    const std::size_t A = to_size(ipow(Int(2), S) * ipow(Int(q), d));
    const std::size_t B = to_size(ipow(Int(3), S) * ipow(Int(2), T) * Int(d) * ipow(Int(q), d));
    in.lambda = static_cast<std::uint64_t>(to_size(ipow(Int(2 * q), d)));
    std::mt19937_64 rng(seed);
    auto entry = [&](bool nonzero) {
        long long v;
        do {
            v = uniform_int(rng, -3, 3);
        } while (nonzero && v == 0);
        return Int(v);
    };
    auto fill = [&](std::size_t rows_n, std::size_t width, bool nonzero) {
        std::vector<LinkingVector> m(rows_n, LinkingVector(width));
        for (auto& r : m)
            for (auto& e : r) e = entry(nonzero);
        return m;
    };
    in.JX = fill(A, S, true);
    in.JY = fill(A, T, false);
    in.LX = fill(B, S, false);
    in.LY = fill(B, T, true);
    in.supplier = seeded_supplier(seed ^ 0x9e3779b97f4a7c15ULL);
    return in;
}

}  // namespace

TEST(SignUniform, BucketsAndReversal) {
    const auto sel = select_sign_uniform_sublink(rows({{1}, {-2}, {3}}), 2);
    EXPECT_EQ(sel.rows, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(sel.pattern, "+");
    EXPECT_EQ(sel.column_signs, (std::vector<int>{1}));

    const auto neg = select_sign_uniform_sublink(rows({{-1, 2}, {-3, 5}}), 2);
    EXPECT_EQ(neg.rows, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(neg.pattern, "-+");
    EXPECT_EQ(neg.column_signs, (std::vector<int>{-1, 1}));
}

TEST(SignUniform, TieBreaksTowardLexLeastPattern) {
    // one '+' row and one '-' row: '+' wins because '+' < '-' in ASCII
    const auto sel = select_sign_uniform_sublink(rows({{-1}, {1}}), 1);
    EXPECT_EQ(sel.pattern, "+");
    EXPECT_EQ(sel.rows, (std::vector<std::size_t>{1}));
}

TEST(SignUniform, QuotaFailureAndZeroEntries) {
    EXPECT_THROW(select_sign_uniform_sublink(rows({{1}, {-1}}), 2), selection::NotFoundError);
    EXPECT_THROW(select_sign_uniform_sublink(rows({{0}}), 1), std::invalid_argument);
}

TEST(ThreeValued, ZeroColumnsAllowed) {
    const auto sel = select_three_valued_sublink(rows({{0}, {2}, {0}, {-1}, {0}, {2}}), 2);
    EXPECT_EQ(sel.pattern, "0");
    EXPECT_EQ(sel.rows, (std::vector<std::size_t>{0, 2, 4}));
    EXPECT_THROW(select_three_valued_sublink(rows({{0}, {1}, {-1}}), 2),
                 selection::NotFoundError);
}

TEST(ChooseBase, FirstCandidateWithoutZeros) {
    EXPECT_EQ(choose_nonvanishing_base(iv({1}), {iv({-1})}), 0u);
    EXPECT_EQ(choose_nonvanishing_base(iv({0}), {iv({2})}), 1u);
    EXPECT_EQ(choose_nonvanishing_base(iv({1, 0}), {iv({1, 0}), iv({2, 3})}), 2u);
    EXPECT_THROW(choose_nonvanishing_base(iv({0}), {iv({0})}), std::logic_error);
    EXPECT_THROW(choose_nonvanishing_base(iv({1}), {iv({1, 2})}), std::invalid_argument);
}

TEST(StitchConsecutive, WorkedExampleModTwo) {
    const auto step = stitch_consecutive(iv({2}), rows({{1}, {1}, {1}, {1}}), 2);
    EXPECT_EQ(step.mu, (std::vector<std::size_t>{0, 2, 4}));
    EXPECT_EQ(step.lemma_j, 0u);
    EXPECT_EQ(step.lemma_k, 1u);
    EXPECT_EQ(step.range_first, 1u);
    EXPECT_EQ(step.range_last, 2u);
    EXPECT_EQ(step.z_after, iv({4}));
}

TEST(StitchConsecutive, WorkedExampleThirdPair) {
    // prefix shifts 0,-1,-2: pairs (0,1) and (1,2) both cancel z = 1
    const auto step = stitch_consecutive(iv({1}), rows({{-1}, {-1}}), 1);
    EXPECT_EQ(step.mu, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(step.lemma_j, 0u);
    EXPECT_EQ(step.lemma_k, 2u);
    EXPECT_EQ(step.range_first, 1u);
    EXPECT_EQ(step.range_last, 2u);
    EXPECT_EQ(step.z_after, iv({-1}));
}

TEST(StitchConsecutive, Validation) {
    EXPECT_THROW(stitch_consecutive(iv({0}), rows({{1}, {1}}), 1), std::invalid_argument);
    EXPECT_THROW(stitch_consecutive(iv({3}), rows({{1}, {1}, {1}, {1}}), 2),
                 std::invalid_argument);  // z not divisible
    EXPECT_THROW(stitch_consecutive(iv({2}), rows({{1}}), 2), std::invalid_argument);  // short
}

TEST(StitchLinks, MinimalSingleComponent) {
    StitchInput in;
    in.S = 1;
    in.T = 0;
    in.q = 1;
    in.JX = rows({{1}, {1}});
    in.JY = {LinkingVector{}, LinkingVector{}};
    in.LX = rows({{0}, {0}, {0}});
    in.LY = {LinkingVector{}, LinkingVector{}, LinkingVector{}};
    in.lambda = 2;
    in.supplier = zero_supplier();
    const auto res = stitch_links(in);
    EXPECT_EQ(res.z, iv({1}));
    EXPECT_EQ(res.Z, chain_of({{"J1", 1}}));
    EXPECT_EQ(res.trace.jx_pattern, "+");
    EXPECT_TRUE(res.trace.x_reversals.empty());
    EXPECT_EQ(res.trace.ly_pattern, "");
    EXPECT_EQ(res.trace.lx_pattern, "0");
    EXPECT_EQ(res.trace.j_rows, (std::vector<std::size_t>{0}));
    EXPECT_EQ(res.trace.l_rows, (std::vector<std::size_t>{0}));
    EXPECT_EQ(res.trace.alpha0, 0u);
    EXPECT_EQ(res.trace.alpha1, 1u);
    EXPECT_EQ(res.trace.beta, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(res.trace.base_index, 0u);
    EXPECT_EQ(res.trace.components, (std::vector<std::string>{"J1"}));
    EXPECT_TRUE(res.trace.steps.empty());
}

// Hand-computed run with two J components and one stitch, q = 2.
TEST(StitchLinks, TwoComponentsOneStitch) {
    StitchInput in;
    in.S = 1;
    in.T = 0;
    in.q = 2;
    in.JX = rows({{1}, {1}, {-1}, {1}});
    in.JY.assign(4, LinkingVector{});
    in.LX = rows({{0}, {2}, {0}, {-1}, {0}, {2}});
    in.LY.assign(6, LinkingVector{});
    in.lambda = 4;
    in.supplier = explicit_supplier({{iv({1}), iv({1}), iv({1}), iv({1})}});
    const auto res = stitch_links(in);
    EXPECT_EQ(res.trace.jx_pattern, "+");
    EXPECT_EQ(res.trace.j_rows, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(res.trace.l_rows, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(res.trace.alpha0, 0u);
    EXPECT_EQ(res.trace.alpha1, 2u);
    EXPECT_EQ(res.trace.beta, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(res.trace.base_index, 0u);
    EXPECT_EQ(res.trace.z0, iv({2}));
    EXPECT_EQ(res.trace.components, (std::vector<std::string>{"J1", "J2"}));
    ASSERT_EQ(res.trace.steps.size(), 1u);
    EXPECT_EQ(res.trace.steps[0].mu, (std::vector<std::size_t>{0, 2, 4}));
    EXPECT_EQ(res.trace.steps[0].range_first, 1u);
    EXPECT_EQ(res.trace.steps[0].range_last, 2u);
    EXPECT_EQ(res.z, iv({4}));
    EXPECT_EQ(res.Z, chain_of({{"J1", 1}, {"J2", 1}, {"F1", 1}}));
}

TEST(StitchLinks, NegativeColumnGetsReversed) {
    StitchInput in;
    in.S = 1;
    in.T = 0;
    in.q = 1;
    in.JX = rows({{-1}, {-1}});
    in.JY.assign(2, LinkingVector{});
    in.LX = rows({{0}, {0}, {0}});
    in.LY.assign(3, LinkingVector{});
    in.lambda = 2;
    in.supplier = zero_supplier();
    const auto res = stitch_links(in);
    EXPECT_EQ(res.trace.jx_pattern, "-");
    EXPECT_EQ(res.trace.x_reversals, (std::vector<std::size_t>{0}));
    EXPECT_EQ(res.z, iv({1}));  // positive after the reversal
}

TEST(StitchInputValidation, NamesTheViolatedHypothesis) {
    auto expect_message = [](StitchInput in, const char* needle) {
        try {
            in.validate();
            FAIL() << "expected invalid_argument mentioning " << needle;
        } catch (const std::invalid_argument& e) {
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    StitchInput base;
    base.S = 1;
    base.T = 0;
    base.q = 2;
    base.JX = rows({{1}, {1}, {1}, {1}});
    base.JY.assign(4, LinkingVector{});
    base.LX = rows({{0}, {0}, {0}, {0}, {0}, {0}});
    base.LY.assign(6, LinkingVector{});
    base.lambda = 4;

    EXPECT_NO_THROW(base.validate());
    {
        auto in = base;
        in.S = 0;
        in.JX.assign(4, LinkingVector{});
        in.LX.assign(6, LinkingVector{});
        expect_message(in, "S + T");
    }
    {
        auto in = base;
        in.q = 0;
        expect_message(in, "q");
    }
    {
        auto in = base;
        in.JX.pop_back();
        expect_message(in, "row counts");
    }
    {
        auto in = base;
        in.JX.resize(2);
        in.JY.resize(2);
        expect_message(in, "A >= 2^S");
    }
    {
        auto in = base;
        in.LX.resize(5);
        in.LY.resize(5);
        expect_message(in, "B >= 3^S");
    }
    {
        auto in = base;
        in.JX[1][0] = 0;
        expect_message(in, "JX");
    }
    {
        auto in = base;
        in.lambda = 3;
        expect_message(in, "lambda");
    }
    {
        auto in = base;
        in.LX[0] = iv({1, 2});
        expect_message(in, "LX");
    }
}

TEST(StitchLinks, MinimalHypothesisSizesAlwaysSucceed) {
    const struct {
        std::size_t S, T;
        long long q;
    } shapes[] = {{1, 0, 2}, {0, 1, 2}, {1, 1, 2}, {1, 1, 3}, {2, 0, 1}, {0, 2, 2}};
    for (const auto& sh : shapes)
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto in = minimal_stitch_input(sh.S, sh.T, sh.q, seed);
            const auto res = stitch_links(in);
            EXPECT_TRUE(linkalg::verify_conclusion(res.z, in.q))
                << "S=" << sh.S << " T=" << sh.T << " q=" << sh.q << " seed=" << seed;
            EXPECT_EQ(res.z.size(), sh.S + sh.T);
            EXPECT_FALSE(res.trace.components.empty());
        }
}

TEST(Replay, DetectsTampering) {
    const auto in = minimal_stitch_input(1, 1, 2, 5);
    const auto res = stitch_links(in);
    EXPECT_NO_THROW(replay_stitch(in, res.trace));
    auto bad = res.trace;
    bad.z[0] += 1;
    try {
        replay_stitch(in, bad);
        FAIL() << "tampered trace should not replay";
    } catch (const ReplayMismatch& e) {
        EXPECT_NE(std::string(e.what()).find("field z"), std::string::npos);
    }
    auto bad2 = res.trace;
    bad2.base_index += 1;
    EXPECT_THROW(replay_stitch(in, bad2), ReplayMismatch);
}

TEST(Keyring, IdentityExample) {
    KeyRingInstance inst;
    inst.m = 2;
    inst.s = {1, 0, 1, 0};
    inst.M = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    const auto sel = keyring_search(inst);
    EXPECT_EQ(sel.subset, (std::vector<std::size_t>{1, 3}));
    EXPECT_EQ(sel.index_set, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Keyring, EmptySubsetCanWin) {
    KeyRingInstance inst;
    inst.m = 2;
    inst.s = {1, 1, 1, 1};
    inst.M = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    const auto sel = keyring_search(inst);
    EXPECT_TRUE(sel.subset.empty());
    EXPECT_EQ(sel.index_set.size(), 4u);
}

TEST(Keyring, Validation) {
    KeyRingInstance inst;
    inst.m = 0;
    EXPECT_THROW(inst.validate(), std::invalid_argument);
    inst.m = 5;  // 25 > 16
    EXPECT_THROW(inst.validate(), std::invalid_argument);
    inst.m = 1;
    inst.s = {0};
    inst.M = {{0}};  // diagonal must be 1
    EXPECT_THROW(inst.validate(), std::invalid_argument);
    inst.M = {{2}};
    EXPECT_THROW(inst.validate(), std::invalid_argument);
    inst.M = {{1}};
    EXPECT_NO_THROW(inst.validate());
}

TEST(Keyring, HalfBoundHoldsOnRandomInstances) {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 60; ++t) {
        KeyRingInstance inst;
        inst.m = 1 + t % 3;
        const std::size_t n = inst.m * inst.m;
        inst.s.resize(n);
        inst.M.assign(n, std::vector<int>(n));
        for (auto& e : inst.s) e = static_cast<int>(rng() % 2);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& e : inst.M[i]) e = static_cast<int>(rng() % 2);
            inst.M[i][i] = 1;
        }
        const auto sel = keyring_search(inst);
        EXPECT_GE(2 * sel.index_set.size(), inst.m);
        // check the reported index set against a direct recomputation
        for (std::size_t j = 0; j < n; ++j) {
            int tbit = inst.s[j];
            for (std::size_t i : sel.subset) tbit ^= inst.M[i][j];
            const bool in_set = std::find(sel.index_set.begin(), sel.index_set.end(), j) !=
                                sel.index_set.end();
            EXPECT_EQ(tbit == 1, in_set);
        }
    }
}

TEST(IndexSets, RangeBasics) {
    const auto r = IndexSet::range(5, 9);
    EXPECT_EQ(r.size(), 4);
    EXPECT_TRUE(r.contains(5));
    EXPECT_TRUE(r.contains(8));
    EXPECT_FALSE(r.contains(9));
    EXPECT_EQ(r.at(2), 7);
    EXPECT_EQ(r.first(2), IndexSet::range(5, 7));
    EXPECT_THROW(r.at(4), std::invalid_argument);
    EXPECT_THROW(r.first(5), std::invalid_argument);
    EXPECT_THROW(IndexSet::range(3, 1), std::invalid_argument);
}

TEST(IndexSets, ExplicitBasics) {
    const auto s = IndexSet::explicit_ids({Int(2), Int(5), Int(11)});
    EXPECT_EQ(s.size(), 3);
    EXPECT_TRUE(s.contains(5));
    EXPECT_FALSE(s.contains(4));
    EXPECT_EQ(s.at(1), 5);
    EXPECT_EQ(s.first(2), IndexSet::explicit_ids({Int(2), Int(5)}));
    EXPECT_THROW(IndexSet::explicit_ids({Int(3), Int(3)}), std::invalid_argument);
    EXPECT_THROW(IndexSet::explicit_ids({Int(5), Int(2)}), std::invalid_argument);
}

TEST(IndexSets, SubsetChecks) {
    const auto big = IndexSet::range(0, 100);
    EXPECT_TRUE(IndexSet::range(10, 20).subset_of(big));
    EXPECT_FALSE(IndexSet::range(90, 101).subset_of(big));
    EXPECT_TRUE(IndexSet::explicit_ids({Int(0), Int(99)}).subset_of(big));
    EXPECT_FALSE(IndexSet::explicit_ids({Int(100)}).subset_of(big));
    EXPECT_TRUE(IndexSet::range(3, 5).subset_of(IndexSet::explicit_ids({Int(2), Int(3), Int(4)})));
    // a symbolic range cannot be checked elementwise against an explicit list
    const auto huge = IndexSet::range(0, ipow(Int(10), 9));
    EXPECT_THROW(huge.subset_of(IndexSet::explicit_ids({Int(1)})), std::length_error);
    EXPECT_TRUE(huge.subset_of(IndexSet::range(0, ipow(Int(10), 12))));
}

TEST(Bipartite, StageSizes) {
    EXPECT_EQ(bound_bipartite_stage_sizes(1), (std::vector<Int>{4, 1}));
    EXPECT_EQ(bound_bipartite_stage_sizes(2), (std::vector<Int>{1024, 16, 2}));
    const auto s3 = bound_bipartite_stage_sizes(3);
    ASSERT_EQ(s3.size(), 4u);
    EXPECT_EQ(s3.back(), 3);
    for (std::size_t k = 1; k < s3.size(); ++k)
        EXPECT_EQ(s3[k - 1], Int(4 * s3[k] * s3[k]));  // each stage squares the doubled next
    EXPECT_THROW(bound_bipartite_stage_sizes(0), std::invalid_argument);
    EXPECT_THROW(bound_bipartite_stage_sizes(17), std::length_error);
}

TEST(Bipartite, FirstFitOrchestration) {
    const auto out = bipartite_orchestrate(2, first_fit_oracle);
    ASSERT_EQ(out.stages.size(), 2u);
    EXPECT_EQ(out.stages[0].instance_size, 1024);
    EXPECT_EQ(out.stages[0].lemma_m, 32);
    EXPECT_EQ(out.stages[0].kept, IndexSet::range(0, 16));
    EXPECT_EQ(out.stages[1].lemma_m, 4);
    EXPECT_EQ(out.stages[1].kept, IndexSet::range(0, 2));
    EXPECT_EQ(out.final_keys, IndexSet::range(0, 2));
    EXPECT_EQ(out.system.size(), 4u);
    EXPECT_EQ(out.system.lk("Z1", "R1"), 1);
    EXPECT_EQ(out.system.lk("Z2", "R2"), 1);
    EXPECT_EQ(out.system.lk("Z1", "Z2"), 0);
    EXPECT_EQ(out.system.lk("R1", "R2"), 0);
}

TEST(Bipartite, SymbolicScaleStaysCheap) {
    const auto out = bipartite_orchestrate(6, first_fit_oracle);
    EXPECT_EQ(out.stage_sizes[0], Int(ipow(Int(24), 64) / 4));
    EXPECT_EQ(out.final_keys, IndexSet::range(0, 6));
    EXPECT_EQ(out.system.size(), 12u);
}

TEST(Bipartite, OracleShortfalls) {
    const BipartiteOracle too_few = [](std::size_t, const Int& lemma_m, const IndexSet& avail) {
        return avail.first(lemma_m / 2 - 1);
    };
    EXPECT_THROW(bipartite_orchestrate(2, too_few), OracleShortfall);
    const BipartiteOracle outside = [](std::size_t, const Int& lemma_m, const IndexSet& avail) {
        return IndexSet::range(avail.hi, avail.hi + lemma_m / 2);
    };
    EXPECT_THROW(bipartite_orchestrate(2, outside), OracleShortfall);
}

TEST(EnlargeKey, Dichotomy) {
    EXPECT_EQ(enlarge_key(3, 0), (EnlargeResult{EnlargeChoice::SphereWithKey, Int(3)}));
    EXPECT_EQ(enlarge_key(3, -3), (EnlargeResult{EnlargeChoice::Sphere, Int(-3)}));
    EXPECT_EQ(enlarge_key(1, 5), (EnlargeResult{EnlargeChoice::Sphere, Int(5)}));
    EXPECT_NE(enlarge_key(3, 0).lk, 0);
    EXPECT_THROW(enlarge_key(0, 1), std::invalid_argument);
}

TEST(EnlargeKey, ModTwo) {
    EXPECT_EQ(enlarge_key_mod2(1, 0), (EnlargeResult{EnlargeChoice::SphereWithKey, Int(1)}));
    EXPECT_EQ(enlarge_key_mod2(1, 1), (EnlargeResult{EnlargeChoice::Sphere, Int(1)}));
    EXPECT_THROW(enlarge_key_mod2(2, 0), std::invalid_argument);
}

TEST(VertexBudget, Margins) {
    const auto b11 = vertex_budget_check(1, 1);
    EXPECT_TRUE(b11.ok);
    EXPECT_EQ(b11.lhs, 9);
    EXPECT_EQ(b11.rhs, 2);
    EXPECT_EQ(b11.margin, 7);
    const auto b12 = vertex_budget_check(1, 2);
    EXPECT_EQ(b12.lhs, 12);
    EXPECT_EQ(b12.rhs, 3);
    EXPECT_TRUE(vertex_budget_check(2, 3).ok);
    EXPECT_THROW(vertex_budget_check(0, 1), std::invalid_argument);
}

TEST(TwoComponent, ConnectSumExample) {
    const auto res = two_component_pipeline({Int(1), Int(1), Int(2)}, 2, zero_supplier());
    EXPECT_EQ(res.trace.branch, "connect_sum");
    EXPECT_EQ(res.trace.window_a, 0u);
    EXPECT_EQ(res.trace.window_b, 2u);
    EXPECT_EQ(res.lk, 2);
    EXPECT_EQ(res.chain, chain_of({{"Z1", 1}, {"Z2", 1}, {"F1", 1}}));
    ASSERT_EQ(res.trace.pairs.size(), 1u);
    EXPECT_EQ(res.trace.pairs[0].f_lk, 0);
}

TEST(TwoComponent, SingleKeyExample) {
    const auto res = two_component_pipeline({Int(3)}, 1, zero_supplier());
    EXPECT_EQ(res.trace.branch, "single_key");
    EXPECT_EQ(res.lk, 3);
    EXPECT_EQ(res.chain, chain_of({{"Z1", 1}}));
    EXPECT_TRUE(res.trace.pairs.empty());
}

TEST(TwoComponent, RingWithStitchingSphere) {
    // segments (1, 1) give the F window sum 2, a nonzero multiple of q = 2
    const auto res = two_component_pipeline({Int(1), Int(1)}, 2,
                                            explicit_supplier({{iv({1}), iv({1})}}));
    EXPECT_EQ(res.trace.branch, "ring_with_f");
    EXPECT_EQ(res.lk, 2);
    EXPECT_EQ(res.chain, chain_of({{"F1", 1}}));
    ASSERT_EQ(res.trace.pairs.size(), 1u);
    EXPECT_EQ(res.trace.pairs[0].window_a, 0u);
    EXPECT_EQ(res.trace.pairs[0].window_b, 2u);
}

TEST(TwoComponent, NegativeKeysAreReversed) {
    const auto res = two_component_pipeline({Int(-3)}, 1, zero_supplier());
    EXPECT_TRUE(res.trace.reversed);
    EXPECT_EQ(res.lk, 3);
}

TEST(TwoComponent, Validation) {
    EXPECT_THROW(two_component_pipeline({Int(1)}, 0, zero_supplier()), std::invalid_argument);
    EXPECT_THROW(two_component_pipeline({Int(1)}, 2, zero_supplier()), std::invalid_argument);
    EXPECT_THROW(two_component_pipeline({Int(1), Int(-1)}, 1, zero_supplier()),
                 std::invalid_argument);
    EXPECT_THROW(two_component_pipeline({Int(0)}, 1, zero_supplier()), std::invalid_argument);
}

TEST(TwoComponent, SeededReplay) {
    std::vector<Int> keys = {Int(2), Int(4), Int(2), Int(6)};
    const auto res = two_component_pipeline(keys, 4, seeded_supplier(7));
    EXPECT_NE(res.lk, 0);
    EXPECT_TRUE(res.lk % 4 == 0);
    EXPECT_NO_THROW(replay_two_component(keys, 4, seeded_supplier(7), res.trace));
    auto bad = res.trace;
    bad.lk += 4;
    EXPECT_THROW(replay_two_component(keys, 4, seeded_supplier(7), bad), ReplayMismatch);
}

TEST(Suppliers, SegmentsAreDeterministic) {
    const auto s = seeded_supplier(11, -5, 5);
    const auto a = s.segment(0, 3, 4);
    EXPECT_EQ(a, s.segment(0, 3, 4));
    EXPECT_NE(a, s.segment(1, 3, 4));
    EXPECT_EQ(a.size(), 4u);
    for (const auto& e : a) {
        EXPECT_GE(e, -5);
        EXPECT_LE(e, 5);
    }
    EXPECT_EQ(zero_supplier().segment(9, 9, 3), iv({0, 0, 0}));
    const auto ex = explicit_supplier({{iv({1, 2})}});
    EXPECT_EQ(ex.segment(0, 0, 2), iv({1, 2}));
    EXPECT_THROW(ex.segment(1, 0, 2), std::invalid_argument);
    EXPECT_THROW(ex.segment(0, 1, 2), std::invalid_argument);
    EXPECT_THROW(ex.segment(0, 0, 3), std::invalid_argument);
}

TEST(ModqParams, ClosedForms) {
    const auto p = compute_modq_params(0, 1, 1, 2);
    EXPECT_EQ(p.S, 1);
    EXPECT_EQ(p.T, 1);
    EXPECT_EQ(p.A, 48);
    EXPECT_EQ(p.B, 48);
    EXPECT_EQ(p.lambda, 16);
    EXPECT_EQ(p.w, 49);
    const auto p2 = compute_modq_params(1, 1, 100, 2);
    EXPECT_EQ(p2.S, 1);
    EXPECT_EQ(p2.T, 2);
    EXPECT_EQ(p2.A, 288);
    EXPECT_EQ(p2.lambda, 100);  // ell dominates (2q)^(S+T) = 64
    EXPECT_EQ(p2.w, 289);
    EXPECT_THROW(compute_modq_params(-1, 1, 1, 1), std::invalid_argument);
    EXPECT_THROW(compute_modq_params(0, 0, 1, 1), std::invalid_argument);
}

namespace {

// Synthetic H(u, v) scaffold: two parts of the requested size, u singletons,
// all cross-part linking numbers nonzero and singleton pairs divisible by q.
PartitionedSystem synthetic_base(std::size_t part_size, std::size_t u, const Int& lambda,
                                 const Int& q, std::uint64_t seed) {
    PartitionedSystem base;
    std::mt19937_64 rng(seed);
    auto nonzero = [&] {
        long long v;
        do {
            v = uniform_int(rng, -3, 3);
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
    for (std::size_t i = 0; i < u; ++i) {
        base.singletons.push_back("S" + std::to_string(i + 1));
        base.sys.add_component(base.singletons.back(), 0);
    }
    for (const auto& a : base.part1)
        for (const auto& b : base.part2) base.sys.set_lk(a, b, nonzero());
    for (const auto& s : base.singletons) {
        for (const auto& a : base.part1) base.sys.set_lk(a, s, nonzero());
        for (const auto& b : base.part2) base.sys.set_lk(b, s, nonzero());
    }
    for (std::size_t i = 0; i < u; ++i)
        for (std::size_t j = i + 1; j < u; ++j)
            base.sys.set_lk(base.singletons[i], base.singletons[j], q * nonzero());
    return base;
}

}  // namespace

TEST(ModqStep, FirstInductionStep) {
    const auto params = compute_modq_params(0, 1, 1, 2);
    const auto base = synthetic_base(to_size(params.w), 0, params.lambda, 2, 31);
    const auto out = theorem_modq_step(0, 1, 1, 2, base, seeded_supplier(13));
    EXPECT_EQ(out.z_id, "Z1");
    ASSERT_EQ(out.system.singletons, (std::vector<std::string>{"Z1"}));
    EXPECT_EQ(out.system.part1, out.x_ids);
    EXPECT_EQ(out.system.part1.size(), 1u);
    EXPECT_EQ(out.system.part2.size(), 1u);
    EXPECT_EQ(out.j_ids.size(), 48u);
    EXPECT_EQ(out.l_ids.size(), 48u);
    // z entries are the recorded linking numbers of Z1 with X and Y
    ASSERT_EQ(out.stitch.z.size(), 2u);
    EXPECT_EQ(out.system.sys.lk("Z1", out.x_ids[0]), out.stitch.z[0]);
    EXPECT_EQ(out.system.sys.lk("Z1", out.y_ids[0]), out.stitch.z[1]);
    EXPECT_TRUE(linkalg::verify_conclusion(out.stitch.z, 2));
    // the composed chain names only real components and stitching spheres
    for (const auto& [id, c] : out.composition.coeff) {
        EXPECT_NE(c, 0);
        EXPECT_TRUE(out.system.sys.has(id) || id.rfind("Z1.F", 0) == 0) << id;
    }
}

TEST(ModqStep, SecondInductionStepCarriesSingleton) {
    const auto params = compute_modq_params(1, 1, 1, 2);
    const auto base = synthetic_base(to_size(params.w), 1, params.lambda, 2, 77);
    const auto out = theorem_modq_step(1, 1, 1, 2, base, seeded_supplier(29));
    EXPECT_EQ(out.z_id, "Z2");
    ASSERT_EQ(out.system.singletons.size(), 2u);
    EXPECT_EQ(out.system.singletons[0], "S1");
    EXPECT_EQ(out.system.singletons[1], "Z2");
    EXPECT_EQ(out.y_ids.size(), 2u);
    EXPECT_EQ(out.y_ids[1], "S1");  // the old singleton joins the Y side
    EXPECT_TRUE(linkalg::verify_conclusion(out.stitch.z, 2));
    // Z2 links the old singleton by a nonzero multiple of q: the new pair
    // of singletons satisfies the H(2, 1) requirement
    const Int z_to_s = out.system.sys.lk("Z2", "S1");
    EXPECT_NE(z_to_s, 0);
    EXPECT_TRUE(z_to_s % 2 == 0);
}

TEST(ModqStep, ValidationNamesFailedCondition) {
    const auto params = compute_modq_params(0, 1, 1, 2);
    auto expect_contains = [&](const PartitionedSystem& base, const char* needle) {
        try {
            validate_modq_base(base, params);
            FAIL() << "expected failure mentioning " << needle;
        } catch (const std::invalid_argument& e) {
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    {
        auto base = synthetic_base(to_size(params.w), 1, params.lambda, 2, 1);
        expect_contains(base, "u singleton");
    }
    {
        auto base = synthetic_base(to_size(params.w) - 1, 0, params.lambda, 2, 1);
        expect_contains(base, "at least w");
    }
    {
        auto base = synthetic_base(to_size(params.w), 0, params.lambda, 2, 1);
        base.sys.set_lk(base.part1[3], base.part2[5], 0);
        expect_contains(base, "(L1)");
    }
    {
        auto base = synthetic_base(to_size(params.w), 0, Int(15), 2, 1);  // lambda = 16 needed
        expect_contains(base, "(L3)");
    }
    {
        auto base = synthetic_base(to_size(params.w), 0, params.lambda, 2, 1);
        base.part2[0] = base.part1[0];
        expect_contains(base, "twice");
    }
}

TEST(ModqStep, L2ViolationDetected) {
    const auto params = compute_modq_params(2, 1, 1, 1);
    auto base = synthetic_base(to_size(params.w), 2, params.lambda, 1, 9);
    base.sys.set_lk(base.singletons[0], base.singletons[1], 0);
    try {
        validate_modq_base(base, params);
        FAIL() << "expected (L2) failure";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("(L2)"), std::string::npos) << e.what();
    }
}

TEST(Bounds, KeyFormulas) {
    EXPECT_EQ(bound_key_q(1, 1), 24);
    EXPECT_EQ(bound_key_q(2, 1), 96);
    EXPECT_EQ(bound_key_q(1, 2), 36);
    EXPECT_EQ(bound_key_q(3, 1), 216);
    EXPECT_THROW(bound_key_q(0, 1), std::invalid_argument);
}

TEST(Bounds, KeyDiscFormula) {
    EXPECT_EQ(bound_keydisc(2, 2, 1, 1), 31);
    EXPECT_EQ(bound_keydisc(3, 3, 2, 2), 140);
    EXPECT_THROW(bound_keydisc(2, 2, 0, 1), std::invalid_argument);
}
