#pragma once

#include "linkalg.hpp"
#include "numeric.hpp"
#include "selection.hpp"
#include "simplicial.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace linkforge::pipelines {

using linkalg::Chain;
using linkalg::ComponentId;
using linkalg::LinkingVector;
using linkalg::LinkSystem;

// Desk-scale guard: pipelines materialize per-pair segment lists and
// component families; past this limit only the symbolic bound formulas apply.
inline constexpr std::uint64_t kMaterializeLimit = 2'000'000;

struct ReplayMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Segment suppliers: the linking numbers lk(P_l, targets) of stitching
// segments are inputs we do not control, so they are modeled as deterministic
// (seeded or explicit) functions. The pipelines' conclusions must hold for
// every choice.
// ---------------------------------------------------------------------------

struct SupplierSpec {
    enum class Kind { Zero, Seeded, Explicit };

    Kind kind = Kind::Zero;
    std::uint64_t seed = 0;
    long long lo = -5, hi = 5;                       // Seeded entry range
    std::vector<std::vector<LinkingVector>> table;   // Explicit: [pair][segment]

    void validate() const {
        if (kind == Kind::Seeded && lo > hi)
            throw std::invalid_argument("SupplierSpec: seeded range is empty");
    }

    LinkingVector segment(std::size_t pair, std::uint64_t seg, std::size_t dim) const {
        switch (kind) {
            case Kind::Zero:
                return LinkingVector(dim, Int(0));
            case Kind::Seeded: {
                LinkingVector out(dim);
                const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
                for (std::size_t c = 0; c < dim; ++c) {
                    std::uint64_t h = splitmix64(seed);
                    h = hash_combine(h, static_cast<std::uint64_t>(pair) + 1);
                    h = hash_combine(h, seg + 1);
                    h = hash_combine(h, static_cast<std::uint64_t>(c) + 1);
                    out[c] = Int(lo + static_cast<long long>(h % span));
                }
                return out;
            }
            case Kind::Explicit: {
                if (pair >= table.size())
                    throw std::invalid_argument("SupplierSpec: pair index beyond explicit table");
                const auto& segs = table[pair];
                if (seg >= segs.size())
                    throw std::invalid_argument("SupplierSpec: segment index beyond explicit table");
                const auto& v = segs[seg];
                if (v.size() != dim)
                    throw std::invalid_argument("SupplierSpec: explicit segment has wrong dimension");
                return v;
            }
        }
        throw std::logic_error("SupplierSpec: unknown kind");
    }

    bool operator==(const SupplierSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Sign-uniform selections
// ---------------------------------------------------------------------------

struct SignUniformSelection {
    std::vector<std::size_t> rows;   // the full chosen bucket, ascending
    std::string pattern;             // shared sign pattern of the bucket
    std::vector<int> column_signs;   // +1 keep, -1 reverse to make entries positive

    bool operator==(const SignUniformSelection&) const = default;
};

struct ThreeValuedSelection {
    std::vector<std::size_t> rows;
    std::string pattern;

    bool operator==(const ThreeValuedSelection&) const = default;
};

namespace detail {

// Largest bucket wins; ties break toward the lexicographically least pattern.
// std::map iteration order delivers the tie-break for free.
inline std::pair<std::string, std::vector<std::size_t>> largest_bucket(
    const std::map<std::string, std::vector<std::size_t>>& buckets) {
    const std::pair<const std::string, std::vector<std::size_t>>* best = nullptr;
    for (const auto& entry : buckets)
        if (!best || entry.second.size() > best->second.size()) best = &entry;
    if (!best) throw std::invalid_argument("sign selection: empty matrix");
    return {best->first, best->second};
}

}  // namespace detail

// Rows bucketed by their {+,-} sign pattern; returns the largest bucket
// (>= quota rows) plus the column reversals that make its entries positive.
inline SignUniformSelection select_sign_uniform_sublink(const std::vector<LinkingVector>& rows,
                                                        std::size_t quota) {
    std::map<std::string, std::vector<std::size_t>> buckets;
    for (std::size_t r = 0; r < rows.size(); ++r)
        buckets[linkalg::sign_pattern(rows[r], linkalg::PatternKind::TwoValued)].push_back(r);
    auto [pattern, members] = detail::largest_bucket(buckets);
    if (members.size() < quota)
        throw selection::NotFoundError("select_sign_uniform_sublink: no pattern bucket reaches quota " +
                                       std::to_string(quota));
    std::vector<int> column_signs(pattern.size());
    for (std::size_t c = 0; c < pattern.size(); ++c) column_signs[c] = pattern[c] == '+' ? 1 : -1;
    return {std::move(members), std::move(pattern), std::move(column_signs)};
}

// Same bucketing over the {+,-,0} alphabet; zero columns are legitimate here.
inline ThreeValuedSelection select_three_valued_sublink(const std::vector<LinkingVector>& rows,
                                                        std::size_t quota) {
    std::map<std::string, std::vector<std::size_t>> buckets;
    for (std::size_t r = 0; r < rows.size(); ++r)
        buckets[linkalg::sign_pattern(rows[r], linkalg::PatternKind::ThreeValued)].push_back(r);
    auto [pattern, members] = detail::largest_bucket(buckets);
    if (members.size() < quota)
        throw selection::NotFoundError("select_three_valued_sublink: no pattern bucket reaches quota " +
                                       std::to_string(quota));
    return {std::move(members), std::move(pattern)};
}

// First index i in 0..|ells| such that j (i = 0) or j + ells[i-1] is entrywise
// nonzero. The pipeline's sign structure guarantees a hit: per coordinate the
// candidate values are strictly monotone or constant nonzero, so each
// coordinate rules out at most one candidate.
inline std::size_t choose_nonvanishing_base(const LinkingVector& j,
                                            const std::vector<LinkingVector>& ells) {
    for (const auto& e : ells)
        if (e.size() != j.size())
            throw std::invalid_argument("choose_nonvanishing_base: dimension mismatch");
    for (std::size_t i = 0; i <= ells.size(); ++i) {
        bool ok = true;
        for (std::size_t c = 0; c < j.size() && ok; ++c) {
            Int val = j[c];
            if (i > 0) val += ells[i - 1][c];
            if (val == 0) ok = false;
        }
        if (ok) return i;
    }
    throw std::logic_error("choose_nonvanishing_base: every candidate vanished somewhere");
}

// ---------------------------------------------------------------------------
// Stitching
// ---------------------------------------------------------------------------

struct StitchStep {
    std::vector<std::size_t> mu;              // equal-residue prefix indices
    std::size_t lemma_j = 0, lemma_k = 0;     // pair chosen on the shifted sums
    std::size_t range_first = 0, range_last = 0;  // chosen segments, 1-based inclusive
    LinkingVector z_after;

    bool operator==(const StitchStep&) const = default;
};

// One consecutive-pair stitch: pick 2^d + 1 prefix indices with equal residue
// vectors mod q, then a pair (j,k) among the corresponding partial sums such
// that adding segments mu_j+1 .. mu_k keeps z entrywise nonzero. The
// divisibility z' = z (mod q) is automatic from the equal residues.
inline StitchStep stitch_consecutive(const LinkingVector& z,
                                     const std::vector<LinkingVector>& segments, const Int& q) {
    if (q < 1) throw std::invalid_argument("stitch_consecutive: modulus must be >= 1");
    if (z.empty()) throw std::invalid_argument("stitch_consecutive: empty linking vector");
    for (const auto& e : z)
        if (e == 0 || e % q != 0)
            throw std::invalid_argument(
                "stitch_consecutive: z must be entrywise a nonzero multiple of q");
    const std::size_t d = z.size();
    if (d > 32) throw std::invalid_argument("stitch_consecutive: dimension too large");
    if (Int(static_cast<std::uint64_t>(segments.size())) < ipow(2 * q, d))
        throw std::invalid_argument("stitch_consecutive: needs at least (2q)^d segments");

    const std::size_t count = (std::size_t{1} << d) + 1;
    const auto window = selection::find_equal_residue_indices(segments, q, count);
    const auto prefix = selection::prefix_sums(segments, d);

    std::vector<LinkingVector> p(count, LinkingVector(d));
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t c = 0; c < d; ++c)
            p[i][c] = prefix[window.indices[i]][c] - prefix[window.indices[0]][c];

    const auto [lj, lk] = selection::find_nonvanishing_shift(z, p);

    StitchStep step;
    step.mu = window.indices;
    step.lemma_j = lj;
    step.lemma_k = lk;
    step.range_first = window.indices[lj] + 1;
    step.range_last = window.indices[lk];
    step.z_after.resize(d);
    for (std::size_t c = 0; c < d; ++c) step.z_after[c] = z[c] + p[lk][c] - p[lj][c];
    for (const auto& e : step.z_after)
        if (e == 0 || e % q != 0)
            throw std::logic_error("stitch_consecutive: output violates the divisibility invariant");
    return step;
}

struct StitchInput {
    std::size_t S = 0, T = 0;
    Int q = 1;
    std::vector<LinkingVector> JX, JY, LX, LY;
    std::uint64_t lambda = 0;  // segments supplied per consecutive pair
    SupplierSpec supplier;

    void validate() const {
        if (S + T < 1) throw std::invalid_argument("StitchInput: S + T must be >= 1");
        if (q < 1) throw std::invalid_argument("StitchInput: q must be >= 1");
        const std::size_t A = JX.size(), B = LX.size();
        if (JY.size() != A) throw std::invalid_argument("StitchInput: JX/JY row counts differ");
        if (LY.size() != B) throw std::invalid_argument("StitchInput: LX/LY row counts differ");
        auto check_width = [](const std::vector<LinkingVector>& m, std::size_t w, const char* name) {
            for (const auto& row : m)
                if (row.size() != w)
                    throw std::invalid_argument(std::string("StitchInput: ") + name +
                                                " row width mismatch");
        };
        check_width(JX, S, "JX");
        check_width(JY, T, "JY");
        check_width(LX, S, "LX");
        check_width(LY, T, "LY");
        const Int qpow = ipow(q, S + T);
        if (Int(static_cast<std::uint64_t>(A)) < ipow(Int(2), S) * qpow)
            throw std::invalid_argument("StitchInput: hypothesis A >= 2^S q^(S+T) violated");
        if (Int(static_cast<std::uint64_t>(B)) <
            ipow(Int(3), S) * ipow(Int(2), T) * Int(S + T) * qpow)
            throw std::invalid_argument(
                "StitchInput: hypothesis B >= 3^S 2^T (S+T) q^(S+T) violated");
        for (const auto& row : JX)
            for (const auto& e : row)
                if (e == 0) throw std::invalid_argument("StitchInput: JX must have no zero entry");
        for (const auto& row : LY)
            for (const auto& e : row)
                if (e == 0) throw std::invalid_argument("StitchInput: LY must have no zero entry");
        if (Int(lambda) < ipow(2 * q, S + T))
            throw std::invalid_argument("StitchInput: hypothesis lambda >= (2q)^(S+T) violated");
        if (lambda > kMaterializeLimit)
            throw std::length_error("StitchInput: lambda exceeds the materialization limit");
        supplier.validate();
    }

    bool operator==(const StitchInput&) const = default;
};

struct StitchTrace {
    std::string jx_pattern;
    std::vector<std::size_t> x_reversals;
    std::string ly_pattern;
    std::vector<std::size_t> y_reversals;
    std::string lx_pattern;
    std::vector<std::size_t> j_rows;  // J': rows feeding the alpha window
    std::vector<std::size_t> l_rows;  // L'': rows feeding the beta window
    std::size_t alpha0 = 0, alpha1 = 0;
    std::vector<std::size_t> beta;
    std::size_t base_index = 0;
    std::vector<ComponentId> components;  // stitched components, in order
    LinkingVector z0;
    std::vector<StitchStep> steps;
    LinkingVector z;
    Chain chain;

    bool operator==(const StitchTrace&) const = default;
};

struct StitchResult {
    Chain Z;
    LinkingVector z;
    StitchTrace trace;

    bool operator==(const StitchResult&) const = default;
};

// The main stitching pipeline. Stages: make a sign-uniform J-sublink positive
// in X, a sign-uniform L-sublink positive in Y, restrict to a three-valued
// X-pattern; pick the alpha window (two equal-residue J prefixes), the beta
// windows (S+T+1 equal-residue L prefixes), and a base so z0 has no zero
// entry; then stitch consecutive components, each stitch preserving
// "entrywise nonzero and divisible by q".
inline StitchResult stitch_links(const StitchInput& in) {
    in.validate();
    const std::size_t d = in.S + in.T;
    const std::size_t quota_j = to_size(ipow(in.q, d), "J quota");
    const std::size_t quota_l = to_size(Int(d) * ipow(in.q, d), "L quota");
    const std::size_t quota_ly =
        to_size(ipow(Int(3), in.S) * Int(d) * ipow(in.q, d), "L sign quota");

    auto JX = in.JX;
    auto JY = in.JY;
    auto LX = in.LX;
    auto LY = in.LY;

    StitchTrace trace;

    // X-signs from the J rows; reversals hit the X columns of J and L alike.
    const auto sel_x = select_sign_uniform_sublink(JX, quota_j);
    trace.jx_pattern = sel_x.pattern;
    for (std::size_t c = 0; c < in.S; ++c)
        if (sel_x.column_signs[c] < 0) {
            trace.x_reversals.push_back(c);
            for (auto& row : JX) row[c] = -row[c];
            for (auto& row : LX) row[c] = -row[c];
        }

    // Y-signs from the L rows; reversals hit the Y columns of L and J alike.
    const auto sel_y = select_sign_uniform_sublink(LY, quota_ly);
    trace.ly_pattern = sel_y.pattern;
    for (std::size_t c = 0; c < in.T; ++c)
        if (sel_y.column_signs[c] < 0) {
            trace.y_reversals.push_back(c);
            for (auto& row : LY) row[c] = -row[c];
            for (auto& row : JY) row[c] = -row[c];
        }

    // Three-valued X-pattern among the Y-uniform L rows.
    std::vector<LinkingVector> lx_sub;
    lx_sub.reserve(sel_y.rows.size());
    for (std::size_t r : sel_y.rows) lx_sub.push_back(LX[r]);
    const auto sel_3 = select_three_valued_sublink(lx_sub, quota_l);
    trace.lx_pattern = sel_3.pattern;

    trace.j_rows.assign(sel_x.rows.begin(), sel_x.rows.begin() + static_cast<std::ptrdiff_t>(quota_j));
    trace.l_rows.reserve(quota_l);
    for (std::size_t i = 0; i < quota_l; ++i) trace.l_rows.push_back(sel_y.rows[sel_3.rows[i]]);

    auto concat_row = [](const LinkingVector& a, const LinkingVector& b) {
        LinkingVector out;
        out.reserve(a.size() + b.size());
        out.insert(out.end(), a.begin(), a.end());
        out.insert(out.end(), b.begin(), b.end());
        return out;
    };

    std::vector<LinkingVector> j_vectors, l_vectors;
    j_vectors.reserve(quota_j);
    for (std::size_t r : trace.j_rows) j_vectors.push_back(concat_row(JX[r], JY[r]));
    l_vectors.reserve(quota_l);
    for (std::size_t r : trace.l_rows) l_vectors.push_back(concat_row(LX[r], LY[r]));

    const auto alpha = selection::find_equal_residue_indices(j_vectors, in.q, 2);
    trace.alpha0 = alpha.indices[0];
    trace.alpha1 = alpha.indices[1];
    const auto beta = selection::find_equal_residue_indices(l_vectors, in.q, d + 1);
    trace.beta = beta.indices;

    const auto j_prefix = selection::prefix_sums(j_vectors, d);
    const auto l_prefix = selection::prefix_sums(l_vectors, d);

    LinkingVector j(d);
    for (std::size_t c = 0; c < d; ++c)
        j[c] = j_prefix[trace.alpha1][c] - j_prefix[trace.alpha0][c];
    std::vector<LinkingVector> ells(d, LinkingVector(d));
    for (std::size_t i = 1; i <= d; ++i)
        for (std::size_t c = 0; c < d; ++c)
            ells[i - 1][c] = l_prefix[trace.beta[i]][c] - l_prefix[trace.beta[0]][c];

    trace.base_index = choose_nonvanishing_base(j, ells);

    trace.z0 = j;
    if (trace.base_index > 0)
        for (std::size_t c = 0; c < d; ++c) trace.z0[c] += ells[trace.base_index - 1][c];

    for (std::size_t pos = trace.alpha0; pos < trace.alpha1; ++pos)
        trace.components.push_back("J" + std::to_string(trace.j_rows[pos] + 1));
    for (std::size_t pos = trace.beta[0]; pos < trace.beta[trace.base_index]; ++pos)
        trace.components.push_back("L" + std::to_string(trace.l_rows[pos] + 1));

    LinkingVector z = trace.z0;
    const std::size_t C = trace.components.size();
    for (std::size_t c = 0; c + 1 < C; ++c) {
        std::vector<LinkingVector> segments;
        segments.reserve(static_cast<std::size_t>(in.lambda));
        for (std::uint64_t l = 0; l < in.lambda; ++l)
            segments.push_back(in.supplier.segment(c, l, d));
        StitchStep step = stitch_consecutive(z, segments, in.q);
        z = step.z_after;
        trace.steps.push_back(std::move(step));
    }
    trace.z = z;

    Chain chain;
    for (const auto& id : trace.components) chain.add(id, 1);
    for (std::size_t c = 0; c + 1 < C; ++c) chain.add("F" + std::to_string(c + 1), 1);
    trace.chain = chain;

    if (!linkalg::verify_conclusion(z, in.q))
        throw std::logic_error("stitch_links: conclusion check failed");
    return {std::move(chain), std::move(z), std::move(trace)};
}

// Re-runs the pipeline and checks the recorded trace field by field; any
// difference means the input or the trace was tampered with.
inline StitchResult replay_stitch(const StitchInput& in, const StitchTrace& expected) {
    StitchResult out = stitch_links(in);
    const StitchTrace& t = out.trace;
    auto fail = [](const char* field) {
        throw ReplayMismatch(std::string("stitch replay mismatch in field ") + field);
    };
    if (t.jx_pattern != expected.jx_pattern) fail("jx_pattern");
    if (t.x_reversals != expected.x_reversals) fail("x_reversals");
    if (t.ly_pattern != expected.ly_pattern) fail("ly_pattern");
    if (t.y_reversals != expected.y_reversals) fail("y_reversals");
    if (t.lx_pattern != expected.lx_pattern) fail("lx_pattern");
    if (t.j_rows != expected.j_rows) fail("j_rows");
    if (t.l_rows != expected.l_rows) fail("l_rows");
    if (t.alpha0 != expected.alpha0) fail("alpha0");
    if (t.alpha1 != expected.alpha1) fail("alpha1");
    if (t.beta != expected.beta) fail("beta");
    if (t.base_index != expected.base_index) fail("base_index");
    if (t.components != expected.components) fail("components");
    if (t.z0 != expected.z0) fail("z0");
    if (t.steps != expected.steps) fail("steps");
    if (t.z != expected.z) fail("z");
    if (!(t.chain == expected.chain)) fail("chain");
    return out;
}

// ---------------------------------------------------------------------------
// Key rings (desk-scale exhaustive search for the external lemma's statement)
// ---------------------------------------------------------------------------

struct KeyRingInstance {
    std::size_t m = 1;
    std::vector<int> s;                // mod-2 links of the tube sphere to X_j
    std::vector<std::vector<int>> M;   // mod-2 links M[i][j] of J_i to X_j

    void validate() const {
        if (m < 1) throw std::invalid_argument("KeyRingInstance: m must be >= 1");
        const std::size_t n = m * m;
        if (n > 16) throw std::invalid_argument("KeyRingInstance: m^2 > 16 is beyond desk scale");
        if (s.size() != n) throw std::invalid_argument("KeyRingInstance: s must have m^2 entries");
        if (M.size() != n) throw std::invalid_argument("KeyRingInstance: M must be m^2 x m^2");
        for (std::size_t i = 0; i < n; ++i) {
            if (M[i].size() != n)
                throw std::invalid_argument("KeyRingInstance: M must be m^2 x m^2");
            for (int e : M[i])
                if (e != 0 && e != 1)
                    throw std::invalid_argument("KeyRingInstance: matrix entries must be 0/1");
            if (M[i][i] != 1)
                throw std::invalid_argument("KeyRingInstance: diagonal entries must be 1");
        }
        for (int e : s)
            if (e != 0 && e != 1)
                throw std::invalid_argument("KeyRingInstance: s entries must be 0/1");
    }

    bool operator==(const KeyRingInstance&) const = default;
};

struct KeyRingSelection {
    std::vector<std::size_t> subset;     // toggled J indices, 0-based
    std::vector<std::size_t> index_set;  // I = { j : t_j = 1 }

    bool operator==(const KeyRingSelection&) const = default;
};

struct KeyringModelFailure : std::runtime_error {
    KeyRingInstance instance;

    explicit KeyringModelFailure(KeyRingInstance inst)
        : std::runtime_error("keyring_search: no subset reaches |I| >= m/2; "
                             "candidate counterexample to the external lemma"),
          instance(std::move(inst)) {}
};

namespace detail {

inline bool next_combination(std::vector<std::size_t>& comb, std::size_t n) {
    const std::size_t k = comb.size();
    std::size_t i = k;
    while (i > 0) {
        --i;
        if (comb[i] != n - k + i) {
            ++comb[i];
            for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace detail

// Exhaustive search over subsets A (size-then-lex order) for the toggle set
// maximizing |I| where t = s + sum of toggled rows (mod 2) and I is t's
// support. Reports a model failure when even the best subset leaves |I| below
// m/2 (the external lemma promises this never happens).
inline KeyRingSelection keyring_search(const KeyRingInstance& inst) {
    inst.validate();
    const std::size_t n = inst.m * inst.m;
    KeyRingSelection best;
    bool have_best = false;
    for (std::size_t size = 0; size <= n; ++size) {
        std::vector<std::size_t> comb(size);
        for (std::size_t i = 0; i < size; ++i) comb[i] = i;
        do {
            std::vector<std::size_t> index_set;
            for (std::size_t j = 0; j < n; ++j) {
                int t = inst.s[j];
                for (std::size_t i : comb) t ^= inst.M[i][j];
                if (t) index_set.push_back(j);
            }
            if (!have_best || index_set.size() > best.index_set.size()) {
                best = {comb, std::move(index_set)};
                have_best = true;
            }
        } while (size > 0 && detail::next_combination(comb, n));
    }
    if (2 * best.index_set.size() < inst.m) throw KeyringModelFailure(inst);
    return best;
}

// ---------------------------------------------------------------------------
// Bipartite-pattern orchestration at symbolic scale
// ---------------------------------------------------------------------------

// Set of component indices, either a contiguous range [lo, hi) or an explicit
// ascending list. Ranges let stages of astronomic size stay symbolic.
struct IndexSet {
    enum class Kind { Range, Explicit };

    Kind kind = Kind::Range;
    Int lo = 0, hi = 0;     // Range: [lo, hi)
    std::vector<Int> ids;   // Explicit: strictly ascending

    static IndexSet range(Int lo, Int hi) {
        if (hi < lo) throw std::invalid_argument("IndexSet: inverted range");
        IndexSet out;
        out.kind = Kind::Range;
        out.lo = std::move(lo);
        out.hi = std::move(hi);
        return out;
    }

    static IndexSet explicit_ids(std::vector<Int> list) {
        for (std::size_t i = 0; i + 1 < list.size(); ++i)
            if (!(list[i] < list[i + 1]))
                throw std::invalid_argument("IndexSet: explicit ids must be strictly ascending");
        IndexSet out;
        out.kind = Kind::Explicit;
        out.ids = std::move(list);
        return out;
    }

    Int size() const {
        return kind == Kind::Range ? hi - lo : Int(static_cast<std::uint64_t>(ids.size()));
    }

    bool contains(const Int& x) const {
        if (kind == Kind::Range) return lo <= x && x < hi;
        return std::binary_search(ids.begin(), ids.end(), x);
    }

    bool subset_of(const IndexSet& other) const {
        if (kind == Kind::Range) {
            if (lo == hi) return true;
            if (other.kind == Kind::Range) return other.lo <= lo && hi <= other.hi;
            if (hi - lo > Int(kMaterializeLimit))
                throw std::length_error("IndexSet: range too large to check against explicit set");
            for (Int x = lo; x < hi; ++x)
                if (!other.contains(x)) return false;
            return true;
        }
        for (const auto& x : ids)
            if (!other.contains(x)) return false;
        return true;
    }

    IndexSet first(const Int& k) const {
        if (k < 0 || k > size()) throw std::invalid_argument("IndexSet: bad prefix size");
        if (kind == Kind::Range) return range(lo, lo + k);
        std::vector<Int> head(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(to_size(k)));
        return explicit_ids(std::move(head));
    }

    Int at(const Int& i) const {
        if (i < 0 || i >= size()) throw std::invalid_argument("IndexSet: index out of range");
        if (kind == Kind::Range) return lo + i;
        return ids[to_size(i)];
    }

    bool operator==(const IndexSet&) const = default;
};

struct OracleShortfall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// m_k = (4r)^(2^(r-k)) / 4 for k = 0..r; the division is exact.
inline std::vector<Int> bound_bipartite_stage_sizes(std::size_t r) {
    if (r < 1) throw std::invalid_argument("bound_bipartite_stage_sizes: r must be >= 1");
    if (r > 16)
        throw std::length_error("bound_bipartite_stage_sizes: m_0 too large to materialize");
    std::vector<Int> sizes;
    sizes.reserve(r + 1);
    for (std::size_t k = 0; k <= r; ++k)
        sizes.push_back(ipow(Int(4 * static_cast<std::uint64_t>(r)),
                             std::uint64_t{1} << (r - k)) /
                        4);
    return sizes;
}

// Oracle contract: given the stage index, the lemma's m parameter and the
// available key indices (of size lemma_m^2), return at least lemma_m/2 of
// them whose mod-2 pattern the lemma certifies.
using BipartiteOracle =
    std::function<IndexSet(std::size_t stage, const Int& lemma_m, const IndexSet& available)>;

inline IndexSet first_fit_oracle(std::size_t, const Int& lemma_m, const IndexSet& available) {
    return available.first(lemma_m / 2);
}

struct BipartiteStage {
    std::size_t stage = 0;
    Int instance_size, lemma_m, returned_size;
    IndexSet kept;

    bool operator==(const BipartiteStage&) const = default;
};

struct BipartiteResult {
    std::vector<Int> stage_sizes;  // m_0..m_r
    std::vector<BipartiteStage> stages;
    IndexSet final_keys;
    LinkSystem system;  // K_{r,r} mod-2 pattern on Z_1..Z_r vs the final keys
};

// Runs the staged halving induction: stage k hands the oracle an instance of
// size m_{k-1} = (2 m_k)^2 and keeps the first m_k of the returned indices.
// After stage r at least r keys survive; they form the bipartite pattern with
// the r ring components.
inline BipartiteResult bipartite_orchestrate(std::size_t r, const BipartiteOracle& oracle) {
    BipartiteResult out;
    out.stage_sizes = bound_bipartite_stage_sizes(r);
    IndexSet available = IndexSet::range(0, out.stage_sizes[0]);
    for (std::size_t k = 1; k <= r; ++k) {
        const Int& mk = out.stage_sizes[k];
        const Int lemma_m = 2 * mk;
        if (available.size() != lemma_m * lemma_m)
            throw std::logic_error("bipartite_orchestrate: stage size drift");
        IndexSet returned = oracle(k, lemma_m, available);
        if (!returned.subset_of(available))
            throw OracleShortfall("bipartite_orchestrate: stage " + std::to_string(k) +
                                  " oracle returned indices outside the available set");
        if (returned.size() < mk)
            throw OracleShortfall("bipartite_orchestrate: stage " + std::to_string(k) +
                                  " oracle returned " + returned.size().str() +
                                  " indices, needs " + mk.str());
        IndexSet kept = returned.first(mk);
        out.stages.push_back({k, available.size(), lemma_m, returned.size(), kept});
        available = std::move(kept);
    }
    out.final_keys = available.first(Int(static_cast<std::uint64_t>(r)));
    for (std::size_t j = 1; j <= r; ++j)
        out.system.add_component("Z" + std::to_string(j));
    std::vector<ComponentId> key_ids;
    for (std::size_t i = 0; i < r; ++i) {
        ComponentId id = "R" + Int(out.final_keys.at(Int(static_cast<std::uint64_t>(i))) + 1).str();
        key_ids.push_back(id);
        out.system.add_component(id);
    }
    for (std::size_t j = 1; j <= r; ++j)
        for (const auto& key : key_ids) out.system.set_lk("Z" + std::to_string(j), key, 1);
    return out;
}

// ---------------------------------------------------------------------------
// Key enlargement and the vertex budget
// ---------------------------------------------------------------------------

enum class EnlargeChoice { Sphere, SphereWithKey };

struct EnlargeResult {
    EnlargeChoice choice = EnlargeChoice::Sphere;
    Int lk;

    bool operator==(const EnlargeResult&) const = default;
};

// Homology-class dichotomy: if the sphere alone links X it is the enlarged
// key; otherwise adding the old key Y shifts the class by a nonzero amount.
inline EnlargeResult enlarge_key(const Int& lkXY, const Int& lkXS) {
    if (lkXY == 0) throw std::invalid_argument("enlarge_key: lk(X,Y) must be nonzero");
    if (lkXS != 0) return {EnlargeChoice::Sphere, lkXS};
    return {EnlargeChoice::SphereWithKey, lkXS + lkXY};
}

inline EnlargeResult enlarge_key_mod2(int lk2XY, int lk2XS) {
    if ((lk2XY != 0 && lk2XY != 1) || (lk2XS != 0 && lk2XS != 1))
        throw std::invalid_argument("enlarge_key_mod2: residues must be 0/1");
    auto out = enlarge_key(Int(lk2XY), Int(lk2XS));
    out.lk = floor_mod(out.lk, 2);
    return out;
}

struct BudgetCheck {
    bool ok = false;
    Int lhs, rhs, margin;

    bool operator==(const BudgetCheck&) const = default;
};

// (4q-1)(n+2) >= 2d - (n+1) with d = q+n: the prism over a q-length path fits
// inside a complete complex with the stated vertex budget.
inline BudgetCheck vertex_budget_check(const Int& q, const Int& n) {
    if (q < 1 || n < 1) throw std::invalid_argument("vertex_budget_check: q, n must be >= 1");
    BudgetCheck out;
    out.lhs = (4 * q - 1) * (n + 2);
    out.rhs = 2 * (q + n) - (n + 1);
    out.margin = out.lhs - out.rhs;
    out.ok = out.margin >= 0;
    return out;
}

// ---------------------------------------------------------------------------
// Two-component pipeline
// ---------------------------------------------------------------------------

struct TwoComponentPairRecord {
    std::size_t pair_index = 0;
    std::size_t window_a = 0, window_b = 0;  // chosen segment window (a, b]
    Int f_lk;

    bool operator==(const TwoComponentPairRecord&) const = default;
};

struct TwoComponentTrace {
    bool reversed = false;
    std::size_t window_a = 0, window_b = 0;  // key window (a, b]
    std::string branch;                      // single_key | ring_with_f | connect_sum
    std::vector<TwoComponentPairRecord> pairs;
    Chain chain;
    Int lk;

    bool operator==(const TwoComponentTrace&) const = default;
};

struct TwoComponentResult {
    Chain chain;
    Int lk;
    TwoComponentTrace trace;

    bool operator==(const TwoComponentResult&) const = default;
};

// Ring-and-keys argument: a window of consecutive keys whose linking numbers
// sum to 0 mod q always exists among the first q; either it is one key, or
// the stitching spheres F_c joining consecutive keys settle the outcome (a
// nonzero lk(R, F_c) gives the two-component link directly; all-zero lets the
// keys connect-sum into one class).
inline TwoComponentResult two_component_pipeline(const std::vector<Int>& ring_lk, const Int& q,
                                                 const SupplierSpec& supplier) {
    if (q < 1) throw std::invalid_argument("two_component_pipeline: q must be >= 1");
    const std::size_t qs = to_size(q, "modulus");
    if (ring_lk.size() < qs)
        throw std::invalid_argument("two_component_pipeline: needs at least q keys");
    int sgn = 0;
    for (const auto& e : ring_lk) {
        if (e == 0) throw std::invalid_argument("two_component_pipeline: zero key linking number");
        if (sgn == 0)
            sgn = sign_of(e);
        else if (sign_of(e) != sgn)
            throw std::invalid_argument("two_component_pipeline: keys must share one sign");
    }
    supplier.validate();

    TwoComponentTrace trace;
    trace.reversed = sgn < 0;
    std::vector<Int> keys = ring_lk;
    if (trace.reversed)
        for (auto& e : keys) e = -e;

    const auto [a, b] = selection::zero_sum_window(keys, q);
    trace.window_a = a;
    trace.window_b = b;

    Chain chain;
    Int lk = 0;
    if (b - a == 1) {
        trace.branch = "single_key";
        chain.add("Z" + std::to_string(b), 1);
        lk = keys[b - 1];
    } else {
        bool ring_found = false;
        for (std::size_t c = a; c + 1 < b && !ring_found; ++c) {
            std::vector<Int> segs(qs);
            for (std::size_t i = 0; i < qs; ++i)
                segs[i] = supplier.segment(c, i, 1)[0];
            const auto [fa, fb] = selection::zero_sum_window(segs, q);
            Int f_lk = 0;
            for (std::size_t i = fa; i < fb; ++i) f_lk += segs[i];
            trace.pairs.push_back({c, fa, fb, f_lk});
            if (f_lk != 0) {
                trace.branch = "ring_with_f";
                chain.add("F" + std::to_string(c + 1), 1);
                lk = f_lk;
                ring_found = true;
            }
        }
        if (!ring_found) {
            trace.branch = "connect_sum";
            for (std::size_t i = a; i < b; ++i) {
                chain.add("Z" + std::to_string(i + 1), 1);
                lk += keys[i];
            }
            for (std::size_t c = a; c + 1 < b; ++c) chain.add("F" + std::to_string(c + 1), 1);
        }
    }
    if (lk == 0 || lk % q != 0)
        throw std::logic_error("two_component_pipeline: conclusion check failed");
    trace.chain = chain;
    trace.lk = lk;
    return {std::move(chain), std::move(lk), std::move(trace)};
}

inline TwoComponentResult replay_two_component(const std::vector<Int>& ring_lk, const Int& q,
                                               const SupplierSpec& supplier,
                                               const TwoComponentTrace& expected) {
    TwoComponentResult out = two_component_pipeline(ring_lk, q, supplier);
    const TwoComponentTrace& t = out.trace;
    auto fail = [](const char* field) {
        throw ReplayMismatch(std::string("two-component replay mismatch in field ") + field);
    };
    if (t.reversed != expected.reversed) fail("reversed");
    if (t.window_a != expected.window_a) fail("window_a");
    if (t.window_b != expected.window_b) fail("window_b");
    if (t.branch != expected.branch) fail("branch");
    if (t.pairs != expected.pairs) fail("pairs");
    if (!(t.chain == expected.chain)) fail("chain");
    if (t.lk != expected.lk) fail("lk");
    return out;
}

// ---------------------------------------------------------------------------
// Main induction step
// ---------------------------------------------------------------------------

struct ModqParams {
    Int u, v, ell, q;
    Int S, T, A, B, lambda, w;

    bool operator==(const ModqParams&) const = default;
};

inline ModqParams compute_modq_params(const Int& u, const Int& v, const Int& ell, const Int& q) {
    if (u < 0) throw std::invalid_argument("compute_modq_params: u must be >= 0");
    if (v < 1) throw std::invalid_argument("compute_modq_params: v must be >= 1");
    if (ell < 1) throw std::invalid_argument("compute_modq_params: ell must be >= 1");
    if (q < 1) throw std::invalid_argument("compute_modq_params: q must be >= 1");
    ModqParams p;
    p.u = u;
    p.v = v;
    p.ell = ell;
    p.q = q;
    p.S = v;
    p.T = u + v;
    const std::uint64_t es = static_cast<std::uint64_t>(to_size(p.S, "S"));
    const std::uint64_t et = static_cast<std::uint64_t>(to_size(p.T, "T"));
    p.A = ipow(Int(2), et) * ipow(Int(3), es) * (p.S + p.T) * ipow(q, es + et);
    p.B = p.A;
    p.lambda = std::max(ell, ipow(2 * q, es + et));
    p.w = p.S + p.A;
    return p;
}

// Partitioned link system modelling the H(u, v) induction scaffold: two parts
// of equal size plus u singleton components.
struct PartitionedSystem {
    LinkSystem sys;
    std::vector<ComponentId> part1, part2, singletons;
};

// Base-case conditions, named as in the induction step's hypotheses:
// (L1) every cross-part linking number is nonzero;
// (L2) every singleton pair links by a nonzero multiple of q;
// (L3) every part member carries a path-length certificate >= lambda.
inline void validate_modq_base(const PartitionedSystem& base, const ModqParams& p) {
    const std::size_t u = to_size(p.u, "u");
    const std::size_t w = to_size(p.w, "w");
    if (base.singletons.size() != u)
        throw std::invalid_argument("modq base: expected exactly u singleton components");
    if (base.part1.size() < w || base.part2.size() < w)
        throw std::invalid_argument("modq base: parts must have at least w = S + A components");

    std::map<ComponentId, int> seen;
    auto note = [&](const std::vector<ComponentId>& ids) {
        for (const auto& id : ids) {
            base.sys.index_of(id);  // throws on unknown ids
            if (++seen[id] > 1)
                throw std::invalid_argument("modq base: component " + id +
                                            " appears twice in the partition");
        }
    };
    note(base.part1);
    note(base.part2);
    note(base.singletons);

    auto cross_nonzero = [&](const std::vector<ComponentId>& xs,
                             const std::vector<ComponentId>& ys) {
        for (const auto& x : xs)
            for (const auto& y : ys)
                if (base.sys.lk(x, y) == 0)
                    throw std::invalid_argument("modq base: (L1) violated for pair (" + x + ", " +
                                                y + ")");
    };
    cross_nonzero(base.part1, base.part2);
    cross_nonzero(base.part1, base.singletons);
    cross_nonzero(base.part2, base.singletons);

    for (std::size_t i = 0; i < base.singletons.size(); ++i)
        for (std::size_t j = i + 1; j < base.singletons.size(); ++j) {
            const Int val = base.sys.lk(base.singletons[i], base.singletons[j]);
            if (val == 0 || val % p.q != 0)
                throw std::invalid_argument("modq base: (L2) violated for pair (" +
                                            base.singletons[i] + ", " + base.singletons[j] + ")");
        }

    auto check_length = [&](const std::vector<ComponentId>& ids) {
        for (const auto& id : ids) {
            const auto& comp = base.sys.components()[base.sys.index_of(id)];
            if (comp.path_length < p.lambda)
                throw std::invalid_argument("modq base: (L3) violated for component " + id);
        }
    };
    check_length(base.part1);
    check_length(base.part2);
}

struct ModqStepResult {
    ModqParams params;
    PartitionedSystem system;  // the new H(u+1, v) scaffold
    StitchResult stitch;
    std::vector<ComponentId> x_ids, y_ids, j_ids, l_ids;
    Chain composition;  // stitch chain with row names resolved to component ids
    ComponentId z_id;
};

// One step of the main induction: slice the two parts into (X, L) and (Y, J)
// families, run the stitching pipeline, and append the stitched class Z as a
// new singleton whose linking numbers with X, Y and the old singletons are
// the entries of z (nonzero multiples of q by the pipeline's conclusion).
inline ModqStepResult theorem_modq_step(const Int& u, const Int& v, const Int& ell, const Int& q,
                                        const PartitionedSystem& base,
                                        const SupplierSpec& supplier) {
    ModqStepResult out;
    out.params = compute_modq_params(u, v, ell, q);
    validate_modq_base(base, out.params);
    if (out.params.A > Int(kMaterializeLimit) || out.params.lambda > Int(kMaterializeLimit))
        throw std::length_error("theorem_modq_step: parameters exceed the materialization limit");

    const std::size_t S = to_size(out.params.S, "S");
    const std::size_t T = to_size(out.params.T, "T");
    const std::size_t A = to_size(out.params.A, "A");
    const std::size_t B = to_size(out.params.B, "B");

    out.x_ids.assign(base.part1.begin(), base.part1.begin() + static_cast<std::ptrdiff_t>(S));
    out.l_ids.assign(base.part1.begin() + static_cast<std::ptrdiff_t>(S),
                     base.part1.begin() + static_cast<std::ptrdiff_t>(S + B));
    out.y_ids.assign(base.part2.begin(), base.part2.begin() + static_cast<std::ptrdiff_t>(S));
    out.y_ids.insert(out.y_ids.end(), base.singletons.begin(), base.singletons.end());
    out.j_ids.assign(base.part2.begin() + static_cast<std::ptrdiff_t>(S),
                     base.part2.begin() + static_cast<std::ptrdiff_t>(S + A));

    StitchInput in;
    in.S = S;
    in.T = T;
    in.q = q;
    in.lambda = static_cast<std::uint64_t>(to_size(out.params.lambda, "lambda"));
    in.supplier = supplier;
    auto matrix = [&](const std::vector<ComponentId>& rows, const std::vector<ComponentId>& cols) {
        std::vector<LinkingVector> m(rows.size(), LinkingVector(cols.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) m[i][j] = base.sys.lk(rows[i], cols[j]);
        return m;
    };
    in.JX = matrix(out.j_ids, out.x_ids);
    in.JY = matrix(out.j_ids, out.y_ids);
    in.LX = matrix(out.l_ids, out.x_ids);
    in.LY = matrix(out.l_ids, out.y_ids);

    out.stitch = stitch_links(in);

    LinkSystem sys = base.sys;
    for (std::size_t c : out.stitch.trace.x_reversals) sys = sys.reverse_orientation(out.x_ids[c]);
    for (std::size_t c : out.stitch.trace.y_reversals) sys = sys.reverse_orientation(out.y_ids[c]);

    out.z_id = "Z" + Int(u + 1).str();
    if (sys.has(out.z_id))
        throw std::invalid_argument("theorem_modq_step: component id " + out.z_id +
                                    " already exists in the base system");
    sys.add_component(out.z_id, 0);
    for (std::size_t s = 0; s < S; ++s) sys.set_lk(out.z_id, out.x_ids[s], out.stitch.z[s]);
    for (std::size_t t = 0; t < T; ++t) sys.set_lk(out.z_id, out.y_ids[t], out.stitch.z[S + t]);

    for (const auto& [name, coeff] : out.stitch.Z.coeff) {
        if (name.empty()) continue;
        const char kind = name.front();
        if (kind == 'J' || kind == 'L') {
            const std::size_t row = static_cast<std::size_t>(std::stoull(name.substr(1))) - 1;
            out.composition.add(kind == 'J' ? out.j_ids[row] : out.l_ids[row], coeff);
        } else {
            out.composition.add(out.z_id + "." + name, coeff);
        }
    }

    out.system.sys = std::move(sys);
    out.system.part1 = out.x_ids;
    out.system.part2.assign(out.y_ids.begin(), out.y_ids.begin() + static_cast<std::ptrdiff_t>(S));
    out.system.singletons = base.singletons;
    out.system.singletons.push_back(out.z_id);
    return out;
}

// ---------------------------------------------------------------------------
// Bound formulas
// ---------------------------------------------------------------------------

inline Int bound_key_q(const Int& q, const Int& n) {
    if (q < 1 || n < 1) throw std::invalid_argument("bound_key_q: q, n must be >= 1");
    if (n == 1) return 24 * q * q;
    return 4 * q * q * (2 * n + 4) + n + ceil_div(4 * q * q - 2, n) + 1;
}

// 4r^2(2n+4) + (vertices of the prism sphere over D with 4r^2 spare facets),
// where D is described by its vertex count d and boundary ridge count t.
inline Int bound_keydisc(const Int& d, const Int& t, const Int& r, const Int& n) {
    if (r < 1) throw std::invalid_argument("bound_keydisc: r must be >= 1");
    return 4 * r * r * (2 * n + 4) + simplicial::vsphere_upper_formula(d, t, n, 4 * r * r);
}

}  // namespace linkforge::pipelines
