#pragma once

#include "numeric.hpp"

#include <array>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace linkforge::selection {

using Vec = std::vector<Int>;

struct NotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Prefix sums s_0 = 0, s_a = v_1 + ... + v_a of a list of d-dim vectors.
inline std::vector<Vec> prefix_sums(const std::vector<Vec>& v, std::size_t d) {
    std::vector<Vec> s;
    s.reserve(v.size() + 1);
    s.emplace_back(d, Int(0));
    for (const auto& row : v) {
        if (row.size() != d)
            throw std::invalid_argument("prefix_sums: inconsistent vector dimension");
        Vec next = s.back();
        for (std::size_t i = 0; i < d; ++i) next[i] += row[i];
        s.push_back(std::move(next));
    }
    return s;
}

// Window (a, b] of the first q entries whose sum is 0 mod q. Such a window
// always exists: the q+1 prefix sums s_0..s_q collide mod q. Deterministic
// choice: least b, and for that b the earliest matching a.
inline std::pair<std::size_t, std::size_t> zero_sum_window(const std::vector<Int>& ell,
                                                           const Int& q) {
    if (q < 1) throw std::invalid_argument("zero_sum_window: modulus must be >= 1");
    const std::size_t qs = to_size(q, "modulus");
    if (ell.size() < qs)
        throw std::invalid_argument("zero_sum_window: list shorter than the modulus");
    std::map<Int, std::size_t> first_at;
    Int s = 0;
    first_at[floor_mod(s, q)] = 0;
    for (std::size_t b = 1; b <= qs; ++b) {
        s += ell[b - 1];
        const Int r = floor_mod(s, q);
        auto it = first_at.find(r);
        if (it != first_at.end()) return {it->second, b};
        first_at.emplace(r, b);
    }
    throw std::logic_error("zero_sum_window: pigeonhole failed");
}

struct WindowSelection {
    std::vector<std::size_t> indices;  // base followed by offsets, strictly ascending
    Vec residue;                       // shared residue of the prefix sums, entries in [0, q)

    bool operator==(const WindowSelection&) const = default;
};

// Indices 0 <= b_0 < ... < b_k <= M whose prefix sums agree entrywise mod q,
// with k+1 = count. Scans a = 0, 1, ... and returns the residue class that
// reaches `count` members first; guaranteed when M + 1 > (count-1) * q^d.
inline WindowSelection find_equal_residue_indices(const std::vector<Vec>& v, const Int& q,
                                                  std::size_t count) {
    if (q < 1) throw std::invalid_argument("find_equal_residue_indices: modulus must be >= 1");
    if (count < 1) throw std::invalid_argument("find_equal_residue_indices: count must be >= 1");
    const std::size_t d = v.empty() ? 0 : v[0].size();
    Vec s(d, Int(0));
    std::map<Vec, std::vector<std::size_t>> classes;
    for (std::size_t a = 0; a <= v.size(); ++a) {
        if (a > 0) {
            if (v[a - 1].size() != d)
                throw std::invalid_argument(
                    "find_equal_residue_indices: inconsistent vector dimension");
            for (std::size_t i = 0; i < d; ++i) s[i] += v[a - 1][i];
        }
        Vec r(d);
        for (std::size_t i = 0; i < d; ++i) r[i] = floor_mod(s[i], q);
        auto& members = classes[r];
        members.push_back(a);
        if (members.size() == count) return {members, r};
    }
    throw NotFoundError("find_equal_residue_indices: no residue class reached the requested count");
}

// Undirected graph on candidate positions: edge when the chosen coordinate's
// difference equals the forbidden value in either direction. Every walk along
// edges changes the coordinate by +/- the forbidden value, so closed walks
// have even length and the graph is bipartite.
inline std::vector<std::vector<std::size_t>> forbidden_difference_graph(
    const std::vector<Int>& coord_values, const Int& forbidden) {
    const std::size_t m = coord_values.size();
    std::vector<std::vector<std::size_t>> adj(m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) {
            const Int diff = coord_values[b] - coord_values[a];
            if (diff == forbidden || diff == -forbidden) {
                adj[a].push_back(b);
                adj[b].push_back(a);
            }
        }
    return adj;
}

// BFS 2-coloring per component, starting each component at its least vertex
// with color 0. Returns nothing if an odd cycle is found.
inline std::optional<std::vector<int>> two_color(const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<int> color(adj.size(), -1);
    for (std::size_t root = 0; root < adj.size(); ++root) {
        if (color[root] != -1) continue;
        color[root] = 0;
        std::deque<std::size_t> queue{root};
        while (!queue.empty()) {
            const std::size_t x = queue.front();
            queue.pop_front();
            for (std::size_t y : adj[x]) {
                if (color[y] == -1) {
                    color[y] = 1 - color[x];
                    queue.push_back(y);
                } else if (color[y] == color[x]) {
                    return std::nullopt;
                }
            }
        }
    }
    return color;
}

namespace detail {

// Base case: among three candidates, one of (0,1), (1,2), (0,2) avoids the
// forbidden value. If both consecutive differences hit it, their sum is twice
// the (nonzero) forbidden value and the outer pair is safe.
inline std::pair<std::size_t, std::size_t> shift_base_case(const Int& f, const std::vector<Vec>& v,
                                                           const std::vector<std::size_t>& idx) {
    const std::array<std::pair<std::size_t, std::size_t>, 3> order{
        {{0, 1}, {1, 2}, {0, 2}}};
    for (auto [a, b] : order) {
        if (f + v[idx[b]][0] - v[idx[a]][0] != 0) return {idx[a], idx[b]};
    }
    throw std::logic_error("find_nonvanishing_shift: base case exhausted");
}

inline std::pair<std::size_t, std::size_t> shift_recurse(const Vec& f, const std::vector<Vec>& v,
                                                         std::vector<std::size_t> idx,
                                                         std::size_t d) {
    if (d == 1) return shift_base_case(f[0], v, idx);
    const std::size_t top = d - 1;
    std::vector<Int> column(idx.size());
    for (std::size_t p = 0; p < idx.size(); ++p) column[p] = v[idx[p]][top];
    const auto adj = forbidden_difference_graph(column, -f[top]);
    const auto colors = two_color(adj);
    if (!colors) throw std::logic_error("find_nonvanishing_shift: forbidden graph not bipartite");
    std::vector<std::size_t> cls0, cls1;
    for (std::size_t p = 0; p < idx.size(); ++p)
        ((*colors)[p] == 0 ? cls0 : cls1).push_back(idx[p]);
    // Larger class wins; ties go to the class holding the least candidate,
    // which BFS always colors 0.
    std::vector<std::size_t>& keep = (cls1.size() > cls0.size()) ? cls1 : cls0;
    const std::size_t need = (std::size_t{1} << (d - 1)) + 1;
    keep.resize(need);
    return shift_recurse(f, v, std::move(keep), d - 1);
}

}  // namespace detail

// Constructive form of the forbidden-values argument: given f with no zero
// entry and candidates v_0..v_N with N >= 2^d, find j < k such that
// f + v_k - v_j has no zero entry. Peels the highest coordinate via the
// bipartite forbidden-difference graph, keeping 2^(d-1)+1 candidates per level.
inline std::pair<std::size_t, std::size_t> find_nonvanishing_shift(const Vec& f,
                                                                   const std::vector<Vec>& v) {
    const std::size_t d = f.size();
    if (d == 0) throw std::invalid_argument("find_nonvanishing_shift: empty forbidden vector");
    if (d > 32) throw std::invalid_argument("find_nonvanishing_shift: dimension too large");
    for (const auto& e : f)
        if (e == 0) throw std::invalid_argument("find_nonvanishing_shift: forbidden entry is zero");
    const std::size_t need = (std::size_t{1} << d) + 1;
    if (v.size() < need)
        throw std::invalid_argument("find_nonvanishing_shift: needs at least 2^d + 1 candidates");
    for (const auto& row : v)
        if (row.size() != d)
            throw std::invalid_argument("find_nonvanishing_shift: candidate dimension mismatch");

    std::vector<std::size_t> idx(need);
    for (std::size_t i = 0; i < need; ++i) idx[i] = i;
    auto [j, k] = detail::shift_recurse(f, v, std::move(idx), d);
    for (std::size_t i = 0; i < d; ++i)
        if (f[i] + v[k][i] - v[j][i] == 0)
            throw std::logic_error("find_nonvanishing_shift: produced an invalid pair");
    return {j, k};
}

// Exhaustive scan over all ordered pairs, for cross-checking the constructive
// algorithm. No preconditions; may be empty when too few candidates exist.
inline std::vector<std::pair<std::size_t, std::size_t>> brute_force_shift_oracle(
    const Vec& f, const std::vector<Vec>& v) {
    const std::size_t d = f.size();
    for (const auto& row : v)
        if (row.size() != d)
            throw std::invalid_argument("brute_force_shift_oracle: candidate dimension mismatch");
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t j = 0; j < v.size(); ++j)
        for (std::size_t k = j + 1; k < v.size(); ++k) {
            bool ok = true;
            for (std::size_t i = 0; i < d && ok; ++i)
                if (f[i] + v[k][i] - v[j][i] == 0) ok = false;
            if (ok) out.emplace_back(j, k);
        }
    return out;
}

}  // namespace linkforge::selection
