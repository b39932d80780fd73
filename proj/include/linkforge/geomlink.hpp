#pragma once

#include "numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace linkforge::geomlink {

// Exact rational points and linear algebra kept deliberately small: only the
// operations the sign predicates need.
struct Vec3 {
    Rat x, y, z;
    bool operator==(const Vec3&) const = default;
};

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Rat dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

struct Mat3 {
    std::array<std::array<Rat, 3>, 3> a{};

    static Mat3 identity() {
        Mat3 m;
        for (int i = 0; i < 3; ++i) m.a[i][i] = 1;
        return m;
    }

    Vec3 apply(const Vec3& v) const {
        return {a[0][0] * v.x + a[0][1] * v.y + a[0][2] * v.z,
                a[1][0] * v.x + a[1][1] * v.y + a[1][2] * v.z,
                a[2][0] * v.x + a[2][1] * v.y + a[2][2] * v.z};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Rat s = 0;
                for (int k = 0; k < 3; ++k) s += a[i][k] * o.a[k][j];
                r.a[i][j] = s;
            }
        return r;
    }
};

// Projection to the xy-plane hit an exact degeneracy; retry under a rotation.
struct DegenerateProjection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The two polygonal curves share a point of R^3; no projection can help.
struct IntersectingCycles : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The floating-point oracle could not certify an integer answer.
struct OracleInconclusive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PLEmbedding {
    std::vector<Vec3> coords;  // vertex id -> point

    std::size_t N() const { return coords.size(); }
    const Vec3& point(int v) const {
        if (v < 0 || static_cast<std::size_t>(v) >= coords.size())
            throw std::invalid_argument("PLEmbedding: vertex id out of range");
        return coords[static_cast<std::size_t>(v)];
    }
    bool operator==(const PLEmbedding&) const = default;
};

// Closed polygonal curve through distinct vertices, traversed in list order.
struct PolygonalCycle {
    std::vector<int> v;

    PolygonalCycle() = default;
    explicit PolygonalCycle(std::vector<int> verts) : v(std::move(verts)) { validate(); }

    void validate() const {
        if (v.size() < 3) throw std::invalid_argument("PolygonalCycle: needs >= 3 vertices");
        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("PolygonalCycle: repeated vertex");
    }

    PolygonalCycle reversed() const {
        auto w = v;
        std::reverse(w.begin() + 1, w.end());
        return PolygonalCycle(std::move(w));
    }

    PolygonalCycle rotated(std::size_t k) const {
        auto w = v;
        std::rotate(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k % w.size()), w.end());
        return PolygonalCycle(std::move(w));
    }

    bool operator==(const PolygonalCycle&) const = default;
};

inline bool cycles_share_vertex(const PolygonalCycle& c1, const PolygonalCycle& c2) {
    for (int a : c1.v)
        for (int b : c2.v)
            if (a == b) return true;
    return false;
}

struct Vec2 {
    Rat x, y;
};

inline Rat orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

inline Rat orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return dot(cross(b - a, c - a), d - a);
}

inline bool collinear(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 cr = cross(b - a, c - a);
    return cr.x == 0 && cr.y == 0 && cr.z == 0;
}

// Pairwise distinct, no 3 collinear, no 4 coplanar, by exact predicates.
inline bool is_general_position(const PLEmbedding& e) {
    const std::size_t n = e.coords.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (e.coords[i] == e.coords[j]) return false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                if (collinear(e.coords[i], e.coords[j], e.coords[k])) return false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                for (std::size_t l = k + 1; l < n; ++l)
                    if (orient3d(e.coords[i], e.coords[j], e.coords[k], e.coords[l]) == 0)
                        return false;
    return true;
}

// Deterministic in (N, seed): integer grid points from [0, 64*N^2]^3, each new
// point redrawn until it keeps the partial set in general position.
inline PLEmbedding random_general_position_embedding(std::size_t N, std::uint64_t seed) {
    if (N < 1) throw std::invalid_argument("random_general_position_embedding: N must be >= 1");
    std::mt19937_64 rng(seed);
    const std::uint64_t hi = 64 * static_cast<std::uint64_t>(N) * static_cast<std::uint64_t>(N);
    PLEmbedding e;
    e.coords.reserve(N);
    std::size_t attempts = 0;
    while (e.coords.size() < N) {
        if (++attempts > 10000 + 100 * N)
            throw std::logic_error("random_general_position_embedding: resampling did not settle");
        Vec3 p{Rat(Int(uniform_int(rng, 0, hi))), Rat(Int(uniform_int(rng, 0, hi))),
               Rat(Int(uniform_int(rng, 0, hi)))};
        bool ok = true;
        const auto& pts = e.coords;
        for (std::size_t i = 0; ok && i < pts.size(); ++i)
            if (pts[i] == p) ok = false;
        for (std::size_t i = 0; ok && i < pts.size(); ++i)
            for (std::size_t j = i + 1; ok && j < pts.size(); ++j)
                if (collinear(pts[i], pts[j], p)) ok = false;
        for (std::size_t i = 0; ok && i < pts.size(); ++i)
            for (std::size_t j = i + 1; ok && j < pts.size(); ++j)
                for (std::size_t k = j + 1; ok && k < pts.size(); ++k)
                    if (orient3d(pts[i], pts[j], pts[k], p) == 0) ok = false;
        if (ok) e.coords.push_back(std::move(p));
    }
    return e;
}

namespace detail {

inline Mat3 rotation_x(const Rat& s, const Rat& c) {
    Mat3 m = Mat3::identity();
    m.a[1][1] = c;
    m.a[1][2] = -s;
    m.a[2][1] = s;
    m.a[2][2] = c;
    return m;
}

inline Mat3 rotation_y(const Rat& s, const Rat& c) {
    Mat3 m = Mat3::identity();
    m.a[0][0] = c;
    m.a[0][2] = s;
    m.a[2][0] = -s;
    m.a[2][2] = c;
    return m;
}

}  // namespace detail

// Fixed retry schedule: the identity, then exact rotations about the x and y
// axes (and their compositions) built from Pythagorean triples. Rotations
// about z alone never repair a degenerate xy-projection, so every nontrivial
// entry moves the projection direction.
inline const std::vector<Mat3>& rotation_schedule() {
    static const std::vector<Mat3> schedule = [] {
        std::vector<Mat3> out;
        out.push_back(Mat3::identity());
        const std::array<std::array<int, 3>, 6> triples{
            {{3, 4, 5}, {5, 12, 13}, {8, 15, 17}, {7, 24, 25}, {20, 21, 29}, {9, 40, 41}}};
        for (const auto& t : triples) {
            const Rat s{Int(t[0]), Int(t[2])};
            const Rat c{Int(t[1]), Int(t[2])};
            out.push_back(detail::rotation_x(s, c));
            out.push_back(detail::rotation_y(s, c));
            out.push_back(detail::rotation_x(s, c) * detail::rotation_y(s, c));
        }
        return out;
    }();
    return schedule;
}

inline PLEmbedding apply_rotation(const Mat3& m, const PLEmbedding& e) {
    PLEmbedding out;
    out.coords.reserve(e.coords.size());
    for (const auto& p : e.coords) out.coords.push_back(m.apply(p));
    return out;
}

// Crossing-count computation under the fixed projection (x,y,z) -> (x,y).
// Any zero sign predicate among inter-curve segment pairs is reported as a
// degenerate projection; a genuine intersection of the curves (equal height
// at a projected crossing) is a hard error.
inline long long linking_number_single_projection(const PLEmbedding& e, const PolygonalCycle& c1,
                                                  const PolygonalCycle& c2) {
    c1.validate();
    c2.validate();
    if (cycles_share_vertex(c1, c2))
        throw std::invalid_argument("linking_number: cycles share a vertex");

    long long total = 0;
    const std::size_t n1 = c1.v.size(), n2 = c2.v.size();
    for (std::size_t i = 0; i < n1; ++i) {
        const Vec3& a1 = e.point(c1.v[i]);
        const Vec3& a2 = e.point(c1.v[(i + 1) % n1]);
        const Vec2 pa1{a1.x, a1.y}, pa2{a2.x, a2.y};
        for (std::size_t j = 0; j < n2; ++j) {
            const Vec3& b1 = e.point(c2.v[j]);
            const Vec3& b2 = e.point(c2.v[(j + 1) % n2]);
            const Vec2 pb1{b1.x, b1.y}, pb2{b2.x, b2.y};
            const Rat o1 = orient2d(pa1, pa2, pb1);
            const Rat o2 = orient2d(pa1, pa2, pb2);
            const Rat o3 = orient2d(pb1, pb2, pa1);
            const Rat o4 = orient2d(pb1, pb2, pa2);
            if (o1 == 0 || o2 == 0 || o3 == 0 || o4 == 0)
                throw DegenerateProjection(
                    "linking_number: zero orientation predicate in the xy-projection");
            const bool crossing = (o1 > 0) != (o2 > 0) && (o3 > 0) != (o4 > 0);
            if (!crossing) continue;
            const Rat s = o3 / (o3 - o4);  // parameter along segment a1->a2
            const Rat t = o1 / (o1 - o2);  // parameter along segment b1->b2
            const Rat za = a1.z + s * (a2.z - a1.z);
            const Rat zb = b1.z + t * (b2.z - b1.z);
            if (za == zb)
                throw IntersectingCycles("linking_number: the cycles intersect in R^3");
            if (za > zb) {
                const Rat det = (pa2.x - pa1.x) * (pb2.y - pb1.y) - (pa2.y - pa1.y) * (pb2.x - pb1.x);
                total += det > 0 ? 1 : -1;
            }
        }
    }
    return total;
}

// Retry wrapper: walks the rotation schedule until some rotated copy admits a
// generic projection. The result does not depend on which entry succeeds.
inline long long linking_number(const PLEmbedding& e, const PolygonalCycle& c1,
                                const PolygonalCycle& c2) {
    for (const Mat3& m : rotation_schedule()) {
        try {
            return linking_number_single_projection(apply_rotation(m, e), c1, c2);
        } catch (const DegenerateProjection&) {
            continue;
        }
    }
    throw DegenerateProjection("linking_number: every rotation in the schedule was degenerate");
}

namespace detail {

struct DVec {
    double x, y, z;
};

inline DVec unit_direction(const Vec3& from, const Vec3& to) {
    const double dx = static_cast<double>(to.x - from.x);
    const double dy = static_cast<double>(to.y - from.y);
    const double dz = static_cast<double>(to.z - from.z);
    const double n = std::sqrt(dx * dx + dy * dy + dz * dz);
    return {dx / n, dy / n, dz / n};
}

inline double solid_angle(const DVec& a, const DVec& b, const DVec& c) {
    const double triple = a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) +
                          a.z * (b.x * c.y - b.y * c.x);
    const double ab = a.x * b.x + a.y * b.y + a.z * b.z;
    const double bc = b.x * c.x + b.y * c.y + b.z * c.z;
    const double ca = c.x * a.x + c.y * a.y + c.z * a.z;
    return 2.0 * std::atan2(triple, 1.0 + ab + bc + ca);
}

}  // namespace detail

// Independent floating-point oracle: per segment pair, the signed solid angle
// of the spherical quadrilateral swept by the chord direction, summed and
// divided by 4*pi. Declares failure when the total is not clearly integral.
inline long long gauss_linking_oracle(const PLEmbedding& e, const PolygonalCycle& c1,
                                      const PolygonalCycle& c2) {
    c1.validate();
    c2.validate();
    if (cycles_share_vertex(c1, c2))
        throw std::invalid_argument("gauss_linking_oracle: cycles share a vertex");

    double total = 0.0;
    const std::size_t n1 = c1.v.size(), n2 = c2.v.size();
    for (std::size_t i = 0; i < n1; ++i) {
        const Vec3& x1 = e.point(c1.v[i]);
        const Vec3& x2 = e.point(c1.v[(i + 1) % n1]);
        for (std::size_t j = 0; j < n2; ++j) {
            const Vec3& y1 = e.point(c2.v[j]);
            const Vec3& y2 = e.point(c2.v[(j + 1) % n2]);
            // Corners of the chord-direction quadrilateral in cyclic order.
            const detail::DVec a = detail::unit_direction(x1, y1);
            const detail::DVec b = detail::unit_direction(x2, y1);
            const detail::DVec c = detail::unit_direction(x2, y2);
            const detail::DVec d = detail::unit_direction(x1, y2);
            total += detail::solid_angle(a, b, c) + detail::solid_angle(a, c, d);
        }
    }
    const double estimate = total / (4.0 * std::acos(-1.0));
    const double nearest = std::nearbyint(estimate);
    if (std::abs(estimate - nearest) > 0.25)
        throw OracleInconclusive("gauss_linking_oracle: " + std::to_string(estimate) +
                                 " is not close to an integer");
    return static_cast<long long>(nearest);
}

namespace detail {

// Lexicographic k-subsets of {0..n-1}; returns false when exhausted.
inline bool next_combination(std::vector<int>& comb, int n) {
    const int k = static_cast<int>(comb.size());
    int i = k - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++comb[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    return true;
}

inline std::vector<int> first_combination(int k) {
    std::vector<int> comb(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
    return comb;
}

// Canonical cycles on a sorted vertex set: least vertex first, then every
// arrangement of the rest with second vertex < last vertex (each dihedral
// class once), in lexicographic order.
template <typename Fn>
bool for_each_canonical_cycle(const std::vector<int>& sorted_set, Fn&& fn) {
    std::vector<int> rest(sorted_set.begin() + 1, sorted_set.end());
    do {
        if (rest.front() < rest.back()) {
            std::vector<int> cycle;
            cycle.reserve(sorted_set.size());
            cycle.push_back(sorted_set[0]);
            cycle.insert(cycle.end(), rest.begin(), rest.end());
            if (!fn(PolygonalCycle(std::move(cycle)))) return false;
        }
    } while (std::next_permutation(rest.begin(), rest.end()));
    return true;
}

// Visits unordered pairs of vertex-disjoint canonical cycles with lengths
// (k1, k2) normalized so k1 <= k2; the visitor returns false to stop early.
template <typename Fn>
bool for_each_disjoint_cycle_pair(std::size_t N, std::size_t k1, std::size_t k2, Fn&& fn) {
    if (k1 < 3 || k2 < 3)
        throw std::invalid_argument("enumerate_disjoint_cycle_pairs: cycle length must be >= 3");
    if (k1 > k2) std::swap(k1, k2);
    if (k1 + k2 > N) return true;
    const int n = static_cast<int>(N);
    auto s1 = first_combination(static_cast<int>(k1));
    do {
        auto s2 = first_combination(static_cast<int>(k2));
        do {
            if (k1 == k2 && !(s1 < s2)) continue;
            bool disjoint = true;
            for (int a : s1)
                for (int b : s2)
                    if (a == b) disjoint = false;
            if (!disjoint) continue;
            bool keep_going = for_each_canonical_cycle(s1, [&](const PolygonalCycle& c1) {
                return for_each_canonical_cycle(s2, [&](PolygonalCycle c2) {
                    return fn(c1, std::move(c2));
                });
            });
            if (!keep_going) return false;
        } while (next_combination(s2, n));
    } while (next_combination(s1, n));
    return true;
}

}  // namespace detail

// All unordered pairs of vertex-disjoint cycles of lengths k1 and k2 in K_N,
// each cycle canonical (least vertex first, lesser neighbor second), in a
// fixed deterministic order. Lengths that cannot fit return the empty list.
inline std::vector<std::pair<PolygonalCycle, PolygonalCycle>> enumerate_disjoint_cycle_pairs(
    std::size_t N, std::size_t k1, std::size_t k2) {
    std::vector<std::pair<PolygonalCycle, PolygonalCycle>> out;
    detail::for_each_disjoint_cycle_pair(N, k1, k2, [&](PolygonalCycle a, PolygonalCycle b) {
        out.emplace_back(std::move(a), std::move(b));
        return true;
    });
    return out;
}

// Sum of the 10 triangle-pair linking numbers of a K_6 embedding, mod 2.
// Always 1 for a genuine embedding.
inline int conway_gordon_invariant(const PLEmbedding& e) {
    if (e.N() != 6) throw std::invalid_argument("conway_gordon_invariant: needs exactly 6 vertices");
    long long sum = 0;
    for (const auto& [c1, c2] : enumerate_disjoint_cycle_pairs(6, 3, 3))
        sum += linking_number(e, c1, c2);
    return static_cast<int>(((sum % 2) + 2) % 2);
}

struct ModqWitness {
    PolygonalCycle c1, c2;
    long long lk = 0;
    std::size_t pairs_examined = 0;
};

// Best-effort scan for a pair of disjoint cycles whose linking number is a
// nonzero multiple of q: all feasible length pairs in lexicographic order,
// within each the canonical pair order, stopping after `budget` pairs.
inline std::optional<ModqWitness> search_mod_q_link(const PLEmbedding& e, const Int& q,
                                                    std::size_t budget) {
    if (q < 1) throw std::invalid_argument("search_mod_q_link: q must be >= 1");
    std::size_t examined = 0;
    std::optional<ModqWitness> found;
    const std::size_t N = e.N();
    for (std::size_t k1 = 3; !found && k1 * 2 <= N; ++k1) {
        for (std::size_t k2 = k1; !found && k1 + k2 <= N; ++k2) {
            detail::for_each_disjoint_cycle_pair(N, k1, k2, [&](PolygonalCycle a, PolygonalCycle b) {
                if (examined >= budget) return false;
                ++examined;
                const long long lk = linking_number(e, a, b);
                if (lk != 0 && Int(lk) % q == 0) {
                    found = ModqWitness{std::move(a), std::move(b), lk, examined};
                    return false;
                }
                return true;
            });
            if (examined >= budget) return found;
        }
    }
    return found;
}

}  // namespace linkforge::geomlink
