#pragma once

#include "numeric.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace linkforge::simplicial {

using VertexId = int;

struct Simplex {
    std::vector<VertexId> v;  // strictly increasing

    Simplex() = default;
    explicit Simplex(std::vector<VertexId> verts) : v(std::move(verts)) {
        if (v.empty()) throw std::invalid_argument("Simplex: empty vertex list");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] < 0) throw std::invalid_argument("Simplex: negative vertex id");
            if (i + 1 < v.size() && v[i] >= v[i + 1])
                throw std::invalid_argument("Simplex: vertices must be strictly increasing");
        }
    }

    std::size_t dim() const { return v.size() - 1; }
    auto operator<=>(const Simplex&) const = default;
};

// Sorts an arbitrary list of distinct vertices and reports the permutation
// parity relating the given order to the sorted order.
inline std::pair<Simplex, int> normalize_oriented(std::vector<VertexId> verts) {
    int parity = 1;
    for (std::size_t i = 0; i < verts.size(); ++i)
        for (std::size_t j = i + 1; j < verts.size(); ++j) {
            if (verts[i] == verts[j])
                throw std::invalid_argument("normalize_oriented: repeated vertex");
            if (verts[i] > verts[j]) {
                std::swap(verts[i], verts[j]);
                parity = -parity;
            }
        }
    return {Simplex(std::move(verts)), parity};
}

struct OrientedFacet {
    Simplex simplex;
    int sign = 1;  // orientation relative to the sorted vertex order

    bool operator==(const OrientedFacet&) const = default;
};

// Facet-based complex of pure dimension n with per-facet orientation signs.
// The facet order is part of the value (it matters for file reproducibility
// and for deterministic searches), but not for semantic equality of the
// underlying complex.
class SimplicialComplex {
  public:
    SimplicialComplex() = default;

    SimplicialComplex(int n, std::vector<OrientedFacet> facets)
        : n_(n), facets_(std::move(facets)) {
        if (n_ < 1) throw std::invalid_argument("SimplicialComplex: dimension must be >= 1");
        if (facets_.empty()) throw std::invalid_argument("SimplicialComplex: no facets");
        std::set<Simplex> seen;
        for (const auto& f : facets_) {
            if (f.simplex.dim() != static_cast<std::size_t>(n_))
                throw std::invalid_argument("SimplicialComplex: facet of wrong dimension");
            if (f.sign != 1 && f.sign != -1)
                throw std::invalid_argument("SimplicialComplex: facet sign must be +1 or -1");
            if (!seen.insert(f.simplex).second)
                throw std::invalid_argument("SimplicialComplex: duplicate facet");
        }
    }

    int n() const { return n_; }
    const std::vector<OrientedFacet>& facets() const { return facets_; }
    std::size_t facet_count() const { return facets_.size(); }

    std::vector<VertexId> vertices() const {
        std::set<VertexId> s;
        for (const auto& f : facets_) s.insert(f.simplex.v.begin(), f.simplex.v.end());
        return {s.begin(), s.end()};
    }
    std::size_t vertex_count() const { return vertices().size(); }

    std::optional<std::size_t> find_facet(const Simplex& s) const {
        for (std::size_t i = 0; i < facets_.size(); ++i)
            if (facets_[i].simplex == s) return i;
        return std::nullopt;
    }

    // Ridge incidence: each (n-1)-face mapped to (facet index, induced sign).
    // The boundary of sign * [v_0..v_n] contributes sign * (-1)^j to the face
    // that drops position j.
    std::map<Simplex, std::vector<std::pair<std::size_t, int>>> ridge_incidence() const {
        std::map<Simplex, std::vector<std::pair<std::size_t, int>>> out;
        for (std::size_t i = 0; i < facets_.size(); ++i) {
            const auto& verts = facets_[i].simplex.v;
            int induced = facets_[i].sign;
            for (std::size_t j = 0; j < verts.size(); ++j) {
                std::vector<VertexId> face;
                face.reserve(verts.size() - 1);
                for (std::size_t t = 0; t < verts.size(); ++t)
                    if (t != j) face.push_back(verts[t]);
                out[Simplex(std::move(face))].emplace_back(i, induced);
                induced = -induced;
            }
        }
        return out;
    }

    // Boundary ridges with the orientation induced by their unique facet, in
    // lexicographic ridge order.
    std::vector<std::pair<Simplex, int>> boundary_ridges() const {
        std::vector<std::pair<Simplex, int>> out;
        for (const auto& [ridge, inc] : ridge_incidence())
            if (inc.size() == 1) out.emplace_back(ridge, inc[0].second);
        return out;
    }

    bool is_pseudomanifold_with_boundary() const {
        for (const auto& [ridge, inc] : ridge_incidence())
            if (inc.size() > 2) return false;
        return true;
    }

    bool is_closed() const {
        for (const auto& [ridge, inc] : ridge_incidence())
            if (inc.size() != 2) return false;
        return true;
    }

    bool is_strongly_connected() const {
        std::vector<std::vector<std::size_t>> adj(facets_.size());
        for (const auto& [ridge, inc] : ridge_incidence())
            if (inc.size() == 2) {
                adj[inc[0].first].push_back(inc[1].first);
                adj[inc[1].first].push_back(inc[0].first);
            }
        std::vector<char> seen(facets_.size(), 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!stack.empty()) {
            const std::size_t x = stack.back();
            stack.pop_back();
            for (std::size_t y : adj[x])
                if (!seen[y]) {
                    seen[y] = 1;
                    ++reached;
                    stack.push_back(y);
                }
        }
        return reached == facets_.size();
    }

    bool has_consistent_orientation() const {
        for (const auto& [ridge, inc] : ridge_incidence())
            if (inc.size() == 2 && inc[0].second + inc[1].second != 0) return false;
        return true;
    }

    // Reassigns facet signs by propagation from facet 0 (whose sign is kept)
    // so that internal ridges receive opposite induced orientations.
    SimplicialComplex oriented_consistently() const {
        std::vector<std::vector<std::pair<std::size_t, int>>> relation(facets_.size());
        for (const auto& [ridge, inc] : ridge_incidence())
            if (inc.size() == 2) {
                // Signs s_a, s_b must satisfy s_a * p_a = -s_b * p_b where p is
                // the induced parity factor recorded relative to current signs.
                const auto [a, ia] = inc[0];
                const auto [b, ib] = inc[1];
                const int pa = ia * facets_[a].sign;
                const int pb = ib * facets_[b].sign;
                relation[a].emplace_back(b, -pa * pb);
                relation[b].emplace_back(a, -pa * pb);
            }
        std::vector<int> sign(facets_.size(), 0);
        sign[0] = facets_[0].sign;
        std::vector<std::size_t> stack{0};
        while (!stack.empty()) {
            const std::size_t x = stack.back();
            stack.pop_back();
            for (const auto& [y, rel] : relation[x]) {
                const int wanted = sign[x] * rel;
                if (sign[y] == 0) {
                    sign[y] = wanted;
                    stack.push_back(y);
                } else if (sign[y] != wanted) {
                    throw std::invalid_argument("oriented_consistently: complex is not orientable");
                }
            }
        }
        std::vector<OrientedFacet> out = facets_;
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (sign[i] == 0)
                throw std::invalid_argument(
                    "oriented_consistently: complex is not strongly connected");
            out[i].sign = sign[i];
        }
        return {n_, std::move(out)};
    }

    long long euler_characteristic() const {
        std::set<std::vector<VertexId>> faces;
        for (const auto& f : facets_) {
            const auto& verts = f.simplex.v;
            const unsigned full = (1u << verts.size()) - 1;
            for (unsigned mask = 1; mask <= full; ++mask) {
                std::vector<VertexId> face;
                for (std::size_t t = 0; t < verts.size(); ++t)
                    if (mask & (1u << t)) face.push_back(verts[t]);
                faces.insert(std::move(face));
            }
        }
        long long chi = 0;
        for (const auto& face : faces) chi += (face.size() % 2 == 1) ? 1 : -1;
        return chi;
    }

    // Checkable disc certificate: strongly connected orientable pseudomanifold
    // with nonempty boundary and Euler characteristic 1. Exact for n <= 2;
    // for n >= 3 these are the recorded necessary conditions.
    bool disc_certificate() const {
        return is_strongly_connected() && is_pseudomanifold_with_boundary() &&
               !boundary_ridges().empty() && euler_characteristic() == 1 &&
               has_consistent_orientation();
    }

    // Boundary as an (n-1)-complex with induced orientations; requires n >= 2
    // so the result is itself a complex of positive dimension.
    SimplicialComplex boundary_complex() const {
        if (n_ < 2) throw std::invalid_argument("boundary_complex: requires dimension >= 2");
        std::vector<OrientedFacet> facets;
        for (const auto& [ridge, sign] : boundary_ridges()) facets.push_back({ridge, sign});
        if (facets.empty()) throw std::invalid_argument("boundary_complex: empty boundary");
        return {n_ - 1, std::move(facets)};
    }

    bool operator==(const SimplicialComplex&) const = default;

  private:
    int n_ = 1;
    std::vector<OrientedFacet> facets_;
};

// Triangulated disc with an ordered facet sequence; `order` holds 0-based
// facet indices in path order.
struct NPath {
    SimplicialComplex complex;
    std::vector<std::size_t> order;

    std::size_t length() const { return order.size(); }
    bool operator==(const NPath&) const = default;
};

// The canonical n-path of length ell: vertices 0..ell+n-1, facet i spanning
// {i, ..., i+n}. Consecutive facets share a ridge; consistency forces the
// sign recurrence sign_{i+1} = (-1)^(n+1) sign_i.
inline NPath build_path(int n, std::size_t ell) {
    if (n < 1) throw std::invalid_argument("build_path: dimension must be >= 1");
    if (ell < 1) throw std::invalid_argument("build_path: length must be >= 1");
    std::vector<OrientedFacet> facets;
    facets.reserve(ell);
    int sign = 1;
    for (std::size_t i = 0; i < ell; ++i) {
        std::vector<VertexId> verts(static_cast<std::size_t>(n) + 1);
        for (std::size_t t = 0; t <= static_cast<std::size_t>(n); ++t)
            verts[t] = static_cast<VertexId>(i + t);
        facets.push_back({Simplex(std::move(verts)), sign});
        if (n % 2 == 0) sign = -sign;
    }
    std::vector<std::size_t> order(ell);
    for (std::size_t i = 0; i < ell; ++i) order[i] = i;
    return {SimplicialComplex(n, std::move(facets)), std::move(order)};
}

namespace detail {

inline SimplicialComplex subrange_complex(const NPath& p, std::size_t a, std::size_t b) {
    std::vector<OrientedFacet> facets;
    facets.reserve(b - a + 1);
    for (std::size_t i = a; i <= b; ++i) facets.push_back(p.complex.facets()[p.order[i - 1]]);
    return {p.complex.n(), std::move(facets)};
}

inline std::size_t shared_vertex_count(const Simplex& a, const Simplex& b) {
    std::size_t count = 0, i = 0, j = 0;
    while (i < a.v.size() && j < b.v.size()) {
        if (a.v[i] == b.v[j]) {
            ++count;
            ++i;
            ++j;
        } else if (a.v[i] < b.v[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return count;
}

}  // namespace detail

// NPath validity: `order` is a permutation, consecutive facets meet in an
// (n-1)-simplex, and every contiguous facet union passes the disc
// certificate. Throws only on a malformed order array.
inline bool validate_path(const NPath& p) {
    const std::size_t ell = p.complex.facet_count();
    if (p.order.size() != ell) throw std::invalid_argument("validate_path: order length mismatch");
    std::vector<char> seen(ell, 0);
    for (std::size_t idx : p.order) {
        if (idx >= ell || seen[idx]) throw std::invalid_argument("validate_path: order is not a permutation");
        seen[idx] = 1;
    }
    const std::size_t n = static_cast<std::size_t>(p.complex.n());
    for (std::size_t i = 0; i + 1 < ell; ++i) {
        const auto& a = p.complex.facets()[p.order[i]].simplex;
        const auto& b = p.complex.facets()[p.order[i + 1]].simplex;
        if (detail::shared_vertex_count(a, b) != n) return false;
    }
    if (!p.complex.has_consistent_orientation()) return false;
    for (std::size_t a = 1; a <= ell; ++a)
        for (std::size_t b = a; b <= ell; ++b) {
            const auto sub = detail::subrange_complex(p, a, b);
            if (!sub.is_strongly_connected() || !sub.is_pseudomanifold_with_boundary() ||
                sub.euler_characteristic() != 1)
                return false;
        }
    return true;
}

// Union of facets a..b (1-based path positions) with inherited orientations.
inline SimplicialComplex path_subrange(const NPath& p, std::size_t a, std::size_t b) {
    if (a < 1 || a > b || b > p.length())
        throw std::invalid_argument("path_subrange: index out of range");
    return detail::subrange_complex(p, a, b);
}

struct TriangulatedSphere {
    SimplicialComplex complex;

    bool operator==(const TriangulatedSphere&) const = default;
};

inline bool validate_sphere(const SimplicialComplex& cx) {
    const long long want_chi = (cx.n() % 2 == 0) ? 2 : 0;
    return cx.is_strongly_connected() && cx.is_closed() && cx.has_consistent_orientation() &&
           cx.euler_characteristic() == want_chi;
}

inline TriangulatedSphere make_sphere(SimplicialComplex cx) {
    if (!validate_sphere(cx))
        throw std::invalid_argument("make_sphere: complex fails the sphere invariants");
    return {std::move(cx)};
}

// Two disjoint embedded copies of a disc D inside a sphere. image0/image1 map
// the i-th smallest vertex of D to a sphere vertex; flags are +1 for an
// orientation-preserving copy and -1 for a reversing one.
struct DiscCopyPair {
    std::vector<VertexId> image0, image1;
    int flag0 = 1, flag1 = -1;

    bool operator==(const DiscCopyPair&) const = default;
};

namespace detail {

inline std::map<VertexId, std::size_t> rank_of(const std::vector<VertexId>& sorted_vertices) {
    std::map<VertexId, std::size_t> out;
    for (std::size_t i = 0; i < sorted_vertices.size(); ++i) out[sorted_vertices[i]] = i;
    return out;
}

// Orientation ratio of a vertex map (given by rank) from D into S: +1 when
// every facet lands on an equally oriented facet, -1 when every facet lands
// reversed. Mixed ratios cannot occur for a strongly connected D inside a
// consistently oriented S.
inline int orientation_ratio(const SimplicialComplex& D, const SimplicialComplex& S,
                             const std::vector<VertexId>& image) {
    const auto dverts = D.vertices();
    const auto rank = rank_of(dverts);
    int ratio = 0;
    for (const auto& f : D.facets()) {
        std::vector<VertexId> mapped;
        mapped.reserve(f.simplex.v.size());
        for (VertexId v : f.simplex.v) mapped.push_back(image[rank.at(v)]);
        auto [simplex, parity] = normalize_oriented(std::move(mapped));
        const auto idx = S.find_facet(simplex);
        if (!idx) throw std::logic_error("orientation_ratio: image facet missing");
        const int r = f.sign * parity * S.facets()[*idx].sign;
        if (ratio == 0)
            ratio = r;
        else if (ratio != r)
            throw std::logic_error("orientation_ratio: inconsistent copy orientation");
    }
    return ratio;
}

}  // namespace detail

// Connect sum along removed facets delta1, delta2. The second sphere is
// relabeled above s1's ids, then delta2's vertices are identified with
// delta1's by the order-preserving bijection. Orientation is re-propagated
// from the first surviving facet of s1, whose sign is kept.
inline TriangulatedSphere connect_sum_spheres(const TriangulatedSphere& s1, const Simplex& delta1,
                                              const TriangulatedSphere& s2, const Simplex& delta2) {
    if (s1.complex.n() != s2.complex.n())
        throw std::invalid_argument("connect_sum_spheres: dimension mismatch");
    const auto i1 = s1.complex.find_facet(delta1);
    if (!i1) throw std::invalid_argument("connect_sum_spheres: delta1 is not a facet of s1");
    const auto i2 = s2.complex.find_facet(delta2);
    if (!i2) throw std::invalid_argument("connect_sum_spheres: delta2 is not a facet of s2");

    VertexId shift = 0;
    for (VertexId v : s1.complex.vertices()) shift = std::max(shift, v + 1);
    std::map<VertexId, VertexId> relabel;
    for (std::size_t t = 0; t < delta2.v.size(); ++t) relabel[delta2.v[t]] = delta1.v[t];

    std::vector<OrientedFacet> facets;
    for (std::size_t i = 0; i < s1.complex.facet_count(); ++i)
        if (i != *i1) facets.push_back(s1.complex.facets()[i]);
    for (std::size_t i = 0; i < s2.complex.facet_count(); ++i) {
        if (i == *i2) continue;
        const auto& f = s2.complex.facets()[i];
        std::vector<VertexId> verts;
        verts.reserve(f.simplex.v.size());
        for (VertexId v : f.simplex.v) {
            auto it = relabel.find(v);
            verts.push_back(it != relabel.end() ? it->second : v + shift);
        }
        auto [simplex, parity] = normalize_oriented(std::move(verts));
        facets.push_back({std::move(simplex), f.sign * parity});
    }
    SimplicialComplex glued(s1.complex.n(), std::move(facets));
    return make_sphere(glued.oriented_consistently());
}

struct PrismSphere {
    TriangulatedSphere sphere;
    DiscCopyPair copies;
    std::size_t extra_facets = 0;  // facets outside both disc copies
};

// Boundary of the prism D x I with the staircase triangulation: vertex set
// V(D) x {0,1} (ranks 0..d-1 and d..2d-1), the two disc copies, and for each
// boundary ridge g_0 < ... < g_{n-1} of D the n wall simplices
// {g_0..g_j} x {0} united with {g_j..g_{n-1}} x {1}. When the nt wall facets
// fall short of m, the deficit is supplied by connect-summing the boundary
// sphere of an (n+1)-path of length L = ceil((m - nt + 1)/n).
inline PrismSphere build_prism_sphere(const SimplicialComplex& D, const Int& m) {
    if (m < 0) throw std::invalid_argument("build_prism_sphere: m must be >= 0");
    if (!D.disc_certificate())
        throw std::invalid_argument("build_prism_sphere: D fails the disc certificate");
    const int n = D.n();
    const auto dverts = D.vertices();
    const auto rank = detail::rank_of(dverts);
    const std::size_t d = dverts.size();

    std::vector<OrientedFacet> facets;
    auto add_copy = [&](VertexId offset) {
        for (const auto& f : D.facets()) {
            std::vector<VertexId> verts;
            verts.reserve(f.simplex.v.size());
            for (VertexId v : f.simplex.v) verts.push_back(static_cast<VertexId>(rank.at(v)) + offset);
            facets.push_back({Simplex(std::move(verts)), f.sign});
        }
    };
    add_copy(0);
    add_copy(static_cast<VertexId>(d));

    const auto boundary = D.boundary_ridges();
    for (const auto& [ridge, ind_sign] : boundary) {
        std::vector<VertexId> g;
        g.reserve(ridge.v.size());
        for (VertexId v : ridge.v) g.push_back(static_cast<VertexId>(rank.at(v)));
        for (std::size_t j = 0; j < g.size(); ++j) {
            std::vector<VertexId> verts;
            verts.reserve(g.size() + 1);
            for (std::size_t t = 0; t <= j; ++t) verts.push_back(g[t]);
            for (std::size_t t = j; t < g.size(); ++t)
                verts.push_back(g[t] + static_cast<VertexId>(d));
            facets.push_back({Simplex(std::move(verts)), 1});
        }
    }
    const std::size_t wall_count = boundary.size() * static_cast<std::size_t>(n);
    const std::size_t wall_begin = 2 * D.facet_count();

    SimplicialComplex prism_raw(n, std::move(facets));
    TriangulatedSphere sphere = make_sphere(prism_raw.oriented_consistently());

    DiscCopyPair copies;
    copies.image0.resize(d);
    copies.image1.resize(d);
    for (std::size_t r = 0; r < d; ++r) {
        copies.image0[r] = static_cast<VertexId>(r);
        copies.image1[r] = static_cast<VertexId>(r + d);
    }
    // Rebuild D in rank coordinates so the ratio helper can match facets.
    std::vector<OrientedFacet> dfacets;
    for (const auto& f : D.facets()) {
        std::vector<VertexId> verts;
        for (VertexId v : f.simplex.v) verts.push_back(static_cast<VertexId>(rank.at(v)));
        dfacets.push_back({Simplex(std::move(verts)), f.sign});
    }
    const SimplicialComplex dnorm(n, std::move(dfacets));
    copies.flag0 = detail::orientation_ratio(dnorm, sphere.complex, copies.image0);
    copies.flag1 = detail::orientation_ratio(dnorm, sphere.complex, copies.image1);
    if (copies.flag0 + copies.flag1 != 0)
        throw std::logic_error("build_prism_sphere: copies are not oppositely oriented");

    const Int nt = Int(n) * Int(boundary.size());
    if (nt < m) {
        const Int L = ceil_div(m - nt + 1, Int(n));
        const NPath tail = build_path(n + 1, to_size(L, "path length"));
        TriangulatedSphere patch = make_sphere(tail.complex.boundary_complex());
        // Remove the lexicographically least wall facet; the disc copies are
        // untouched and keep their vertex labels.
        Simplex delta = sphere.complex.facets()[wall_begin].simplex;
        for (std::size_t i = wall_begin; i < wall_begin + wall_count; ++i)
            delta = std::min(delta, sphere.complex.facets()[i].simplex);
        Simplex delta_patch = patch.complex.facets()[0].simplex;
        for (const auto& f : patch.complex.facets()) delta_patch = std::min(delta_patch, f.simplex);
        sphere = connect_sum_spheres(sphere, delta, patch, delta_patch);
    }

    PrismSphere out{std::move(sphere), std::move(copies), 0};
    out.extra_facets = out.sphere.complex.facet_count() - 2 * D.facet_count();
    return out;
}

inline PrismSphere build_prism_sphere(const NPath& p, const Int& m) {
    if (!validate_path(p)) throw std::invalid_argument("build_prism_sphere: invalid path");
    return build_prism_sphere(p.complex, m);
}

namespace detail {

// Lazy lexicographic enumeration of embeddings of D (in rank space) into the
// sphere: ranks are assigned ascending vertex candidates, pruned by requiring
// every partially assigned D-facet image to fit inside some sphere facet.
// The visitor returns false to stop the search.
class CopyEnumerator {
  public:
    CopyEnumerator(const SimplicialComplex& dnorm, const SimplicialComplex& sphere)
        : dnorm_(dnorm), sphere_(sphere), sphere_vertices_(sphere.vertices()) {
        for (const auto& f : sphere_.facets()) sphere_facets_.insert(f.simplex);
        const std::size_t d = dnorm_.vertices().size();
        facets_touching_.resize(d);
        for (std::size_t fi = 0; fi < dnorm_.facet_count(); ++fi)
            for (VertexId v : dnorm_.facets()[fi].simplex.v)
                facets_touching_[static_cast<std::size_t>(v)].push_back(fi);
        image_.assign(d, -1);
    }

    using Visitor = std::function<bool(const std::vector<VertexId>&, int)>;

    // Enumerates copies avoiding `excluded` vertices; returns false if the
    // visitor stopped the search.
    bool enumerate(const std::set<VertexId>& excluded, const Visitor& visit) {
        excluded_ = &excluded;
        visit_ = &visit;
        return assign(0);
    }

  private:
    bool assign(std::size_t r) {
        if (r == image_.size()) {
            const int ratio = orientation_ratio(dnorm_, sphere_, image_);
            return (*visit_)(image_, ratio);
        }
        for (VertexId cand : sphere_vertices_) {
            if (excluded_->count(cand)) continue;
            bool used = false;
            for (std::size_t t = 0; t < r; ++t)
                if (image_[t] == cand) {
                    used = true;
                    break;
                }
            if (used) continue;
            image_[r] = cand;
            if (feasible(r)) {
                if (!assign(r + 1)) return false;
            }
        }
        image_[r] = -1;
        return true;
    }

    bool feasible(std::size_t r) const {
        for (std::size_t fi : facets_touching_[r]) {
            const auto& fverts = dnorm_.facets()[fi].simplex.v;
            std::vector<VertexId> mapped;
            bool complete = true;
            for (VertexId v : fverts) {
                if (static_cast<std::size_t>(v) <= r)
                    mapped.push_back(image_[static_cast<std::size_t>(v)]);
                else
                    complete = false;
            }
            std::sort(mapped.begin(), mapped.end());
            if (complete) {
                if (!sphere_facets_.count(Simplex(mapped))) return false;
            } else {
                bool inside_some = false;
                for (const auto& sf : sphere_.facets()) {
                    if (std::includes(sf.simplex.v.begin(), sf.simplex.v.end(), mapped.begin(),
                                      mapped.end())) {
                        inside_some = true;
                        break;
                    }
                }
                if (!inside_some) return false;
            }
        }
        return true;
    }

    const SimplicialComplex& dnorm_;
    const SimplicialComplex& sphere_;
    std::vector<VertexId> sphere_vertices_;
    std::set<Simplex> sphere_facets_;
    std::vector<std::vector<std::size_t>> facets_touching_;
    std::vector<VertexId> image_;
    const std::set<VertexId>* excluded_ = nullptr;
    const Visitor* visit_ = nullptr;
};

}  // namespace detail

// Searches the sphere for two vertex-disjoint, oppositely oriented copies of
// the disc D. Deterministic: the outer copy is enumerated in lexicographic
// image order, and for each the inner copy likewise; the first valid pair is
// the witness.
inline std::optional<DiscCopyPair> is_D_large(const TriangulatedSphere& s,
                                              const SimplicialComplex& D) {
    if (s.complex.n() != D.n()) throw std::invalid_argument("is_D_large: dimension mismatch");
    if (!D.disc_certificate())
        throw std::invalid_argument("is_D_large: D fails the disc certificate");

    const auto dverts = D.vertices();
    const auto rank = detail::rank_of(dverts);
    std::vector<OrientedFacet> dfacets;
    for (const auto& f : D.facets()) {
        std::vector<VertexId> verts;
        for (VertexId v : f.simplex.v) verts.push_back(static_cast<VertexId>(rank.at(v)));
        dfacets.push_back({Simplex(std::move(verts)), f.sign});
    }
    const SimplicialComplex dnorm(D.n(), std::move(dfacets));

    std::optional<DiscCopyPair> found;
    detail::CopyEnumerator outer(dnorm, s.complex);
    const std::set<VertexId> no_exclusions;
    outer.enumerate(no_exclusions, [&](const std::vector<VertexId>& img0, int flag0) {
        std::set<VertexId> taken(img0.begin(), img0.end());
        detail::CopyEnumerator inner(dnorm, s.complex);
        inner.enumerate(taken, [&](const std::vector<VertexId>& img1, int flag1) {
            if (flag1 != -flag0) return true;
            found = DiscCopyPair{img0, img1, flag0, flag1};
            return false;
        });
        return !found.has_value();
    });
    return found;
}

// Vertex count of the sphere produced by build_prism_sphere(D, m): 2d when
// the nt wall facets already cover m, otherwise 2d + L where the boundary of
// an (n+1)-path of length L = ceil((m - nt + 1)/n) supplies the deficit (the
// connect sum adds L+n+1 vertices and identifies n+1 of them).
inline Int vsphere_upper_formula(const Int& d, const Int& t, const Int& n, const Int& m) {
    if (d < 1 || t < 1 || n < 1) throw std::invalid_argument("vsphere_upper_formula: bad disc data");
    if (m < 0) throw std::invalid_argument("vsphere_upper_formula: m must be >= 0");
    const Int nt = n * t;
    if (nt >= m) return 2 * d;
    return 2 * d + ceil_div(m - nt + 1, n);
}

inline Int vsphere_upper(const SimplicialComplex& D, const Int& m) {
    if (!D.disc_certificate())
        throw std::invalid_argument("vsphere_upper: D fails the disc certificate");
    return vsphere_upper_formula(Int(D.vertex_count()), Int(D.boundary_ridges().size()),
                                 Int(D.n()), m);
}

}  // namespace linkforge::simplicial
