#pragma once

#include "numeric.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace linkforge::linkalg {

using ComponentId = std::string;
using LinkingVector = std::vector<Int>;

struct Component {
    ComponentId id;
    // Largest path length for which the component is certified large; 0 when
    // no certificate is carried. Consumed by the stitching pipelines.
    Int path_length = 0;
};

// Ordered oriented components with a symmetric integer linking matrix. The
// diagonal (self-linking) is undefined and unrepresented. Value semantics:
// mutating operations return a new system.
class LinkSystem {
  public:
    LinkSystem() = default;

    void add_component(ComponentId id, Int path_length = 0) {
        if (id.empty()) throw std::invalid_argument("LinkSystem: empty component id");
        if (path_length < 0) throw std::invalid_argument("LinkSystem: negative path_length");
        if (index_.count(id)) throw std::invalid_argument("LinkSystem: duplicate component id " + id);
        index_.emplace(id, comps_.size());
        comps_.push_back({std::move(id), std::move(path_length)});
    }

    bool has(const ComponentId& id) const { return index_.count(id) != 0; }

    std::size_t index_of(const ComponentId& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw std::invalid_argument("LinkSystem: unknown component " + id);
        return it->second;
    }

    const std::vector<Component>& components() const { return comps_; }
    std::size_t size() const { return comps_.size(); }

    void set_lk(const ComponentId& a, const ComponentId& b, Int value) {
        auto key = pair_key(a, b);
        if (value == 0)
            lk_.erase(key);
        else
            lk_[key] = std::move(value);
    }

    Int lk(const ComponentId& a, const ComponentId& b) const {
        auto it = lk_.find(pair_key(a, b));
        return it == lk_.end() ? Int(0) : it->second;
    }

    // Pure orientation flip: negates row and column c, keeps metadata.
    LinkSystem reverse_orientation(const ComponentId& c) const {
        const std::size_t ci = index_of(c);
        LinkSystem out = *this;
        for (auto& [key, value] : out.lk_)
            if (key.first == ci || key.second == ci) value = -value;
        return out;
    }

    std::vector<std::vector<Int>> submatrix(const std::vector<ComponentId>& rows,
                                            const std::vector<ComponentId>& cols) const {
        check_distinct(rows, "rows");
        check_distinct(cols, "cols");
        for (const auto& r : rows)
            for (const auto& c : cols)
                if (r == c)
                    throw std::invalid_argument("submatrix: row/col share component " + r);
        std::vector<std::vector<Int>> out(rows.size(), std::vector<Int>(cols.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) out[i][j] = lk(rows[i], cols[j]);
        return out;
    }

    // Entrywise residues of the linking matrix, diagonal fixed at 0.
    std::vector<std::vector<int>> mod2_matrix() const {
        std::vector<std::vector<int>> out(size(), std::vector<int>(size(), 0));
        for (const auto& [key, value] : lk_) {
            const int r = static_cast<int>(floor_mod(value, 2));
            out[key.first][key.second] = r;
            out[key.second][key.first] = r;
        }
        return out;
    }

  private:
    std::pair<std::size_t, std::size_t> pair_key(const ComponentId& a, const ComponentId& b) const {
        const std::size_t ia = index_of(a), ib = index_of(b);
        if (ia == ib) throw std::invalid_argument("LinkSystem: self-linking is undefined (" + a + ")");
        return {std::min(ia, ib), std::max(ia, ib)};
    }

    static void check_distinct(const std::vector<ComponentId>& ids, const char* what) {
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = i + 1; j < ids.size(); ++j)
                if (ids[i] == ids[j])
                    throw std::invalid_argument(std::string("submatrix: duplicate id in ") + what);
    }

    std::vector<Component> comps_;
    std::unordered_map<ComponentId, std::size_t> index_;
    std::map<std::pair<std::size_t, std::size_t>, Int> lk_;
};

// Integer combination of components, finitely supported. Zero coefficients
// are never stored.
struct Chain {
    std::map<ComponentId, Int> coeff;

    void add(const ComponentId& id, const Int& c) {
        if (c == 0) return;
        auto [it, inserted] = coeff.emplace(id, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) coeff.erase(it);
        }
    }

    Chain operator+(const Chain& rhs) const {
        Chain out = *this;
        for (const auto& [id, c] : rhs.coeff) out.add(id, c);
        return out;
    }

    bool operator==(const Chain&) const = default;
};

// Linking number of a chain with a single component; linking extends
// bilinearly because connect sums act additively on homology classes.
inline Int chain_lk(const LinkSystem& sys, const Chain& z, const ComponentId& target) {
    if (z.coeff.count(target))
        throw std::invalid_argument("chain_lk: target lies in the chain's support");
    Int total = 0;
    for (const auto& [id, c] : z.coeff) total += c * sys.lk(id, target);
    return total;
}

enum class PatternKind { TwoValued, ThreeValued };

inline std::string sign_pattern(const LinkingVector& v, PatternKind kind) {
    std::string out;
    out.reserve(v.size());
    for (const auto& e : v) {
        const int s = sign_of(e);
        if (s > 0)
            out.push_back('+');
        else if (s < 0)
            out.push_back('-');
        else if (kind == PatternKind::ThreeValued)
            out.push_back('0');
        else
            throw std::invalid_argument("sign_pattern: zero entry under the two-valued alphabet");
    }
    return out;
}

// True iff every entry is a nonzero multiple of q.
inline bool verify_conclusion(const LinkingVector& v, const Int& q) {
    if (q < 1) throw std::invalid_argument("verify_conclusion: modulus must be >= 1");
    for (const auto& e : v)
        if (e == 0 || e % q != 0) return false;
    return true;
}

}  // namespace linkforge::linkalg
