#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "posheaf/error.hpp"
#include "posheaf/field.hpp"
#include "posheaf/linalg.hpp"
#include "posheaf/matrix.hpp"
#include "posheaf/poset.hpp"
#include "posheaf/sheaf.hpp"

namespace posheaf {

enum class ComplexKind { Roos, Cellular, Minimal };

inline std::string to_string(ComplexKind k) {
  switch (k) {
    case ComplexKind::Roos: return "roos";
    case ComplexKind::Cellular: return "cellular";
    case ComplexKind::Minimal: return "minimal";
  }
  return "?";
}

inline ComplexKind parse_complex_kind(const std::string& s) {
  if (s == "roos") return ComplexKind::Roos;
  if (s == "cellular") return ComplexKind::Cellular;
  if (s == "minimal") return ComplexKind::Minimal;
  throw Error(ErrorCode::SchemaError, "method must be roos, cellular or minimal, got \"" + s + "\"");
}

/// One direct summand D(element) of a cochain group.
struct SummandTag {
  Element element = 0;
  std::size_t copy = 0;                  // index among summands of the same element in this degree
  std::vector<Element> chain;            // Roos: the chain; Cellular: the simplex element alone
  std::optional<std::size_t> generator;  // Minimal: generator index
  std::size_t offset = 0;                // position within C^j
  std::size_t dim = 0;
};

template <class T>
struct CochainComplex {
  ComplexKind kind = ComplexKind::Roos;
  Field<T> field{};
  std::vector<std::vector<SummandTag>> degrees;
  std::vector<Matrix<T>> diff;  // diff[j] : C^j -> C^{j+1}, one per degree (the last maps to 0)

  std::size_t num_degrees() const { return degrees.size(); }
  std::size_t dim(std::size_t j) const {
    if (j >= degrees.size()) return 0;
    return degrees[j].empty() ? 0 : degrees[j].back().offset + degrees[j].back().dim;
  }
  /// d_j, with the convention d_{-1} = 0 : 0 -> C^0.
  Matrix<T> d(int j) const {
    if (j < 0) return Matrix<T>(field, dim(0), 0);
    if (static_cast<std::size_t>(j) >= diff.size()) return Matrix<T>(field, 0, dim(j));
    return diff[j];
  }
};

namespace detail {

template <class T>
void tag_layout(std::vector<SummandTag>& layer, const Sheaf<T>& d) {
  std::map<Element, std::size_t> copies;
  std::size_t off = 0;
  for (auto& t : layer) {
    t.copy = copies[t.element]++;
    t.dim = d.stalk_dim(t.element);
    t.offset = off;
    off += t.dim;
  }
}

/// Caches D(s <= t) during a construction.
template <class T>
class MapCache {
 public:
  explicit MapCache(const Sheaf<T>& d) : d_(d) {}
  const Matrix<T>& operator()(Element s, Element t) {
    auto it = cache_.find({s, t});
    if (it == cache_.end()) it = cache_.emplace(CoverPair{s, t}, d_.map(s, t)).first;
    return it->second;
  }

 private:
  const Sheaf<T>& d_;
  std::map<CoverPair, Matrix<T>> cache_;
};

template <class T>
std::size_t layer_dim(const std::vector<SummandTag>& layer) {
  return layer.empty() ? 0 : layer.back().offset + layer.back().dim;
}

}  // namespace detail

/// Checks d_{j+1} d_j = 0 exactly (or to a relative tolerance over R).
template <class T>
void verify_complex(const CochainComplex<T>& c) {
  for (std::size_t j = 0; j + 1 < c.diff.size(); ++j) {
    auto sq = c.diff[j + 1] * c.diff[j];
    if constexpr (ExactScalar<T>) {
      if (!sq.is_zero()) throw Error(ErrorCode::NotAComplex, "d_" + std::to_string(j + 1) + " d_" + std::to_string(j) + " != 0");
    } else {
      auto maxabs = [](const Matrix<T>& m) {
        double v = 0;
        for (double x : m.data()) v = std::max(v, std::abs(x));
        return v;
      };
      if (maxabs(sq) > 1e-10 * (1 + maxabs(c.diff[j + 1]) * maxabs(c.diff[j])))
        throw Error(ErrorCode::NotAComplex, "d_" + std::to_string(j + 1) + " d_" + std::to_string(j) + " != 0");
    }
  }
}

/// Number of cochain degrees of the chain-based constructions: longest chain + 1.
inline std::size_t complex_length(const Poset& p) { return p.size() == 0 ? 0 : static_cast<std::size_t>(p.height()) + 1; }

template <class T>
CochainComplex<T> roos_complex(const Sheaf<T>& d) {
  const auto& p = d.poset();
  const auto& f = d.field();
  CochainComplex<T> c{ComplexKind::Roos, f, {}, {}};
  auto chains = order_complex(p);
  std::vector<std::map<std::vector<Element>, std::size_t>> index(chains.size());
  c.degrees.resize(complex_length(p));
  for (std::size_t j = 0; j < chains.size(); ++j) {
    for (const auto& ch : chains[j]) {
      index[j][ch.elements] = c.degrees[j].size();
      c.degrees[j].push_back({ch.max(), 0, ch.elements, std::nullopt, 0, 0});
    }
    detail::tag_layout(c.degrees[j], d);
  }
  detail::MapCache<T> maps(d);
  for (std::size_t j = 0; j < c.degrees.size(); ++j) {
    Matrix<T> dj(f, c.dim(j + 1), c.dim(j));
    if (j + 1 < c.degrees.size())
      for (const auto& sigma : c.degrees[j + 1]) {
        for (std::size_t i = 0; i < sigma.chain.size(); ++i) {
          auto face = sigma.chain;
          face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
          const auto& tau = c.degrees[j][index[j].at(face)];
          if (!sigma.dim || !tau.dim) continue;
          dj.add_block(sigma.offset, tau.offset, maps(tau.element, sigma.element), i % 2 == 0 ? f.one() : -f.one());
        }
      }
    c.diff.push_back(std::move(dj));
  }
  verify_complex(c);
  return c;
}

/// Minimal elements below each element, in handle order, when the poset is
/// the face poset of a simplicial complex; throws NotSimplicialPoset otherwise.
inline std::vector<std::vector<Element>> simplicial_vertices(const Poset& p) {
  std::vector<std::vector<Element>> verts(p.size());
  for (Element s = 0; s < p.size(); ++s)
    for (Element v = 0; v < p.size(); ++v)
      if (p.is_minimal(v) && p.leq(v, s)) verts[s].push_back(v);
  std::map<std::vector<Element>, Element> seen;
  for (Element s = 0; s < p.size(); ++s) {
    if (verts[s].size() > 20) throw Error(ErrorCode::NotSimplicialPoset, "simplex too large");
    std::size_t below = 0;
    for (Element t = 0; t < p.size(); ++t) {
      if (!p.leq(t, s)) continue;
      ++below;
      if (!std::includes(verts[s].begin(), verts[s].end(), verts[t].begin(), verts[t].end()))
        throw Error(ErrorCode::NotSimplicialPoset, "inconsistent vertex sets");
    }
    if (below != (std::size_t{1} << verts[s].size()) - 1)
      throw Error(ErrorCode::NotSimplicialPoset, "down-set of \"" + p.name(s) + "\" is not a simplex boundary");
    if (!seen.emplace(verts[s], s).second)
      throw Error(ErrorCode::NotSimplicialPoset, "\"" + p.name(s) + "\" and \"" + p.name(seen[verts[s]]) +
                                                     "\" span the same vertices");
  }
  for (Element s = 0; s < p.size(); ++s)
    for (Element t = 0; t < p.size(); ++t)
      if (s != t && !p.less(t, s) &&
          std::includes(verts[s].begin(), verts[s].end(), verts[t].begin(), verts[t].end()))
        throw Error(ErrorCode::NotSimplicialPoset, "order does not match vertex inclusion");
  return verts;
}

template <class T>
CochainComplex<T> cellular_complex(const Sheaf<T>& d) {
  const auto& p = d.poset();
  const auto& f = d.field();
  auto verts = simplicial_vertices(p);
  CochainComplex<T> c{ComplexKind::Cellular, f, {}, {}};
  c.degrees.resize(complex_length(p));
  std::map<std::vector<Element>, std::pair<std::size_t, std::size_t>> where;  // vertex set -> (degree, slot)
  for (Element s : p.topo_order()) {
    std::size_t j = verts[s].size() - 1;
    where[verts[s]] = {j, c.degrees[j].size()};
    c.degrees[j].push_back({s, 0, {s}, std::nullopt, 0, 0});
  }
  for (auto& layer : c.degrees) detail::tag_layout(layer, d);
  for (std::size_t j = 0; j < c.degrees.size(); ++j) {
    Matrix<T> dj(f, c.dim(j + 1), c.dim(j));
    if (j + 1 < c.degrees.size())
      for (const auto& sigma : c.degrees[j + 1]) {
        const auto& vs = verts[sigma.element];
        for (std::size_t i = 0; i < vs.size(); ++i) {
          auto face = vs;
          face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
          const auto& tau = c.degrees[j][where.at(face).second];
          if (!sigma.dim || !tau.dim) continue;
          dj.add_block(sigma.offset, tau.offset, d.edge_map(tau.element, sigma.element),
                       i % 2 == 0 ? f.one() : -f.one());
        }
      }
    c.diff.push_back(std::move(dj));
  }
  verify_complex(c);
  return c;
}

/// Poset-only incidence data: generators with owner and degree, and the
/// incidence I(g, h) = coefficient of h in the boundary of g.
struct IncidenceGenerator {
  Element owner;
  int degree;
};

template <class T>
struct IncidenceData {
  using Generator = IncidenceGenerator;
  Poset poset;
  Field<T> field{};
  std::vector<Generator> generators;
  Matrix<T> incidence;     // |G| x |G|, row g, column h
  Vector<T> augmentation;  // coefficient of the empty generator in the boundary of g

  std::size_t size() const { return generators.size(); }
};

/// Algorithm 1. For each s in topological order, the reduced homology of the
/// accumulated complex below s yields one new generator per class.
template <ExactScalar T>
IncidenceData<T> minimal_incidence(const Poset& p, Field<T> f = {}) {
  // Augmented complex: index 0 is the empty generator; boundary[a] is a sparse column.
  std::vector<int> degree{-1};
  std::vector<Element> owner{p.size()};
  std::vector<std::map<std::size_t, T>> boundary{{}};
  for (Element s : p.topo_order()) {
    std::vector<std::size_t> subset{0};
    for (std::size_t g = 1; g < degree.size(); ++g)
      if (p.less(owner[g], s)) subset.push_back(g);
    std::vector<std::size_t> local(degree.size(), subset.size());
    for (std::size_t k = 0; k < subset.size(); ++k) local[subset[k]] = k;
    AugChainComplex<T> sub{{}, Matrix<T>(f, subset.size(), subset.size())};
    for (std::size_t k = 0; k < subset.size(); ++k) {
      sub.degree.push_back(degree[subset[k]]);
      for (const auto& [h, v] : boundary[subset[k]]) sub.boundary(local[h], k) = v;
    }
    auto classes = homology_basis(sub);
    for (std::size_t i = 0; i < classes.chains.size(); ++i) {
      std::map<std::size_t, T> col;
      for (std::size_t k = 0; k < subset.size(); ++k)
        if (!f.is_zero(classes.chains[i][k])) col.emplace(subset[k], classes.chains[i][k]);
      degree.push_back(classes.degree[i] + 1);
      owner.push_back(s);
      boundary.push_back(std::move(col));
    }
  }
  IncidenceData<T> inc{p, f, {}, Matrix<T>(f, degree.size() - 1, degree.size() - 1), {}};
  for (std::size_t g = 1; g < degree.size(); ++g) {
    inc.generators.push_back({owner[g], degree[g]});
    T aug = f.zero();
    for (const auto& [h, v] : boundary[g]) {
      if (h == 0)
        aug = v;
      else
        inc.incidence(g - 1, h - 1) = v;
    }
    inc.augmentation.push_back(aug);
  }
  return inc;
}

template <class T>
CochainComplex<T> minimal_complex(const Sheaf<T>& d, const IncidenceData<T>& inc) {
  const auto& p = d.poset();
  const auto& f = d.field();
  if (!(inc.poset == p)) throw Error(ErrorCode::PosetMismatch, "incidence data was built on a different poset");
  if (!(inc.field.tag() == f.tag()))
    throw Error(ErrorCode::FieldMismatch, "incidence over " + inc.field.tag().to_string() + ", sheaf over " + f.tag().to_string());
  CochainComplex<T> c{ComplexKind::Minimal, f, {}, {}};
  std::size_t len = 0;
  for (const auto& g : inc.generators) len = std::max(len, static_cast<std::size_t>(g.degree) + 1);
  c.degrees.resize(len);
  std::vector<std::size_t> slot(inc.size());
  for (std::size_t g = 0; g < inc.size(); ++g) {
    auto j = static_cast<std::size_t>(inc.generators[g].degree);
    slot[g] = c.degrees[j].size();
    c.degrees[j].push_back({inc.generators[g].owner, 0, {}, g, 0, 0});
  }
  for (auto& layer : c.degrees) detail::tag_layout(layer, d);
  detail::MapCache<T> maps(d);
  for (std::size_t j = 0; j < c.degrees.size(); ++j) {
    Matrix<T> dj(f, c.dim(j + 1), c.dim(j));
    if (j + 1 < c.degrees.size())
      for (const auto& hi : c.degrees[j + 1])
        for (const auto& lo : c.degrees[j]) {
          const T& coeff = inc.incidence(*hi.generator, *lo.generator);
          if (f.is_zero(coeff) || !hi.dim || !lo.dim) continue;
          dj.add_block(hi.offset, lo.offset, maps(lo.element, hi.element), coeff);
        }
    c.diff.push_back(std::move(dj));
  }
  verify_complex(c);
  return c;
}

template <ExactScalar T>
CochainComplex<T> minimal_complex(const Sheaf<T>& d) {
  return minimal_complex(d, minimal_incidence(d.poset(), d.field()));
}

template <class T>
struct Cohomology {
  std::vector<std::size_t> betti;
  std::vector<std::vector<Vector<T>>> representatives;  // empty when only ranks were requested
};

/// H^j = ker d_j / im d_{j-1}, degree by degree.
template <ExactScalar T>
Cohomology<T> cohomology(const CochainComplex<T>& c, bool representatives = true) {
  Cohomology<T> out;
  for (std::size_t j = 0; j < c.num_degrees(); ++j) {
    auto out_map = c.d(static_cast<int>(j));
    auto in_map = c.d(static_cast<int>(j) - 1);
    if (representatives) {
      auto reps = subquotient_basis<T>(c.field, c.dim(j), out_map, in_map);
      out.betti.push_back(reps.size());
      out.representatives.push_back(std::move(reps));
    } else {
      out.betti.push_back(subquotient_dim<T>(c.dim(j), out_map, in_map));
    }
  }
  return out;
}

template <ExactScalar T>
CochainComplex<T> build_complex(const Sheaf<T>& d, ComplexKind method) {
  switch (method) {
    case ComplexKind::Roos: return roos_complex(d);
    case ComplexKind::Cellular: return cellular_complex(d);
    case ComplexKind::Minimal: return minimal_complex(d);
  }
  throw Error(ErrorCode::SchemaError, "unknown method");
}

/// Number of degrees of the minimal complex: cohomology of any sheaf on p
/// vanishes from this degree on.
template <ExactScalar T>
std::size_t cohomological_length(const Poset& p, Field<T> f = {}) {
  std::size_t len = 0;
  for (const auto& g : minimal_incidence(p, f).generators) len = std::max(len, static_cast<std::size_t>(g.degree) + 1);
  return len;
}

/// Betti vector of length cohomological_length(p), whatever the construction.
template <ExactScalar T>
std::vector<std::size_t> betti(const Sheaf<T>& d, ComplexKind method) {
  auto b = cohomology(build_complex(d, method), false).betti;
  if (method == ComplexKind::Minimal) return b;
  std::size_t len = cohomological_length(d.poset(), d.field());
  bool tail_zero = std::all_of(b.begin() + static_cast<std::ptrdiff_t>(std::min(len, b.size())), b.end(),
                               [](std::size_t x) { return x == 0; });
  if (tail_zero) b.resize(len, 0);
  return b;
}

struct ComplexStats {
  std::map<std::pair<Element, int>, std::size_t> multiplicity;  // (element, degree) -> summand count
  std::size_t complexity = 0;

  std::size_t mu(Element s, int k) const {
    auto it = multiplicity.find({s, k});
    return it == multiplicity.end() ? 0 : it->second;
  }
};

template <class T>
ComplexStats multiplicities(const CochainComplex<T>& c) {
  ComplexStats st;
  for (std::size_t j = 0; j < c.degrees.size(); ++j)
    for (const auto& t : c.degrees[j]) {
      ++st.multiplicity[{t.element, static_cast<int>(j)}];
      ++st.complexity;
    }
  return st;
}

}  // namespace posheaf
