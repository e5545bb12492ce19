#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "posheaf/error.hpp"

namespace posheaf {

/// Dense element handle, assigned in declaration order.
using Element = std::size_t;
using CoverPair = std::pair<Element, Element>;

namespace detail {

// Kahn's algorithm; ties broken by smallest handle. Throws on cycles.
inline std::vector<Element> topo_sort(std::size_t n, const std::vector<std::vector<Element>>& succ) {
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& s : succ)
    for (auto b : s) ++indeg[b];
  std::priority_queue<Element, std::vector<Element>, std::greater<>> ready;
  for (Element i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(i);
  std::vector<Element> order;
  while (!ready.empty()) {
    Element a = ready.top();
    ready.pop();
    order.push_back(a);
    for (auto b : succ[a])
      if (--indeg[b] == 0) ready.push(b);
  }
  if (order.size() != n) throw Error(ErrorCode::CycleDetected, "relation is not a partial order");
  return order;
}

// closure[a][b] == true iff a < b.
inline std::vector<std::vector<bool>> strict_closure(std::size_t n, const std::vector<std::vector<Element>>& succ,
                                                     const std::vector<Element>& topo) {
  std::vector<std::vector<bool>> lt(n, std::vector<bool>(n, false));
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    Element a = *it;
    for (auto b : succ[a]) {
      lt[a][b] = true;
      for (Element c = 0; c < n; ++c)
        if (lt[b][c]) lt[a][c] = true;
    }
  }
  return lt;
}

}  // namespace detail

/// Hasse diagram of the strict order generated by `pairs` on n handles.
inline std::vector<CoverPair> transitive_reduction(std::size_t n, const std::vector<CoverPair>& pairs) {
  std::vector<std::vector<Element>> succ(n);
  for (auto [a, b] : pairs) {
    if (a == b) throw Error(ErrorCode::CycleDetected, "reflexive pair in strict order");
    succ[a].push_back(b);
  }
  auto topo = detail::topo_sort(n, succ);
  auto lt = detail::strict_closure(n, succ, topo);
  std::vector<CoverPair> covers;
  for (Element a = 0; a < n; ++a)
    for (Element b = 0; b < n; ++b) {
      if (!lt[a][b]) continue;
      bool covering = true;
      for (Element c = 0; c < n && covering; ++c)
        if (lt[a][c] && lt[c][b]) covering = false;
      if (covering) covers.emplace_back(a, b);
    }
  return covers;
}

/// String-level reduction; elements are numbered by first appearance.
inline std::vector<std::pair<std::string, std::string>> transitive_reduction(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<std::string> names;
  std::unordered_map<std::string, Element> index;
  auto id = [&](const std::string& s) {
    auto [it, inserted] = index.emplace(s, names.size());
    if (inserted) names.push_back(s);
    return it->second;
  };
  std::vector<CoverPair> numbered;
  for (const auto& [a, b] : pairs) {
    Element ia = id(a);
    numbered.emplace_back(ia, id(b));
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (auto [a, b] : transitive_reduction(names.size(), numbered)) out.emplace_back(names[a], names[b]);
  return out;
}

/// Finite poset stored by its covering relation, with cached strict order
/// and a deterministic linearization. Immutable after construction.
class Poset {
 public:
  Poset() = default;

  static Poset build(std::vector<std::string> elements,
                     const std::vector<std::pair<std::string, std::string>>& covers) {
    Poset p;
    p.names_ = std::move(elements);
    for (Element i = 0; i < p.names_.size(); ++i)
      if (!p.index_.emplace(p.names_[i], i).second)
        throw Error(ErrorCode::DuplicateElement, "element \"" + p.names_[i] + "\" declared twice");
    std::vector<CoverPair> pairs;
    for (const auto& [a, b] : covers) pairs.emplace_back(p.index(a), p.index(b));
    p.init(pairs);
    return p;
  }

  static Poset build_indexed(std::vector<std::string> elements, const std::vector<CoverPair>& pairs) {
    Poset p;
    p.names_ = std::move(elements);
    for (Element i = 0; i < p.names_.size(); ++i)
      if (!p.index_.emplace(p.names_[i], i).second)
        throw Error(ErrorCode::DuplicateElement, "element \"" + p.names_[i] + "\" declared twice");
    p.init(pairs);
    return p;
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(Element e) const { return names_.at(e); }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  Element index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error(ErrorCode::UnknownElement, "unknown element \"" + name + "\"");
    return it->second;
  }

  /// Covering pairs (a, b), a covered by b, sorted by handle.
  const std::vector<CoverPair>& covers() const { return covers_; }
  const std::vector<Element>& upper_covers(Element e) const { return up_[e]; }
  const std::vector<Element>& lower_covers(Element e) const { return down_[e]; }
  bool is_cover(Element a, Element b) const {
    return std::binary_search(up_[a].begin(), up_[a].end(), b);
  }

  bool less(Element a, Element b) const { return lt_[a][b]; }
  bool leq(Element a, Element b) const { return a == b || lt_[a][b]; }
  bool comparable(Element a, Element b) const { return leq(a, b) || leq(b, a); }

  const std::vector<Element>& topo_order() const { return topo_; }
  std::size_t topo_position(Element e) const { return pos_[e]; }

  /// Recorded when the declared covers were not already a Hasse diagram.
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::vector<Element> strictly_below(Element s) const {
    std::vector<Element> out;
    for (Element t : topo_) if (lt_[t][s]) out.push_back(t);
    return out;
  }

  bool is_minimal(Element e) const { return down_[e].empty(); }
  bool is_maximal(Element e) const { return up_[e].empty(); }

  /// Length of the longest chain (number of elements minus one); -1 if empty.
  int height() const {
    if (names_.empty()) return -1;
    std::vector<int> depth(size(), 0);
    int h = 0;
    for (Element e : topo_) {
      for (Element d : down_[e]) depth[e] = std::max(depth[e], depth[d] + 1);
      h = std::max(h, depth[e]);
    }
    return h;
  }

  friend bool operator==(const Poset& a, const Poset& b) {
    return a.names_ == b.names_ && a.covers_ == b.covers_;
  }

 private:
  void init(const std::vector<CoverPair>& pairs) {
    const std::size_t n = names_.size();
    covers_ = transitive_reduction(n, pairs);
    std::set<CoverPair> given(pairs.begin(), pairs.end());
    if (given.size() != covers_.size())
      warnings_.push_back("covers were not a Hasse diagram; replaced by their transitive reduction (" +
                          std::to_string(given.size()) + " -> " + std::to_string(covers_.size()) + " pairs)");
    up_.assign(n, {});
    down_.assign(n, {});
    for (auto [a, b] : covers_) {
      up_[a].push_back(b);
      down_[b].push_back(a);
    }
    for (auto& v : up_) std::sort(v.begin(), v.end());
    for (auto& v : down_) std::sort(v.begin(), v.end());
    topo_ = detail::topo_sort(n, up_);
    lt_ = detail::strict_closure(n, up_, topo_);
    pos_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) pos_[topo_[i]] = i;
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, Element> index_;
  std::vector<CoverPair> covers_;
  std::vector<std::vector<Element>> up_, down_;
  std::vector<std::vector<bool>> lt_;
  std::vector<Element> topo_;
  std::vector<std::size_t> pos_;
  std::vector<std::string> warnings_;
};

inline Poset build_poset(std::vector<std::string> elements,
                         const std::vector<std::pair<std::string, std::string>>& covers) {
  return Poset::build(std::move(elements), covers);
}

/// Element names in linearized order.
inline std::vector<std::string> topological_sort(const Poset& p) {
  std::vector<std::string> out;
  for (Element e : p.topo_order()) out.push_back(p.name(e));
  return out;
}

/// Induced subposet on a subset; covers are recomputed from the restricted order.
inline Poset induced_subposet(const Poset& p, std::vector<Element> subset) {
  std::sort(subset.begin(), subset.end());
  std::vector<std::string> names;
  for (Element e : subset) names.push_back(p.name(e));
  std::vector<CoverPair> pairs;
  for (std::size_t i = 0; i < subset.size(); ++i)
    for (std::size_t j = 0; j < subset.size(); ++j)
      if (p.less(subset[i], subset[j])) pairs.emplace_back(i, j);
  return Poset::build_indexed(std::move(names), pairs);
}

inline Poset down_set(const Poset& p, Element s, bool strict) {
  std::vector<Element> subset;
  for (Element t = 0; t < p.size(); ++t)
    if (p.less(t, s) || (!strict && t == s)) subset.push_back(t);
  return induced_subposet(p, std::move(subset));
}

inline Poset down_set(const Poset& p, const std::string& s, bool strict) { return down_set(p, p.index(s), strict); }

/// A chain s0 < ... < sj, as handles of the owning poset.
struct ChainSimplex {
  std::vector<Element> elements;
  std::size_t dim() const { return elements.size() - 1; }
  Element max() const { return elements.back(); }
  friend bool operator==(const ChainSimplex&, const ChainSimplex&) = default;
};

/// All nonempty chains grouped by dimension; within a dimension, chains are in
/// lexicographic order of their topological positions.
inline std::vector<std::vector<ChainSimplex>> order_complex(const Poset& p) {
  std::vector<std::vector<ChainSimplex>> by_dim;
  std::vector<Element> chain;
  std::function<void()> extend = [&]() {
    std::size_t d = chain.size() - 1;
    if (by_dim.size() <= d) by_dim.resize(d + 1);
    by_dim[d].push_back({chain});
    for (Element next : p.topo_order()) {
      if (p.topo_position(next) <= p.topo_position(chain.back()) || !p.less(chain.back(), next)) continue;
      chain.push_back(next);
      extend();
      chain.pop_back();
    }
  };
  for (Element e : p.topo_order()) {
    chain = {e};
    extend();
  }
  return by_dim;
}

// Canonical small posets used throughout the tests and fixtures.

/// Cells(G) for a graph on vertices v0..v{n-1}; edge k is named e{k}.
inline Poset graph_poset(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::string> names;
  for (std::size_t v = 0; v < vertices; ++v) names.push_back("v" + std::to_string(v));
  std::vector<CoverPair> pairs;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    auto [u, w] = edges[k];
    if (u >= vertices || w >= vertices || u == w)
      throw Error(ErrorCode::UnknownVertex, "bad edge endpoints for e" + std::to_string(k));
    names.push_back("e" + std::to_string(k));
    pairs.emplace_back(u, vertices + k);
    pairs.emplace_back(w, vertices + k);
  }
  return Poset::build_indexed(std::move(names), pairs);
}

/// Cycle graph C_n: edge e{i} joins v{i} and v{i+1 mod n}.
inline Poset cycle_poset(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return graph_poset(n, edges);
}

/// Path graph on n vertices.
inline Poset path_poset(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return graph_poset(n, edges);
}

/// Two-layer poset V + H with v < h iff v is in h. Hyperedges default to h0, h1, ...
inline Poset hypergraph_to_poset(const std::vector<std::string>& vertices,
                                 const std::vector<std::vector<std::string>>& hyperedges,
                                 std::vector<std::string> hyperedge_names = {}) {
  if (hyperedge_names.empty())
    for (std::size_t k = 0; k < hyperedges.size(); ++k) hyperedge_names.push_back("h" + std::to_string(k));
  if (hyperedge_names.size() != hyperedges.size())
    throw Error(ErrorCode::ShapeMismatch, "one name per hyperedge required");
  std::set<std::string> known(vertices.begin(), vertices.end());
  std::vector<std::string> names = vertices;
  names.insert(names.end(), hyperedge_names.begin(), hyperedge_names.end());
  std::vector<std::pair<std::string, std::string>> covers;
  for (std::size_t k = 0; k < hyperedges.size(); ++k) {
    if (hyperedges[k].empty()) throw Error(ErrorCode::EmptyHyperedge, hyperedge_names[k] + " has no vertices");
    std::set<std::string> seen;
    for (const auto& v : hyperedges[k]) {
      if (!known.count(v)) throw Error(ErrorCode::UnknownVertex, "unknown vertex \"" + v + "\"");
      if (seen.insert(v).second) covers.emplace_back(v, hyperedge_names[k]);
    }
  }
  return Poset::build(std::move(names), covers);
}

/// Poset of nonempty faces of the simplicial complex generated by `facets`.
/// Faces are named by their sorted vertex labels joined with ','.
inline Poset simplicial_complex_poset(const std::vector<std::vector<int>>& facets) {
  std::set<std::vector<int>> faces;
  for (auto facet : facets) {
    std::sort(facet.begin(), facet.end());
    facet.erase(std::unique(facet.begin(), facet.end()), facet.end());
    const std::size_t k = facet.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
      std::vector<int> face;
      for (std::size_t i = 0; i < k; ++i)
        if (mask >> i & 1) face.push_back(facet[i]);
      faces.insert(face);
    }
  }
  std::vector<std::vector<int>> ordered(faces.begin(), faces.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
  auto label = [](const std::vector<int>& f) {
    std::string s;
    for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + std::to_string(f[i]);
    return s;
  };
  std::map<std::vector<int>, Element> index;
  std::vector<std::string> names;
  for (const auto& f : ordered) {
    index[f] = names.size();
    names.push_back(label(f));
  }
  std::vector<CoverPair> pairs;
  for (const auto& f : ordered) {
    if (f.size() < 2) continue;
    for (std::size_t drop = 0; drop < f.size(); ++drop) {
      auto g = f;
      g.erase(g.begin() + static_cast<std::ptrdiff_t>(drop));
      pairs.emplace_back(index.at(g), index.at(f));
    }
  }
  return Poset::build_indexed(std::move(names), pairs);
}

/// True when every element is a vertex (minimal, covered only by edges) or an
/// edge (maximal, covering exactly two minimal elements).
inline bool is_graph_poset(const Poset& p) {
  for (Element e = 0; e < p.size(); ++e) {
    if (p.is_minimal(e)) continue;
    if (!p.is_maximal(e) || p.lower_covers(e).size() != 2) return false;
    for (Element v : p.lower_covers(e))
      if (!p.is_minimal(v)) return false;
  }
  return true;
}

/// No element is both covered and covering (the shape produced by hypergraph_to_poset).
inline bool is_two_layer(const Poset& p) {
  for (Element e = 0; e < p.size(); ++e)
    if (!p.is_minimal(e) && !p.is_maximal(e)) return false;
  return true;
}

}  // namespace posheaf
