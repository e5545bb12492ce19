#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "posheaf/error.hpp"
#include "posheaf/field.hpp"
#include "posheaf/linalg.hpp"
#include "posheaf/matrix.hpp"
#include "posheaf/poset.hpp"

namespace posheaf {

/// Sheaf (diagram) of finite-dimensional vector spaces on a poset. Maps are
/// stored on Hasse edges only; the map of a longer relation s < t is composed
/// along the lexicographically least saturated path in topological order.
template <class T>
class Sheaf {
 public:
  using value_type = T;

  Sheaf() = default;

  /// Validates shapes and edge coverage; compositionality is NOT checked here.
  Sheaf(Poset poset, Field<T> field, std::vector<std::size_t> stalk_dims, std::map<CoverPair, Matrix<T>> edge_maps)
      : poset_(std::move(poset)), field_(field), dims_(std::move(stalk_dims)), maps_(std::move(edge_maps)) {
    if (dims_.size() != poset_.size())
      throw Error(ErrorCode::ShapeMismatch, "one stalk dimension per element required");
    for (const auto& [edge, m] : maps_)
      if (edge.first >= poset_.size() || edge.second >= poset_.size() || !poset_.is_cover(edge.first, edge.second))
        throw Error(ErrorCode::ExtraEdgeMap, "map given on non-Hasse pair " + edge_label(edge));
    for (const auto& edge : poset_.covers()) {
      auto it = maps_.find(edge);
      if (it == maps_.end()) throw Error(ErrorCode::MissingEdgeMap, "missing " + edge_label(edge));
      if (it->second.rows() != dims_[edge.second] || it->second.cols() != dims_[edge.first])
        throw Error(ErrorCode::ShapeMismatch, edge_label(edge) + " expects " + std::to_string(dims_[edge.second]) +
                                                  "x" + std::to_string(dims_[edge.first]) + ", got " +
                                                  it->second.shape());
    }
    offsets_.assign(poset_.size(), 0);
    std::size_t off = 0;
    for (Element e : poset_.topo_order()) {
      offsets_[e] = off;
      off += dims_[e];
    }
    total_ = off;
  }

  const Poset& poset() const { return poset_; }
  const Field<T>& field() const { return field_; }
  const std::vector<std::size_t>& stalk_dims() const { return dims_; }
  std::size_t stalk_dim(Element e) const { return dims_.at(e); }
  const std::map<CoverPair, Matrix<T>>& edge_maps() const { return maps_; }
  const Matrix<T>& edge_map(Element a, Element b) const {
    auto it = maps_.find({a, b});
    if (it == maps_.end()) throw Error(ErrorCode::MissingEdgeMap, "no Hasse edge " + edge_label({a, b}));
    return it->second;
  }

  /// Offset of each stalk in the concatenation of all stalks in topological order.
  std::size_t offset(Element e) const { return offsets_.at(e); }
  std::size_t total_dim() const { return total_; }

  /// Lexicographically least saturated path from s up to t (inclusive).
  std::vector<Element> canonical_path(Element s, Element t) const {
    if (!poset_.leq(s, t))
      throw Error(ErrorCode::NotAPath, poset_.name(s) + " is not below " + poset_.name(t));
    std::vector<Element> path{s};
    while (path.back() != t) {
      Element best = t;
      bool found = false;
      for (Element c : poset_.upper_covers(path.back())) {
        if (!poset_.leq(c, t)) continue;
        if (!found || poset_.topo_position(c) < poset_.topo_position(best)) best = c;
        found = true;
      }
      path.push_back(best);
    }
    return path;
  }

  Matrix<T> compose(const std::vector<Element>& path) const {
    Matrix<T> m = Matrix<T>::identity(field_, dims_[path.front()]);
    for (std::size_t i = 1; i < path.size(); ++i) m = edge_map(path[i - 1], path[i]) * m;
    return m;
  }

  /// D(s <= t); the identity when s == t.
  Matrix<T> map(Element s, Element t) const { return compose(canonical_path(s, t)); }

  std::string edge_label(CoverPair e) const {
    auto nm = [&](Element x) { return x < poset_.size() ? poset_.name(x) : std::to_string(x); };
    return nm(e.first) + "<" + nm(e.second);
  }

 private:
  Poset poset_;
  Field<T> field_{};
  std::vector<std::size_t> dims_;
  std::map<CoverPair, Matrix<T>> maps_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

/// Name-keyed construction. Maps are keyed by (lower, upper) element names.
template <class T>
Sheaf<T> build_sheaf(const Poset& p, Field<T> f, const std::map<std::string, std::size_t>& stalks,
                     const std::map<std::pair<std::string, std::string>, Matrix<T>>& maps) {
  std::vector<std::size_t> dims(p.size(), 0);
  std::vector<bool> seen(p.size(), false);
  for (const auto& [name, d] : stalks) {
    auto e = p.index(name);
    dims[e] = d;
    seen[e] = true;
  }
  for (Element e = 0; e < p.size(); ++e)
    if (!seen[e]) throw Error(ErrorCode::ShapeMismatch, "no stalk dimension for \"" + p.name(e) + "\"");
  std::map<CoverPair, Matrix<T>> edge_maps;
  for (const auto& [edge, m] : maps) edge_maps.emplace(CoverPair{p.index(edge.first), p.index(edge.second)}, m);
  return Sheaf<T>(p, f, std::move(dims), std::move(edge_maps));
}

template <class T>
struct CompositionalityViolation {
  Element lower, upper;
  std::vector<Element> path1, path2;
  double defect;  // squared Frobenius distance (count of differing entries over Fp)
};

template <class T>
double squared_difference(const Matrix<T>& a, const Matrix<T>& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) {
    if constexpr (std::is_same_v<T, ModP>) {
      sum += a.data()[k] == b.data()[k] ? 0.0 : 1.0;
    } else if constexpr (std::is_same_v<T, Rational>) {
      Rational d = a.data()[k] - b.data()[k];
      sum += (d * d).template convert_to<double>();
    } else {
      double d = a.data()[k] - b.data()[k];
      sum += d * d;
    }
  }
  return sum;
}

/// Every saturated path s -> t (s < t), in DFS order over upper covers.
inline std::vector<std::vector<Element>> saturated_paths(const Poset& p, Element s, Element t) {
  std::vector<std::vector<Element>> out;
  std::vector<Element> path{s};
  std::function<void()> walk = [&]() {
    if (path.back() == t) {
      out.push_back(path);
      return;
    }
    for (Element c : p.upper_covers(path.back())) {
      if (!p.leq(c, t)) continue;
      path.push_back(c);
      walk();
      path.pop_back();
    }
  };
  walk();
  return out;
}

/// All pairs of saturated paths whose compositions differ. Empty certifies a
/// genuine diagram.
template <class T>
std::vector<CompositionalityViolation<T>> check_compositionality(const Sheaf<T>& d, double tolerance = 0.0) {
  const auto& p = d.poset();
  std::vector<CompositionalityViolation<T>> out;
  for (Element s : p.topo_order())
    for (Element t : p.topo_order()) {
      if (!p.less(s, t) || p.is_cover(s, t)) continue;
      auto paths = saturated_paths(p, s, t);
      if (paths.size() < 2) continue;
      std::vector<Matrix<T>> composed;
      for (const auto& path : paths) composed.push_back(d.compose(path));
      for (std::size_t i = 0; i < paths.size(); ++i)
        for (std::size_t j = i + 1; j < paths.size(); ++j) {
          double defect = squared_difference(composed[i], composed[j]);
          bool differ = ExactScalar<T> ? !(composed[i] == composed[j]) : defect > tolerance;
          if (differ) out.push_back({s, t, paths[i], paths[j], defect});
        }
    }
  return out;
}

template <class T>
Sheaf<T> constant_sheaf(const Poset& p, std::size_t n, Field<T> f = {}) {
  std::map<CoverPair, Matrix<T>> maps;
  for (const auto& e : p.covers()) maps.emplace(e, Matrix<T>::identity(f, n));
  return Sheaf<T>(p, f, std::vector<std::size_t>(p.size(), n), std::move(maps));
}

/// Constant stalk n on the closed down-set of s, zero elsewhere.
template <class T>
Sheaf<T> skyscraper_cone_sheaf(const Poset& p, Element s, std::size_t n, Field<T> f = {}) {
  if (s >= p.size()) throw Error(ErrorCode::UnknownElement, "element handle out of range");
  std::vector<std::size_t> dims(p.size(), 0);
  for (Element t = 0; t < p.size(); ++t)
    if (p.leq(t, s)) dims[t] = n;
  std::map<CoverPair, Matrix<T>> maps;
  for (const auto& [a, b] : p.covers())
    maps.emplace(CoverPair{a, b}, dims[a] && dims[b] ? Matrix<T>::identity(f, n) : Matrix<T>(f, dims[b], dims[a]));
  return Sheaf<T>(p, f, std::move(dims), std::move(maps));
}

/// Stalk n at s only.
template <class T>
Sheaf<T> dirac_sheaf(const Poset& p, Element s, std::size_t n, Field<T> f = {}) {
  if (s >= p.size()) throw Error(ErrorCode::UnknownElement, "element handle out of range");
  std::vector<std::size_t> dims(p.size(), 0);
  dims[s] = n;
  std::map<CoverPair, Matrix<T>> maps;
  for (const auto& [a, b] : p.covers()) maps.emplace(CoverPair{a, b}, Matrix<T>(f, dims[b], dims[a]));
  return Sheaf<T>(p, f, std::move(dims), std::move(maps));
}

/// One-dimensional sheaf on C_n with a single sign flip on v0 < e{n-1}.
template <class T>
Sheaf<T> mobius_sheaf(std::size_t n, Field<T> f = {}) {
  if (n < 3) throw Error(ErrorCode::TooShort, "Mobius sheaf needs a cycle of length >= 3");
  auto p = cycle_poset(n);
  auto s = constant_sheaf<T>(p, 1, f);
  auto maps = s.edge_maps();
  maps.at({p.index("v0"), p.index("e" + std::to_string(n - 1))})(0, 0) = -f.one();
  return Sheaf<T>(p, f, s.stalk_dims(), std::move(maps));
}

/// f*D for a monotone map f: S -> T given by image handles.
template <class T>
Sheaf<T> pullback(const Sheaf<T>& d, const Poset& source, const std::vector<Element>& f) {
  const auto& target = d.poset();
  if (f.size() != source.size()) throw Error(ErrorCode::ShapeMismatch, "map must assign every source element");
  for (auto img : f)
    if (img >= target.size()) throw Error(ErrorCode::UnknownElement, "image outside the target poset");
  for (Element a = 0; a < source.size(); ++a)
    for (Element b = 0; b < source.size(); ++b)
      if (source.less(a, b) && !target.leq(f[a], f[b]))
        throw Error(ErrorCode::NotMonotone, source.name(a) + " < " + source.name(b) + " but images are not ordered");
  std::vector<std::size_t> dims(source.size());
  for (Element a = 0; a < source.size(); ++a) dims[a] = d.stalk_dim(f[a]);
  std::map<CoverPair, Matrix<T>> maps;
  for (const auto& [a, b] : source.covers()) maps.emplace(CoverPair{a, b}, d.map(f[a], f[b]));
  return Sheaf<T>(source, d.field(), std::move(dims), std::move(maps));
}

template <class T>
Sheaf<T> pullback(const Sheaf<T>& d, const Poset& source, const std::map<std::string, std::string>& f) {
  std::vector<Element> handles(source.size());
  for (Element a = 0; a < source.size(); ++a) {
    auto it = f.find(source.name(a));
    if (it == f.end()) throw Error(ErrorCode::UnknownElement, "no image for \"" + source.name(a) + "\"");
    handles[a] = d.poset().index(it->second);
  }
  return pullback(d, source, handles);
}

template <class T>
struct SectionSpace {
  std::vector<Vector<T>> basis;  // concatenated stalk vectors in topological order
  std::size_t dim() const { return basis.size(); }
};

/// Stacked system D(s<t) x_s - x_t = 0 over all Hasse edges.
template <class T>
Matrix<T> coherence_system(const Sheaf<T>& d) {
  const auto& p = d.poset();
  const auto& f = d.field();
  std::size_t rows = 0;
  for (const auto& [a, b] : p.covers()) rows += d.stalk_dim(b);
  Matrix<T> sys(f, rows, d.total_dim());
  std::size_t r = 0;
  for (const auto& [a, b] : p.covers()) {
    sys.add_block(r, d.offset(a), d.edge_map(a, b), f.one());
    sys.add_block(r, d.offset(b), Matrix<T>::identity(f, d.stalk_dim(b)), -f.one());
    r += d.stalk_dim(b);
  }
  return sys;
}

template <ExactScalar T>
SectionSpace<T> global_sections_bruteforce(const Sheaf<T>& d) {
  return {kernel_basis(coherence_system(d))};
}

template <class T>
struct TransportResult {
  std::vector<Element> path;
  Matrix<T> matrix;
};

/// Composition along a zig-zag path; descending steps use inverse maps.
template <class T>
TransportResult<T> parallel_transport(const Sheaf<T>& d, const std::vector<Element>& path) {
  const auto& p = d.poset();
  if (path.empty()) throw Error(ErrorCode::NotAPath, "empty path");
  for (auto e : path)
    if (e >= p.size()) throw Error(ErrorCode::UnknownElement, "path element out of range");
  Matrix<T> m = Matrix<T>::identity(d.field(), d.stalk_dim(path.front()));
  for (std::size_t i = 1; i < path.size(); ++i) {
    Element a = path[i - 1], b = path[i];
    if (p.less(a, b)) {
      auto step = d.map(a, b);
      if (step.rows() != step.cols()) throw Error(ErrorCode::NonInvertibleMap, "non-square map " + d.edge_label({a, b}));
      m = step * m;
    } else if (p.less(b, a)) {
      m = inverse(d.map(b, a)) * m;
    } else {
      throw Error(ErrorCode::NotAPath, p.name(a) + " and " + p.name(b) + " are not comparable");
    }
  }
  return {path, std::move(m)};
}

/// Transport around each fundamental cycle of the undirected Hasse graph,
/// relative to a BFS spanning tree rooted at `base` (neighbors in topological order).
template <class T>
std::vector<TransportResult<T>> monodromy(const Sheaf<T>& d, Element base) {
  const auto& p = d.poset();
  if (base >= p.size()) throw Error(ErrorCode::UnknownElement, "base element out of range");
  std::vector<std::vector<Element>> adj(p.size());
  for (const auto& [a, b] : p.covers()) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& n : adj)
    std::sort(n.begin(), n.end(), [&](Element x, Element y) { return p.topo_position(x) < p.topo_position(y); });
  const Element none = p.size();
  std::vector<Element> parent(p.size(), none);
  std::vector<bool> seen(p.size(), false);
  std::deque<Element> queue{base};
  seen[base] = true;
  while (!queue.empty()) {
    Element x = queue.front();
    queue.pop_front();
    for (Element y : adj[x])
      if (!seen[y]) {
        seen[y] = true;
        parent[y] = x;
        queue.push_back(y);
      }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw Error(ErrorCode::Disconnected, "Hasse diagram is not connected");
  auto to_root = [&](Element x) {
    std::vector<Element> path{x};
    while (path.back() != base) path.push_back(parent[path.back()]);
    return path;
  };
  std::vector<TransportResult<T>> loops;
  for (const auto& [a, b] : p.covers()) {
    if (parent[a] == b || parent[b] == a) continue;
    auto up = to_root(a);
    std::reverse(up.begin(), up.end());
    auto down = to_root(b);
    up.insert(up.end(), down.begin(), down.end());
    loops.push_back(parallel_transport(d, up));
  }
  return loops;
}

}  // namespace posheaf
