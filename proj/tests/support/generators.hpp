#pragma once

#include <cstdint>
#include <cstdlib>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "posheaf/posheaf.hpp"

namespace testsupport {

using namespace posheaf;

/// POSHEAF_SEED pins every randomized test; the default is fixed too.
inline std::uint64_t seed() {
  if (const char* s = std::getenv("POSHEAF_SEED")) return std::strtoull(s, nullptr, 10);
  return 20240611;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(seed());
  return g;
}

inline int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }
inline bool coin(double p) { return std::bernoulli_distribution(p)(rng()); }

/// Random DAG on n nodes named x0.. with edges only from lower to higher index.
inline std::vector<CoverPair> random_dag_pairs(std::size_t n, double p) {
  std::vector<CoverPair> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(p)) pairs.emplace_back(i, j);
  return pairs;
}

inline std::vector<std::string> names(std::size_t n, const std::string& prefix = "x") {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i));
  return v;
}

inline Poset random_poset(std::size_t max_n, double p = 0.25) {
  std::size_t n = static_cast<std::size_t>(uniform(1, static_cast<int>(max_n)));
  return Poset::build_indexed(names(n), random_dag_pairs(n, p));
}

/// Random simple graph on v vertices (no loops, no multi-edges).
inline std::vector<std::pair<std::size_t, std::size_t>> random_graph(std::size_t v, double p) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = i + 1; j < v; ++j)
      if (coin(p)) edges.emplace_back(i, j);
  return edges;
}

inline Poset random_graph_poset(std::size_t max_v, double p = 0.35) {
  std::size_t v = static_cast<std::size_t>(uniform(1, static_cast<int>(max_v)));
  return graph_poset(v, random_graph(v, p));
}

/// Random simplicial complex: a few random facets on up to max_v vertices.
inline Poset random_simplicial_poset(int max_v, int facets, int max_dim) {
  int v = uniform(1, max_v);
  std::vector<std::vector<int>> fs;
  for (int k = 0; k < facets; ++k) {
    std::set<int> s;
    int size = uniform(1, max_dim + 1);
    while (static_cast<int>(s.size()) < std::min(size, v)) s.insert(uniform(0, v - 1));
    fs.emplace_back(s.begin(), s.end());
  }
  return simplicial_complex_poset(fs);
}

template <class T>
Matrix<T> random_int_matrix(const Field<T>& f, std::size_t r, std::size_t c, int lo = -2, int hi = 2) {
  Matrix<T> m(f, r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = f.from_int(uniform(lo, hi));
  return m;
}

/// Unimodular matrix: product of random elementary row operations.
template <class T>
Matrix<T> random_unimodular(const Field<T>& f, std::size_t n) {
  auto m = Matrix<T>::identity(f, n);
  if (n < 2) return uniform(0, 1) ? m : -f.one() * m;
  for (int k = 0; k < 3 * static_cast<int>(n); ++k) {
    std::size_t i = static_cast<std::size_t>(uniform(0, static_cast<int>(n) - 1));
    std::size_t j = static_cast<std::size_t>(uniform(0, static_cast<int>(n) - 2));
    if (j >= i) ++j;
    T c = f.from_int(uniform(-1, 1));
    for (std::size_t col = 0; col < n; ++col) m(i, col) += c * m(j, col);
  }
  return m;
}

/// Random sheaf with arbitrary maps on a height-1 poset (always compositional).
template <class T>
Sheaf<T> random_graph_sheaf(const Poset& p, const Field<T>& f, int max_dim = 3) {
  std::vector<std::size_t> dims(p.size());
  for (auto& d : dims) d = static_cast<std::size_t>(uniform(0, max_dim));
  std::map<CoverPair, Matrix<T>> maps;
  for (const auto& [a, b] : p.covers()) maps.emplace(CoverPair{a, b}, random_int_matrix(f, dims[b], dims[a]));
  return Sheaf<T>(p, f, dims, maps);
}

/// Compositional sheaf on any poset: a direct sum of constant rank-one sheaves
/// supported on random convex subsets, conjugated by a random basis change per stalk.
template <class T>
Sheaf<T> random_compositional_sheaf(const Poset& p, const Field<T>& f, int max_summands = 3) {
  const std::size_t n = p.size();
  int k = uniform(0, max_summands);
  std::vector<std::vector<bool>> supports;
  for (int s = 0; s < k; ++s) {
    std::vector<Element> lows, highs;
    for (Element e = 0; e < n; ++e) {
      if (coin(0.3)) lows.push_back(e);
      if (coin(0.5)) highs.push_back(e);
    }
    std::vector<bool> in(n, false);
    for (Element e = 0; e < n; ++e) {
      bool up = false, down = false;
      for (auto l : lows) up = up || p.leq(l, e);
      for (auto h : highs) down = down || p.leq(e, h);
      in[e] = up && down;
    }
    supports.push_back(in);
  }
  std::vector<std::size_t> dims(n, 0);
  std::vector<std::vector<int>> slot(k, std::vector<int>(n, -1));
  for (int s = 0; s < k; ++s)
    for (Element e = 0; e < n; ++e)
      if (supports[s][e]) slot[s][e] = static_cast<int>(dims[e]++);
  std::vector<Matrix<T>> basis, inv;
  for (Element e = 0; e < n; ++e) {
    basis.push_back(random_unimodular(f, dims[e]));
    inv.push_back(inverse(basis.back()));
  }
  std::map<CoverPair, Matrix<T>> maps;
  for (const auto& [a, b] : p.covers()) {
    Matrix<T> m(f, dims[b], dims[a]);
    for (int s = 0; s < k; ++s)
      if (slot[s][a] >= 0 && slot[s][b] >= 0) m(slot[s][b], slot[s][a]) = f.one();
    maps.emplace(CoverPair{a, b}, basis[b] * m * inv[a]);
  }
  return Sheaf<T>(p, f, dims, maps);
}

}  // namespace testsupport
