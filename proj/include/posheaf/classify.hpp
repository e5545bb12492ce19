#pragma once

#include <map>
#include <optional>
#include <vector>

#include "posheaf/field.hpp"
#include "posheaf/linalg.hpp"
#include "posheaf/poset.hpp"

namespace posheaf {

/// Augmented simplicial chain complex of the order complex: generator 0 is the
/// empty simplex (degree -1), followed by chains grouped by dimension.
template <ExactScalar T>
AugChainComplex<T> order_chain_complex(const Poset& p, Field<T> f = {}) {
  auto chains = order_complex(p);
  std::vector<int> degree{-1};
  std::map<std::vector<Element>, std::size_t> index;
  for (const auto& layer : chains)
    for (const auto& c : layer) {
      index[c.elements] = degree.size();
      degree.push_back(static_cast<int>(c.dim()));
    }
  AugChainComplex<T> cx{degree, Matrix<T>(f, degree.size(), degree.size())};
  for (const auto& layer : chains)
    for (const auto& c : layer) {
      std::size_t col = index.at(c.elements);
      if (c.elements.size() == 1) {
        cx.boundary(0, col) = f.one();
        continue;
      }
      for (std::size_t i = 0; i < c.elements.size(); ++i) {
        auto face = c.elements;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
        cx.boundary(index.at(face), col) = (i % 2 == 0) ? f.one() : -f.one();
      }
    }
  return cx;
}

/// Reduced Betti numbers of |p| over the field, keyed by degree (from -1);
/// only nonzero entries are stored.
template <ExactScalar T>
std::map<int, std::size_t> reduced_betti(const Poset& p, Field<T> f = {}) {
  return homology_basis(order_chain_complex<T>(p, f)).counts();
}

struct PosetClassification {
  bool graded = false;
  std::optional<std::vector<int>> rank;  // by element handle
  bool homology_cell = false;
  bool morse_cell = false;
  std::optional<std::vector<int>> cell_dims;  // by element handle
};

/// Rank function by longest chain below each element; nullopt if some cover
/// does not raise it by exactly one.
inline std::optional<std::vector<int>> grading(const Poset& p) {
  std::vector<int> rk(p.size(), 0);
  for (Element e : p.topo_order())
    for (Element d : p.lower_covers(e)) rk[e] = std::max(rk[e], rk[d] + 1);
  for (auto [a, b] : p.covers())
    if (rk[b] != rk[a] + 1) return std::nullopt;
  return rk;
}

/// Cell-like properties with field coefficients. Each strict down-set is
/// tested for the homology of a sphere S^{k-1}; k is the cell dimension.
template <ExactScalar T>
PosetClassification classify(const Poset& p, Field<T> f = {}) {
  PosetClassification out;
  out.rank = grading(p);
  out.graded = out.rank.has_value();
  std::vector<int> dims(p.size(), 0);
  bool morse = true;
  for (Element s = 0; s < p.size() && morse; ++s) {
    auto betti = reduced_betti<T>(down_set(p, s, true), f);
    if (betti.size() != 1 || betti.begin()->second != 1) {
      morse = false;
      break;
    }
    dims[s] = betti.begin()->first + 1;
  }
  out.morse_cell = morse;
  if (morse) out.cell_dims = dims;
  out.homology_cell = morse && out.graded && dims == *out.rank;
  return out;
}

inline PosetClassification classify(const Poset& p, FieldTag tag) {
  return visit_exact_field(tag, [&](auto f) { return classify(p, f); });
}

}  // namespace posheaf
