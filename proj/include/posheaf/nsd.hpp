#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "posheaf/cochain.hpp"
#include "posheaf/error.hpp"
#include "posheaf/poset.hpp"
#include "posheaf/sheaf.hpp"
#include "posheaf/spectral.hpp"

namespace posheaf {

namespace detail {

inline void require_graph(const Poset& p) {
  if (!is_graph_poset(p)) throw Error(ErrorCode::NotAGraph, "a graph poset (vertices below edges of size 2) is required");
}

}  // namespace detail

/// Vertex-level Laplacian of a sheaf on a graph poset: rows are vertex stalks
/// stacked in topological order.
inline Laplacian vertex_laplacian(const Sheaf<double>& s, Normalization norm) {
  detail::require_graph(s.poset());
  return laplacian(cellular_complex(s), 0, norm);
}

/// sd(x) = x - 2 eta L_0 x as a dense matrix; eta defaults to 1/(2 lambda_max).
inline RealMatrix sheaf_diffusion_op(const Sheaf<double>& s, std::optional<double> eta = std::nullopt,
                                     Normalization norm = Normalization::Weak) {
  auto l = vertex_laplacian(s, norm);
  double step = eta ? *eta : default_eta(eigendecompose(l));
  if (step < 0) throw Error(ErrorCode::UnstableStepSize, "step size must be nonnegative");
  RealMatrix op = RealMatrix::identity({}, l.matrix.rows());
  return op - (2.0 * step) * l.matrix;
}

struct NsdLayer {
  Sheaf<double> sheaf;
  RealMatrix w1;  // d x d, applied to every vertex stalk
  RealMatrix w2;  // f_in x f_out channel mixing
  std::optional<double> eta;
  Normalization norm = Normalization::Weak;
};

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Uniform vertex stalk dimension of a sheaf on a graph poset.
inline std::size_t vertex_stalk_dim(const Sheaf<double>& s) {
  detail::require_graph(s.poset());
  std::optional<std::size_t> d;
  for (Element e = 0; e < s.poset().size(); ++e) {
    if (!s.poset().is_minimal(e)) continue;
    if (d && *d != s.stalk_dim(e)) throw Error(ErrorCode::DimensionMismatch, "vertex stalks must share one dimension");
    d = s.stalk_dim(e);
  }
  return d.value_or(0);
}

/// Y = sigma(sd * (W1 on each vertex block of X) * W2).
inline RealMatrix nsd_forward(const NsdLayer& layer, const RealMatrix& x) {
  std::size_t d = vertex_stalk_dim(layer.sheaf);
  std::size_t n = 0;
  for (Element e = 0; e < layer.sheaf.poset().size(); ++e) n += layer.sheaf.poset().is_minimal(e) ? 1 : 0;
  if (layer.w1.rows() != d || layer.w1.cols() != d)
    throw Error(ErrorCode::ShapeMismatch, "W1 must be " + std::to_string(d) + "x" + std::to_string(d));
  if (x.rows() != n * d)
    throw Error(ErrorCode::ShapeMismatch, "features need " + std::to_string(n * d) + " rows, got " + x.shape());
  if (layer.w2.rows() != x.cols())
    throw Error(ErrorCode::ShapeMismatch, "W2 has " + std::to_string(layer.w2.rows()) + " rows for " +
                                              std::to_string(x.cols()) + " input channels");
  RealMatrix mixed({}, x.rows(), x.cols());
  for (std::size_t v = 0; v < n; ++v) mixed.add_block(v * d, 0, layer.w1 * x.block(v * d, 0, d, x.cols()), 1.0);
  RealMatrix y = sheaf_diffusion_op(layer.sheaf, layer.eta, layer.norm) * mixed * layer.w2;
  RealMatrix out({}, y.rows(), y.cols());
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j) out(i, j) = logistic(y(i, j));
  return out;
}

inline RealMatrix nsd_stack(const std::vector<NsdLayer>& layers, RealMatrix x) {
  for (const auto& l : layers) x = nsd_forward(l, x);
  return x;
}

}  // namespace posheaf
