#pragma once

// Plain graph-convolution layer built straight from adjacency and degrees.
// Shares no code with the sheaf pipeline; used to cross-check nsd_forward.

#include <cmath>
#include <cstddef>
#include <vector>

#include "posheaf/error.hpp"
#include "posheaf/poset.hpp"

namespace posheaf::oracle {

enum class GcnNorm { None, Symmetric };

/// sigma((I - 2 eta L) X W2); X and the result are row-major n x f vectors of rows.
inline std::vector<std::vector<double>> gcn_forward(const Poset& graph, const std::vector<std::vector<double>>& x,
                                                    const std::vector<std::vector<double>>& w2, double eta,
                                                    GcnNorm norm) {
  std::vector<Element> vertices;
  for (Element e : graph.topo_order())
    if (graph.is_minimal(e)) vertices.push_back(e);
  const std::size_t n = vertices.size();
  std::vector<std::size_t> slot(graph.size(), 0);
  for (std::size_t i = 0; i < n; ++i) slot[vertices[i]] = i;
  std::vector<std::vector<double>> adj(n, std::vector<double>(n, 0.0));
  for (Element e = 0; e < graph.size(); ++e) {
    if (graph.is_minimal(e)) continue;
    const auto& ends = graph.lower_covers(e);
    if (ends.size() != 2) throw Error(ErrorCode::NotAGraph, "edge without two endpoints");
    adj[slot[ends[0]]][slot[ends[1]]] += 1.0;
    adj[slot[ends[1]]][slot[ends[0]]] += 1.0;
  }
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) deg[i] += adj[i][j];
  std::vector<std::vector<double>> lap(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double raw = (i == j ? deg[i] : 0.0) - adj[i][j];
      if (norm == GcnNorm::Symmetric) {
        double si = deg[i] > 0 ? 1.0 / std::sqrt(deg[i]) : 1.0, sj = deg[j] > 0 ? 1.0 / std::sqrt(deg[j]) : 1.0;
        raw *= si * sj;
      }
      lap[i][j] = raw;
    }
  if (x.size() != n) throw Error(ErrorCode::ShapeMismatch, "one feature row per vertex required");
  const std::size_t fin = w2.size(), fout = fin ? w2[0].size() : 0;
  std::vector<std::vector<double>> out(n, std::vector<double>(fout, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> diffused(fin, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double op = (i == j ? 1.0 : 0.0) - 2.0 * eta * lap[i][j];
      if (x[j].size() != fin) throw Error(ErrorCode::ShapeMismatch, "feature width does not match W2");
      for (std::size_t c = 0; c < fin; ++c) diffused[c] += op * x[j][c];
    }
    for (std::size_t o = 0; o < fout; ++o) {
      double z = 0.0;
      for (std::size_t c = 0; c < fin; ++c) z += diffused[c] * w2[c][o];
      out[i][o] = 1.0 / (1.0 + std::exp(-z));
    }
  }
  return out;
}

}  // namespace posheaf::oracle
