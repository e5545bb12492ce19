#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "posheaf/error.hpp"
#include "posheaf/nsd.hpp"
#include "posheaf/poset.hpp"
#include "posheaf/sheaf.hpp"
#include "posheaf/spectral.hpp"

namespace posheaf {

struct LearnConfig {
  double lr = 0.1;
  std::size_t iters = 200;
  std::size_t d = 1;
  std::uint64_t seed = 0;
};

struct LearnResult {
  Sheaf<double> sheaf;
  std::vector<double> loss_history;  // accepted losses, starting with the initial one
};

namespace detail {

// Parameters: for each edge e = {u < v by handle}, F_ue then F_ve, each d x d row-major.
struct EdgeParams {
  std::vector<Element> edges;
  std::vector<std::pair<Element, Element>> ends;
  std::size_t d = 1;

  std::size_t per_edge() const { return 2 * d * d; }
  std::size_t size() const { return edges.size() * per_edge(); }
};

inline double edge_loss(const EdgeParams& ep, const RealVector& theta, const std::vector<std::size_t>& vslot,
                        const std::vector<RealVector>& signals) {
  const std::size_t d = ep.d, dd = d * d;
  double loss = 0.0;
  for (const auto& x : signals)
    for (std::size_t k = 0; k < ep.edges.size(); ++k) {
      const double* fu = theta.data() + k * ep.per_edge();
      const double* fv = fu + dd;
      const double* xu = x.data() + vslot[ep.ends[k].first] * d;
      const double* xv = x.data() + vslot[ep.ends[k].second] * d;
      for (std::size_t i = 0; i < d; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < d; ++j) r += fv[i * d + j] * xv[j] - fu[i * d + j] * xu[j];
        loss += r * r;
      }
    }
  return loss;
}

inline void project_edges(const EdgeParams& ep, RealVector& theta) {
  for (std::size_t k = 0; k < ep.edges.size(); ++k) {
    double* f = theta.data() + k * ep.per_edge();
    double n = 0.0;
    for (std::size_t i = 0; i < ep.per_edge(); ++i) n += f[i] * f[i];
    n = std::sqrt(n);
    if (n == 0.0) continue;
    for (std::size_t i = 0; i < ep.per_edge(); ++i) f[i] /= n;
  }
}

// Drops each edge's radial gradient component, leaving the tangent direction
// on the unit sphere. Without this, a step along the radial part can flip an
// edge's sign without moving it, so an edge can stall at its worst point.
inline void tangent_gradient(const EdgeParams& ep, const RealVector& theta, RealVector& g) {
  for (std::size_t k = 0; k < ep.edges.size(); ++k) {
    const double* f = theta.data() + k * ep.per_edge();
    double* gk = g.data() + k * ep.per_edge();
    double dot = 0.0;
    for (std::size_t i = 0; i < ep.per_edge(); ++i) dot += f[i] * gk[i];
    for (std::size_t i = 0; i < ep.per_edge(); ++i) gk[i] -= dot * f[i];
  }
}

}  // namespace detail

/// Fits restriction maps to smooth signals: projected gradient descent on the
/// Dirichlet energy, each edge's pair of maps kept at unit Frobenius norm.
inline LearnResult learn_sheaf(const Poset& graph, const std::vector<RealVector>& signals, const LearnConfig& cfg) {
  detail::require_graph(graph);
  if (signals.empty()) throw Error(ErrorCode::EmptySignalSet, "at least one signal is required");
  if (cfg.d == 0) throw Error(ErrorCode::DimensionMismatch, "stalk dimension must be positive");
  detail::EdgeParams ep;
  ep.d = cfg.d;
  std::vector<std::size_t> vslot(graph.size(), 0);
  std::size_t nv = 0;
  for (Element e : graph.topo_order()) {
    if (graph.is_minimal(e)) {
      vslot[e] = nv++;
    } else {
      const auto& lc = graph.lower_covers(e);
      ep.edges.push_back(e);
      ep.ends.emplace_back(lc[0], lc[1]);
    }
  }
  for (const auto& x : signals)
    if (x.size() != nv * cfg.d)
      throw Error(ErrorCode::DimensionMismatch, "signal has " + std::to_string(x.size()) + " entries, expected " +
                                                    std::to_string(nv * cfg.d));

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RealVector theta(ep.size());
  for (auto& t : theta) t = normal(rng);
  detail::project_edges(ep, theta);

  auto loss = [&](const RealVector& t) { return detail::edge_loss(ep, t, vslot, signals); };
  LearnResult out;
  double current = loss(theta);
  out.loss_history.push_back(current);
  for (std::size_t it = 0; it < cfg.iters && current > 0.0; ++it) {
    auto g = finite_difference_gradient(loss, theta);
    detail::tangent_gradient(ep, theta, g);
    bool accepted = false;
    double lr = cfg.lr;  // backtracking restarts from the configured step every iteration
    for (int halving = 0; halving <= 20; ++halving) {
      RealVector trial = theta;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= lr * g[i];
      detail::project_edges(ep, trial);
      double l = loss(trial);
      if (l < current) {
        theta = std::move(trial);
        current = l;
        accepted = true;
        break;
      }
      lr *= 0.5;
    }
    if (!accepted) break;
    out.loss_history.push_back(current);
  }

  std::vector<std::size_t> dims(graph.size(), cfg.d);
  std::map<CoverPair, RealMatrix> maps;
  for (std::size_t k = 0; k < ep.edges.size(); ++k) {
    RealMatrix fu({}, cfg.d, cfg.d), fv({}, cfg.d, cfg.d);
    for (std::size_t i = 0; i < cfg.d * cfg.d; ++i) {
      fu(i / cfg.d, i % cfg.d) = theta[k * ep.per_edge() + i];
      fv(i / cfg.d, i % cfg.d) = theta[k * ep.per_edge() + cfg.d * cfg.d + i];
    }
    maps.emplace(CoverPair{ep.ends[k].first, ep.edges[k]}, fu);
    maps.emplace(CoverPair{ep.ends[k].second, ep.edges[k]}, fv);
  }
  out.sheaf = Sheaf<double>(graph, {}, std::move(dims), std::move(maps));
  return out;
}

}  // namespace posheaf
