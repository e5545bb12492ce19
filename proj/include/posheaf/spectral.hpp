#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "posheaf/cochain.hpp"
#include "posheaf/error.hpp"
#include "posheaf/field.hpp"
#include "posheaf/matrix.hpp"
#include "posheaf/poset.hpp"
#include "posheaf/sheaf.hpp"

namespace posheaf {

using RealMatrix = Matrix<double>;
using RealVector = Vector<double>;
using RealComplex = CochainComplex<double>;

enum class Normalization { None, Weak, Strong };

inline std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::None: return "none";
    case Normalization::Weak: return "weak";
    case Normalization::Strong: return "strong";
  }
  return "?";
}

inline Normalization parse_normalization(const std::string& s) {
  if (s == "none") return Normalization::None;
  if (s == "weak") return Normalization::Weak;
  if (s == "strong") return Normalization::Strong;
  throw Error(ErrorCode::SchemaError, "norm must be none, weak or strong, got \"" + s + "\"");
}

template <class T>
RealMatrix to_real(const Matrix<T>& m) {
  RealMatrix out(Field<double>{}, m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double v;
      if constexpr (std::is_same_v<T, double>)
        v = m(i, j);
      else if constexpr (std::is_same_v<T, Rational>)
        v = m(i, j).template convert_to<double>();
      else
        throw Error(ErrorCode::FieldMismatch, "prime-field data has no real realization");
      if (!std::isfinite(v)) throw Error(ErrorCode::OverflowOnConvert, "entry does not fit a double");
      out(i, j) = v;
    }
  return out;
}

/// Entrywise embedding of an exact complex into double precision.
template <class T>
RealComplex realize(const CochainComplex<T>& c) {
  RealComplex r{c.kind, {}, c.degrees, {}};
  for (const auto& m : c.diff) r.diff.push_back(to_real(m));
  verify_complex(r);
  return r;
}

template <class T>
Sheaf<double> realize(const Sheaf<T>& d) {
  std::map<CoverPair, RealMatrix> maps;
  for (const auto& [e, m] : d.edge_maps()) maps.emplace(e, to_real(m));
  return Sheaf<double>(d.poset(), {}, d.stalk_dims(), std::move(maps));
}

/// Cochain complexes of real sheaves. Minimal uses incidence data computed over Q.
inline RealComplex build_real_complex(const Sheaf<double>& d, ComplexKind method) {
  switch (method) {
    case ComplexKind::Roos: return roos_complex(d);
    case ComplexKind::Cellular: return cellular_complex(d);
    case ComplexKind::Minimal: {
      auto exact = minimal_incidence(d.poset(), Field<Rational>{});
      IncidenceData<double> inc{exact.poset, {}, exact.generators, to_real(exact.incidence), {}};
      for (const auto& a : exact.augmentation) inc.augmentation.push_back(a.convert_to<double>());
      return minimal_complex(d, inc);
    }
  }
  throw Error(ErrorCode::SchemaError, "unknown method");
}

struct Laplacian {
  std::size_t degree = 0;
  RealMatrix matrix;
  Normalization normalization = Normalization::None;
  ComplexKind kind = ComplexKind::Roos;
  std::vector<SummandTag> blocks;  // summands of C^degree
};

struct SpectralBundle {
  std::vector<double> eigenvalues;  // ascending
  RealMatrix eigenvectors;          // column k pairs with eigenvalues[k]
  double lambda_min = 0.0;          // least eigenvalue above the threshold (0 if none)
  double lambda_max = 0.0;
  std::size_t harmonic_dim = 0;
  double threshold = 0.0;
};

/// Cyclic Jacobi eigensolver for symmetric matrices.
inline SpectralBundle eigendecompose(const RealMatrix& sym, double tol = 1e-10, int max_sweeps = 100) {
  const std::size_t n = sym.rows();
  if (sym.cols() != n) throw Error(ErrorCode::DimensionMismatch, "eigendecompose needs a square matrix");
  RealMatrix a = sym;
  RealMatrix v = RealMatrix::identity({}, n);
  double frob = 0.0;
  for (double x : a.data()) frob += x * x;
  frob = std::sqrt(frob);
  auto off = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };
  int sweep = 0;
  while (off() > 1e-15 * frob) {
    if (++sweep > max_sweeps) throw Error(ErrorCode::NoConvergence, "Jacobi iteration did not converge");
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SpectralBundle b;
  b.eigenvectors = RealMatrix({}, n, n);
  for (std::size_t k = 0; k < n; ++k) {
    b.eigenvalues.push_back(a(order[k], order[k]));
    for (std::size_t i = 0; i < n; ++i) b.eigenvectors(i, k) = v(i, order[k]);
  }
  b.lambda_max = n ? std::max(0.0, b.eigenvalues.back()) : 0.0;
  b.threshold = std::max(tol * b.lambda_max, 1e-12);
  for (double l : b.eigenvalues) {
    if (l < b.threshold)
      ++b.harmonic_dim;
    else if (b.lambda_min == 0.0)
      b.lambda_min = l;
  }
  return b;
}

inline SpectralBundle eigendecompose(const Laplacian& l, double tol = 1e-10) { return eigendecompose(l.matrix, tol); }

namespace detail {

inline RealMatrix symmetrized(const RealMatrix& m) {
  RealMatrix s = m;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) s(i, j) = s(j, i) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

inline RealMatrix scale_both_sides(const RealMatrix& l, const std::vector<double>& k) {
  RealMatrix out = l;
  for (std::size_t i = 0; i < l.rows(); ++i)
    for (std::size_t j = 0; j < l.cols(); ++j) out(i, j) = std::sqrt(k[i]) * l(i, j) * std::sqrt(k[j]);
  return out;
}

// Pseudo-inverse convention: zero (or numerically zero) entries map to 1.
inline double pinv_entry(double x, double scale) { return std::abs(x) > 1e-12 * std::max(scale, 1.0) ? 1.0 / x : 1.0; }

}  // namespace detail

/// Delta_j = d_j^T d_j + d_{j-1} d_{j-1}^T, optionally normalized.
inline Laplacian laplacian(const RealComplex& rc, std::size_t j, Normalization norm = Normalization::None) {
  if (j >= rc.num_degrees())
    throw Error(ErrorCode::DegreeOutOfRange, "degree " + std::to_string(j) + " outside 0.." +
                                                 std::to_string(static_cast<int>(rc.num_degrees()) - 1));
  auto dj = rc.d(static_cast<int>(j));
  auto dprev = rc.d(static_cast<int>(j) - 1);
  RealMatrix l = dj.transpose() * dj;
  if (!dprev.empty()) l = l + dprev * dprev.transpose();
  l = detail::symmetrized(l);
  double scale = 0.0;
  for (double x : l.data()) scale = std::max(scale, std::abs(x));
  if (norm == Normalization::Weak) {
    std::vector<double> k(l.rows());
    for (std::size_t i = 0; i < l.rows(); ++i) k[i] = detail::pinv_entry(l(i, i), scale);
    l = detail::symmetrized(detail::scale_both_sides(l, k));
  } else if (norm == Normalization::Strong) {
    RealMatrix q({}, l.rows(), l.cols());
    std::vector<double> nvec(l.rows(), 1.0);
    for (const auto& tag : rc.degrees[j]) {
      if (!tag.dim) continue;
      auto block = eigendecompose(l.block(tag.offset, tag.offset, tag.dim, tag.dim));
      q.add_block(tag.offset, tag.offset, block.eigenvectors, 1.0);
      for (std::size_t i = 0; i < tag.dim; ++i) nvec[tag.offset + i] = detail::pinv_entry(block.eigenvalues[i], scale);
    }
    l = detail::symmetrized(detail::scale_both_sides(q.transpose() * l * q, nvec));
  }
  return {j, std::move(l), norm, rc.kind, rc.degrees[j]};
}

inline std::size_t harmonic_dim(const Laplacian& l, double tol = 1e-8) {
  return eigendecompose(l.matrix, tol).harmonic_dim;
}

inline double dot(const RealVector& a, const RealVector& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "vector lengths differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const RealVector& a) { return std::sqrt(dot(a, a)); }

/// Q(x) = |d_0 x|^2.
inline double dirichlet_energy(const RealComplex& rc, const RealVector& x) {
  if (x.size() != rc.dim(0))
    throw Error(ErrorCode::DimensionMismatch, "cochain has " + std::to_string(x.size()) + " entries, C^0 has " +
                                                  std::to_string(rc.dim(0)));
  auto y = rc.d(0).apply(x);
  return dot(y, y);
}

struct HypergraphEnergies {
  double q_roos = 0.0;
  double q_pairwise = 0.0;
};

/// x is a 0-cochain over all elements, stalks stacked in topological order.
inline HypergraphEnergies hypergraph_energy_forms(const Sheaf<double>& h, const RealVector& x) {
  const auto& p = h.poset();
  if (!is_two_layer(p)) throw Error(ErrorCode::NotTwoLayer, "poset is not a vertex/hyperedge two-layer poset");
  if (x.size() != h.total_dim()) throw Error(ErrorCode::DimensionMismatch, "cochain length does not match stalks");
  auto stalk = [&](Element e) {
    return std::span<const double>(x.data() + h.offset(e), h.stalk_dim(e));
  };
  HypergraphEnergies out;
  for (Element b = 0; b < p.size(); ++b) {
    const auto& members = p.lower_covers(b);
    if (members.empty()) continue;
    std::vector<RealVector> pushed;
    for (Element a : members) pushed.push_back(h.edge_map(a, b).apply(stalk(a)));
    for (const auto& y : pushed)
      for (std::size_t i = 0; i < y.size(); ++i) out.q_roos += (stalk(b)[i] - y[i]) * (stalk(b)[i] - y[i]);
    double pair = 0.0;
    for (std::size_t i = 0; i < pushed.size(); ++i)
      for (std::size_t j = i + 1; j < pushed.size(); ++j)
        for (std::size_t k = 0; k < pushed[i].size(); ++k)
          pair += (pushed[i][k] - pushed[j][k]) * (pushed[i][k] - pushed[j][k]);
    out.q_pairwise += pair / static_cast<double>(pushed.size());
  }
  return out;
}

/// Sets every hyperedge stalk to the barycenter of its pushed-forward vertex values.
inline RealVector barycentric_assignment(const Sheaf<double>& h, RealVector x) {
  const auto& p = h.poset();
  for (Element b = 0; b < p.size(); ++b) {
    const auto& members = p.lower_covers(b);
    if (members.empty()) continue;
    RealVector bar(h.stalk_dim(b), 0.0);
    for (Element a : members) {
      auto y = h.edge_map(a, b).apply(std::span<const double>(x.data() + h.offset(a), h.stalk_dim(a)));
      for (std::size_t i = 0; i < y.size(); ++i) bar[i] += y[i] / static_cast<double>(members.size());
    }
    std::copy(bar.begin(), bar.end(), x.begin() + static_cast<std::ptrdiff_t>(h.offset(b)));
  }
  return x;
}

enum class DiffusionMode { Discrete, ContinuousSpectral };

inline std::string to_string(DiffusionMode m) { return m == DiffusionMode::Discrete ? "discrete" : "continuous"; }

inline DiffusionMode parse_diffusion_mode(const std::string& s) {
  if (s == "discrete") return DiffusionMode::Discrete;
  if (s == "continuous") return DiffusionMode::ContinuousSpectral;
  throw Error(ErrorCode::SchemaError, "mode must be discrete or continuous, got \"" + s + "\"");
}

struct DiffusionConfig {
  std::optional<double> eta;  // default 1/(2 lambda_max)
  std::size_t steps = 100;
  DiffusionMode mode = DiffusionMode::Discrete;
};

struct DiffusionTrace {
  std::vector<RealVector> states;
  std::vector<double> energies;   // <x_k, L x_k>
  std::vector<double> distances;  // |x_k - x_inf|
  RealVector limit;               // harmonic projection of x_0
  double eta = 0.0;
  DiffusionMode mode = DiffusionMode::Discrete;
};

inline double default_eta(const SpectralBundle& s) { return s.lambda_max > 0 ? 0.5 / s.lambda_max : 0.5; }

inline RealVector harmonic_projection(const SpectralBundle& s, const RealVector& x) {
  RealVector out(x.size(), 0.0);
  for (std::size_t k = 0; k < s.harmonic_dim; ++k) {
    double c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) c += s.eigenvectors(i, k) * x[i];
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += c * s.eigenvectors(i, k);
  }
  return out;
}

inline DiffusionTrace heat_diffusion(const Laplacian& l, const RealVector& x0, const DiffusionConfig& cfg = {}) {
  const auto& a = l.matrix;
  if (x0.size() != a.rows())
    throw Error(ErrorCode::DimensionMismatch, "initial state has " + std::to_string(x0.size()) + " entries, expected " +
                                                  std::to_string(a.rows()));
  auto spec = eigendecompose(a);
  double eta = cfg.eta.value_or(default_eta(spec));
  if (!(eta > 0.0)) throw Error(ErrorCode::UnstableStepSize, "step size must be positive");
  if (cfg.mode == DiffusionMode::Discrete && spec.lambda_max > 0 && !(eta < 1.0 / spec.lambda_max))
    throw Error(ErrorCode::UnstableStepSize, "discrete diffusion needs eta < 1/lambda_max = " +
                                                 Field<double>{}.format(1.0 / spec.lambda_max));
  DiffusionTrace tr;
  tr.eta = eta;
  tr.mode = cfg.mode;
  tr.limit = harmonic_projection(spec, x0);
  auto record = [&](RealVector x) {
    tr.energies.push_back(dot(x, a.apply(x)));
    RealVector diff = x;
    for (std::size_t i = 0; i < x.size(); ++i) diff[i] -= tr.limit[i];
    tr.distances.push_back(norm2(diff));
    tr.states.push_back(std::move(x));
  };
  if (cfg.mode == DiffusionMode::Discrete) {
    RealVector x = x0;
    record(x);
    for (std::size_t k = 0; k < cfg.steps; ++k) {
      auto ax = a.apply(x);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= 2.0 * eta * ax[i];
      record(x);
    }
  } else {
    const std::size_t n = x0.size();
    RealVector coeff(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) coeff[k] += spec.eigenvectors(i, k) * x0[i];
    for (std::size_t step = 0; step <= cfg.steps; ++step) {
      double t = static_cast<double>(step);
      RealVector x(n, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        double lam = k < spec.harmonic_dim ? 0.0 : spec.eigenvalues[k];
        double c = coeff[k] * std::exp(-2.0 * eta * lam * t);
        for (std::size_t i = 0; i < n; ++i) x[i] += c * spec.eigenvectors(i, k);
      }
      record(std::move(x));
    }
  }
  return tr;
}

/// Predicted asymptotic contraction per step (discrete) or per unit time (continuous).
inline double predicted_rate(const DiffusionTrace& tr, const SpectralBundle& s) {
  if (tr.mode == DiffusionMode::Discrete) return std::abs(1.0 - 2.0 * tr.eta * s.lambda_min);
  return std::exp(-2.0 * tr.eta * s.lambda_min);
}

/// Geometric ratio fitted by least squares to log |x_k - x_inf| over the tail
/// half of the trace, ignoring distances already at rounding level.
inline double convergence_rate(const DiffusionTrace& tr, const SpectralBundle& /*spectrum*/) {
  if (tr.states.size() < 10) throw Error(ErrorCode::TraceTooShort, "need at least 10 states");
  double x0norm = norm2(tr.states.front());
  if (tr.distances.front() <= 1e-12 * std::max(1.0, x0norm))
    throw Error(ErrorCode::DegenerateInitialState, "initial state is already harmonic");
  double floor = 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, x0norm);
  std::size_t usable = 0;
  while (usable < tr.distances.size() && tr.distances[usable] > floor) ++usable;
  if (usable < 3) return 0.0;
  std::size_t start = usable / 2;
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = start; k < usable; ++k) {
    double xk = static_cast<double>(k), yk = std::log(tr.distances[k]);
    n += 1;
    sx += xk;
    sy += yk;
    sxx += xk * xk;
    sxy += xk * yk;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return std::exp(slope);
}

/// Central finite-difference gradient with step h_i = rel * (1 + |x_i|).
inline RealVector finite_difference_gradient(const std::function<double(const RealVector&)>& fn, RealVector x,
                                             double rel = 1e-6) {
  RealVector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double xi = x[i], h = rel * (1.0 + std::abs(xi));
    x[i] = xi + h;
    double up = fn(x);
    x[i] = xi - h;
    double down = fn(x);
    x[i] = xi;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace posheaf
