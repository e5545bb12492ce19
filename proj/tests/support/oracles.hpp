#pragma once

// Independent reference computations for the test suites. Nothing here calls
// the library's elimination, closure or chain-enumeration code.

#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "posheaf/field.hpp"

namespace oracle {

using posheaf::Rational;
using Dense = std::vector<std::vector<Rational>>;

/// Floyd-Warshall closure of a relation given by pairs.
inline std::vector<std::vector<bool>> closure(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (auto [a, b] : pairs) r[a][b] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  return r;
}

/// Rank by textbook fraction elimination.
inline std::size_t rank(Dense m) {
  std::size_t r = 0;
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (m[i][c] == 0) continue;
      Rational f = m[i][c] / m[r][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
  }
  return r;
}

/// All chains (as increasing index lists) of the strict order `lt` restricted to `subset`.
inline std::vector<std::vector<std::vector<std::size_t>>> chains(const std::vector<std::vector<bool>>& lt,
                                                                 const std::vector<std::size_t>& subset) {
  std::vector<std::vector<std::vector<std::size_t>>> by_len;
  std::vector<std::size_t> cur;
  std::function<void()> grow = [&] {
    if (by_len.size() < cur.size()) by_len.resize(cur.size());
    by_len[cur.size() - 1].push_back(cur);
    for (auto s : subset)
      if (lt[cur.back()][s]) {
        cur.push_back(s);
        grow();
        cur.pop_back();
      }
  };
  for (auto s : subset) {
    cur = {s};
    grow();
  }
  return by_len;
}

/// Reduced Betti numbers of the order complex of `subset`, indexed from degree -1.
inline std::vector<std::size_t> reduced_betti(const std::vector<std::vector<bool>>& lt, const std::vector<std::size_t>& subset) {
  auto ch = chains(lt, subset);
  // c[k+1] = number of k-simplices; c[0] = 1 for the empty simplex.
  std::vector<std::size_t> c{1};
  for (const auto& l : ch) c.push_back(l.size());
  std::vector<std::size_t> rk(c.size() + 1, 0);  // rk[k+1] = rank of boundary from k-simplices to (k-1)-simplices
  for (std::size_t k = 0; k < ch.size(); ++k) {
    const auto& hi = ch[k];
    Dense m;
    if (k == 0) {
      m.assign(1, std::vector<Rational>(hi.size(), Rational(1)));
    } else {
      const auto& lo = ch[k - 1];
      m.assign(lo.size(), std::vector<Rational>(hi.size(), Rational(0)));
      for (std::size_t j = 0; j < hi.size(); ++j)
        for (std::size_t i = 0; i <= k; ++i) {
          auto face = hi[j];
          face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
          for (std::size_t r = 0; r < lo.size(); ++r)
            if (lo[r] == face) m[r][j] = (i % 2 == 0) ? 1 : -1;
        }
    }
    rk[k + 1] = rank(m);
  }
  std::vector<std::size_t> b;
  for (std::size_t k = 0; k < c.size(); ++k) b.push_back(c[k] - rk[k] - rk[k + 1]);
  return b;
}

inline std::size_t components(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::size_t count = n;
  for (auto [a, b] : edges) {
    auto ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --count;
    }
  }
  return count;
}

}  // namespace oracle
