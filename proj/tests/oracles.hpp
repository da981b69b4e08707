// Brute-force reference implementations used by the unit and acceptance tests.
// They share no code with the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Full (|s|+1) x (|t|+1) DP matrix.
inline std::size_t levenshtein(const std::u32string& s, const std::u32string& t) {
  std::vector<std::vector<std::size_t>> d(s.size() + 1, std::vector<std::size_t>(t.size() + 1));
  for (std::size_t i = 0; i <= s.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= t.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const std::size_t sub = d[i - 1][j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
    }
  }
  return d[s.size()][t.size()];
}

inline std::string to_utf8(const std::u32string& s) {
  std::string out;
  for (char32_t c : s) {
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else if (c < 0x800) {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else if (c < 0x10000) {
      out += static_cast<char>(0xE0 | (c >> 12));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (c >> 18));
      out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return out;
}

// Random scalar value from a small alphabet mixing ASCII, Latin-1, CJK and
// astral code points, so collisions (and thus matches) are frequent.
inline char32_t random_scalar(std::mt19937_64& rng) {
  static const std::u32string alphabet = U"abcAB éñü中文Ж\U0001F600\U0001F44D";
  return alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
}

inline std::u32string random_string(std::mt19937_64& rng, std::size_t max_len) {
  std::u32string s(std::uniform_int_distribution<std::size_t>(0, max_len)(rng), U'a');
  for (auto& c : s) c = random_scalar(rng);
  return s;
}

// Dense weighted adjacency W[u][v] of a directed graph.
struct DenseGraph {
  std::size_t n = 0;
  Matrix w;
};

inline std::vector<std::size_t> triangles(const DenseGraph& g) {
  std::vector<std::size_t> t(g.n, 0);
  auto adj = [&](std::size_t a, std::size_t b) { return a != b && (g.w[a][b] > 0 || g.w[b][a] > 0); };
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = i + 1; j < g.n; ++j)
      for (std::size_t k = j + 1; k < g.n; ++k)
        if (adj(i, j) && adj(j, k) && adj(i, k)) {
          ++t[i];
          ++t[j];
          ++t[k];
        }
  return t;
}

inline std::vector<double> clustering(const DenseGraph& g) {
  const auto t = triangles(g);
  std::vector<double> c(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    std::size_t deg = 0;
    for (std::size_t j = 0; j < g.n; ++j) deg += (j != i && (g.w[i][j] > 0 || g.w[j][i] > 0)) ? 1 : 0;
    if (deg >= 2) c[i] = 2.0 * static_cast<double>(t[i]) / static_cast<double>(deg * (deg - 1));
  }
  return c;
}

inline double l1_change(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

inline void l2_normalize(std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v * v;
  s = std::sqrt(s);
  if (s > 0)
    for (double& v : x) v /= s;
}

// Damped PageRank with dangling mass spread uniformly, iterated to a far
// tighter tolerance than the library default.
inline std::vector<double> pagerank(const DenseGraph& g, double d = 0.85, std::size_t iters = 100000) {
  const double n = static_cast<double>(g.n);
  std::vector<double> out(g.n, 0.0);
  for (std::size_t u = 0; u < g.n; ++u)
    for (std::size_t v = 0; v < g.n; ++v) out[u] += g.w[u][v];
  std::vector<double> x(g.n, 1.0 / n), next(g.n);
  for (std::size_t it = 0; it < iters; ++it) {
    double dangling = 0;
    for (std::size_t u = 0; u < g.n; ++u)
      if (out[u] == 0) dangling += x[u];
    for (std::size_t v = 0; v < g.n; ++v) {
      double in = 0;
      for (std::size_t u = 0; u < g.n; ++u)
        if (g.w[u][v] > 0) in += x[u] * g.w[u][v] / out[u];
      next[v] = (1 - d) / n + d * (in + dangling / n);
    }
    const double ch = l1_change(x, next);
    x.swap(next);
    if (ch < 1e-15) break;
  }
  return x;
}

// Power iteration on I + W^T from the all-ones vector.
inline std::vector<double> eigenvector(const DenseGraph& g, std::size_t iters = 200000) {
  std::vector<double> x(g.n, 1.0 / std::sqrt(static_cast<double>(g.n))), next(g.n);
  for (std::size_t it = 0; it < iters; ++it) {
    for (std::size_t v = 0; v < g.n; ++v) {
      next[v] = x[v];
      for (std::size_t u = 0; u < g.n; ++u) next[v] += g.w[u][v] * x[u];
    }
    l2_normalize(next);
    const double ch = l1_change(x, next);
    x.swap(next);
    if (ch < 1e-15) break;
  }
  return x;
}

// Authority by power iteration on W^T W; hub = W a, both L2-normalized.
inline std::pair<std::vector<double>, std::vector<double>> hits(const DenseGraph& g, std::size_t iters = 200000) {
  Matrix m(g.n, std::vector<double>(g.n, 0.0));
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j)
      for (std::size_t k = 0; k < g.n; ++k) m[i][j] += g.w[k][i] * g.w[k][j];
  std::vector<double> hub0(g.n, 1.0);
  std::vector<double> a(g.n, 0.0), next(g.n);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t k = 0; k < g.n; ++k) a[i] += g.w[k][i] * hub0[k];
  l2_normalize(a);
  for (std::size_t it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < g.n; ++i) {
      next[i] = 0;
      for (std::size_t j = 0; j < g.n; ++j) next[i] += m[i][j] * a[j];
    }
    l2_normalize(next);
    const double ch = l1_change(a, next);
    a.swap(next);
    if (ch < 1e-15) break;
  }
  std::vector<double> h(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j) h[i] += g.w[i][j] * a[j];
  l2_normalize(h);
  return {h, a};
}

// Random digraph on n nodes. strongly_connected threads a random Hamiltonian
// cycle through all nodes before adding the extra edges.
inline DenseGraph random_graph(std::mt19937_64& rng, std::size_t n, double p, bool strongly_connected) {
  DenseGraph g{n, Matrix(n, std::vector<double>(n, 0.0))};
  std::uniform_int_distribution<int> weight(1, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (strongly_connected && n > 1) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < n; ++i) g.w[order[i]][order[(i + 1) % n]] = weight(rng);
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && g.w[a][b] == 0 && u(rng) < p) g.w[a][b] = weight(rng);
  return g;
}

// sup_x |F_a(x) - F_b(x)| evaluated at every sample point by direct counting.
inline double ks_d(const std::vector<double>& a, const std::vector<double>& b) {
  auto cdf = [](const std::vector<double>& s, double x) {
    std::size_t c = 0;
    for (double v : s) c += v <= x ? 1 : 0;
    return static_cast<double>(c) / static_cast<double>(s.size());
  };
  double d = 0;
  for (const auto* s : {&a, &b})
    for (double x : *s) d = std::max(d, std::fabs(cdf(a, x) - cdf(b, x)));
  return d;
}

inline double entropy(const std::vector<int>& labels) {
  double pos = 0;
  for (int l : labels) pos += l;
  const double n = static_cast<double>(labels.size());
  double h = 0;
  for (double c : {pos, n - pos})
    if (c > 0) h -= c / n * std::log2(c / n);
  return h;
}

}  // namespace oracle
