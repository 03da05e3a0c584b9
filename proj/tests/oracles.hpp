#pragma once

// Slow, obviously-correct reference implementations used by the unit tests
// and the acceptance runner. Nothing here calls into the code it checks.

#include <hsbm/clustering.hpp>
#include <hsbm/hypergraph.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using hsbm::Index;

/// Complete linkage recomputing every cluster distance at every step.
inline std::vector<hsbm::Merge> naive_complete_linkage(const Eigen::MatrixXd& x)
{
  std::vector<std::vector<Index>> clusters;
  for (Index i = 0; i < x.rows(); ++i) clusters.push_back({i});
  std::vector<hsbm::Merge> out;
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0;
    // clusters stay sorted by smallest member, so scanning (i, j) in order
    // and keeping only strict improvements gives the lexicographic tie rule
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double d = 0.0;
        for (Index p : clusters[i])
          for (Index q : clusters[j]) d = std::max(d, (x.row(p) - x.row(q)).norm());
        if (d < best) {
          best = d;
          ba = i;
          bb = j;
        }
      }
    out.push_back({clusters[ba].front(), clusters[bb].front(), best});
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    std::sort(clusters[ba].begin(), clusters[ba].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
  }
  return out;
}

/// Hubert-Arabie ARI straight from the contingency table.
inline double contingency_ari(const std::vector<Index>& a, const std::vector<Index>& b)
{
  std::map<Index, std::size_t> ra, rb;
  for (Index v : a) ra.try_emplace(v, ra.size());
  for (Index v : b) rb.try_emplace(v, rb.size());
  std::vector<std::vector<double>> table(ra.size(), std::vector<double>(rb.size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) table[ra[a[i]]][rb[b[i]]] += 1.0;
  auto c2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_ij = 0, sum_a = 0, sum_b = 0;
  std::vector<double> col(rb.size(), 0.0);
  for (const auto& row : table) {
    double r = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      sum_ij += c2(row[j]);
      r += row[j];
      col[j] += row[j];
    }
    sum_a += c2(r);
  }
  for (double c : col) sum_b += c2(c);
  const double total = c2(static_cast<double>(a.size()));
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (sum_ij - expected) / (max_index - expected);
}

/// ARI from the four pair counts, enumerating every pair.
inline double pair_counting_ari(const std::vector<Index>& a, const std::vector<Index>& b)
{
  double both = 0, only_a = 0, only_b = 0, neither = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      if (sa && sb) both += 1;
      else if (sa) only_a += 1;
      else if (sb) only_b += 1;
      else neither += 1;
    }
  const double den = (both + only_a) * (only_a + neither) + (both + only_b) * (only_b + neither);
  if (den == 0.0) return 1.0;
  return 2.0 * (both * neither - only_a * only_b) / den;
}

/// E[R R^T] with its diagonal removed, entry by entry from the membership
/// probabilities of the sampling scheme.
inline Eigen::MatrixXd expected_hollow_gram(const hsbm::BlockModelSpec& spec)
{
  const Index n = spec.num_nodes();
  const auto& z = spec.labels();
  const auto& sizes = spec.class_sizes();
  const auto& t = spec.type_matrix();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const Index r = z[i], s = z[j];
      double sum = 0.0;
      for (Index p = 0; p < t.cols(); ++p) {
        const double tr = static_cast<double>(t(r, p));
        const double ts = static_cast<double>(t(s, p));
        if (r == s) sum += tr * (tr - 1.0) / (static_cast<double>(sizes[r]) * (sizes[r] - 1.0));
        else sum += tr * ts / (static_cast<double>(sizes[r]) * sizes[s]);
      }
      g(i, j) = sum;
    }
  return g;
}

/// Probability of each unordered pair under sequential weighted sampling of
/// two items, by summing over both orders.
inline std::map<std::pair<Index, Index>, double> weighted_pair_law(const std::vector<double>& w)
{
  double total = 0;
  for (double x : w) total += x;
  std::map<std::pair<Index, Index>, double> law;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (i == j) continue;
      const double p = w[i] / total * w[j] / (total - w[i]);
      law[{static_cast<Index>(std::min(i, j)), static_cast<Index>(std::max(i, j))}] += p;
    }
  return law;
}

/// Random block model: every class has at least two nodes, every column at
/// least one member, and tau never exceeds the class size.
inline hsbm::BlockModelSpec random_spec(std::mt19937_64& gen, Index max_n, Index max_d, Index max_m)
{
  std::uniform_int_distribution<Index> pick_d(1, max_d);
  const Index d = pick_d(gen);
  std::uniform_int_distribution<Index> pick_n(2 * d, max_n);
  const Index n = pick_n(gen);
  std::vector<Index> labels(n);
  for (Index i = 0; i < n; ++i) labels[i] = i < 2 * d ? i / 2 : std::uniform_int_distribution<Index>(0, d - 1)(gen);
  std::shuffle(labels.begin(), labels.end(), gen);
  std::vector<Index> sizes(d, 0);
  for (Index z : labels) ++sizes[z];
  const Index m = std::uniform_int_distribution<Index>(1, max_m)(gen);
  hsbm::IntMatrix t = hsbm::IntMatrix::Zero(d, m);
  for (Index p = 0; p < m; ++p) {
    do {
      for (Index r = 0; r < d; ++r) t(r, p) = std::uniform_int_distribution<Index>(0, sizes[r])(gen);
    } while (t.col(p).sum() == 0);
  }
  return {d, labels, t};
}

inline Eigen::MatrixXd random_orthogonal(std::mt19937_64& gen, Index k)
{
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) a(i, j) = g(gen);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  return q;
}

} // namespace oracle
