#pragma once

// Complete-linkage agglomerative clustering, dendrogram cuts, and the
// adjusted Rand index.

#include "hypergraph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsbm {

/// One agglomeration step. Clusters are named by their smallest member, so
/// `a < b` and the merged cluster keeps the name `a`.
struct Merge
{
  Index a = 0;
  Index b = 0;
  double height = 0.0;

  friend bool operator==(const Merge&, const Merge&) = default;
};

struct Dendrogram
{
  Index leaves = 0;
  std::vector<Merge> merges;
};

/// Flat clustering with labels 1..k in order of first appearance.
struct Partition
{
  std::vector<Index> labels;
  Index k = 0;
};

inline double row_distance(const Eigen::MatrixXd& points, Index p, Index q)
{
  return (points.row(p) - points.row(q)).norm();
}

namespace detail {

class CondensedMatrix
{
public:
  explicit CondensedMatrix(Index n) : n_(n), data_(static_cast<std::size_t>(n * (n - 1) / 2)) {}

  double& operator()(Index i, Index j)
  {
    if (i > j) std::swap(i, j);
    return data_[offset(i, j)];
  }

private:
  std::size_t offset(Index i, Index j) const
  {
    return static_cast<std::size_t>(i * (2 * n_ - i - 1) / 2 + (j - i - 1));
  }

  Index n_;
  std::vector<double> data_;
};

} // namespace detail

/// Complete-linkage clustering of the rows of `points`.
///
/// Each step merges the pair of live clusters with the smallest maximum
/// pairwise distance; among equal distances the pair with the
/// lexicographically smallest (min member of A, min member of B) wins.
/// Rows with bitwise-identical coordinates are merged first at height 0, which
/// is exactly what the greedy rule does, so the O(m^2) distance table only
/// spans distinct rows.
inline Dendrogram complete_linkage(const Eigen::MatrixXd& points)
{
  const Index m = points.rows();
  if (m < 1) throw std::invalid_argument("complete_linkage needs at least one point");
  if (!points.allFinite()) throw std::invalid_argument("complete_linkage: non-finite coordinates");

  Dendrogram dend;
  dend.leaves = m;
  dend.merges.reserve(static_cast<std::size_t>(m - 1));

  std::vector<Index> order(m);
  std::iota(order.begin(), order.end(), 0);
  auto row_less = [&](Index p, Index q) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      if (points(p, c) < points(q, c)) return true;
      if (points(q, c) < points(p, c)) return false;
    }
    return p < q;
  };
  auto row_equal = [&](Index p, Index q) { return (points.row(p).array() == points.row(q).array()).all(); };
  std::sort(order.begin(), order.end(), row_less);

  // Runs of identical rows; each run is ascending by index.
  std::vector<std::vector<Index>> groups;
  for (Index i = 0; i < m; ++i) {
    if (i == 0 || !row_equal(order[i - 1], order[i])) groups.emplace_back();
    groups.back().push_back(order[i]);
  }
  std::sort(groups.begin(), groups.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
  for (const auto& g : groups)
    for (std::size_t j = 1; j < g.size(); ++j) dend.merges.push_back({g.front(), g[j], 0.0});

  const auto u = static_cast<Index>(groups.size());
  std::vector<Index> rep(u);
  for (Index i = 0; i < u; ++i) rep[i] = groups[i].front();

  detail::CondensedMatrix dist(u);
  for (Index i = 0; i < u; ++i)
    for (Index j = i + 1; j < u; ++j) dist(i, j) = row_distance(points, rep[i], rep[j]);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<char> live(u, 1);
  std::vector<Index> nn(u, -1);
  std::vector<double> nnd(u, kInf);
  auto refresh = [&](Index i) {
    nn[i] = -1;
    nnd[i] = kInf;
    for (Index j = i + 1; j < u; ++j)
      if (live[j] && dist(i, j) < nnd[i]) {
        nnd[i] = dist(i, j);
        nn[i] = j;
      }
  };
  for (Index i = 0; i < u; ++i) refresh(i);

  for (Index step = 0; step + 1 < u; ++step) {
    Index a = -1;
    for (Index i = 0; i < u; ++i)
      if (live[i] && nn[i] >= 0 && (a < 0 || nnd[i] < nnd[a])) a = i;
    const Index b = nn[a];
    dend.merges.push_back({rep[a], rep[b], nnd[a]});
    live[b] = 0;
    for (Index x = 0; x < u; ++x)
      if (live[x] && x != a) dist(a, x) = std::max(dist(a, x), dist(b, x));
    refresh(a);
    for (Index i = 0; i < a; ++i)
      if (live[i] && (nn[i] == a || nn[i] == b)) refresh(i);
    for (Index i = a + 1; i < b; ++i)
      if (live[i] && nn[i] == b) refresh(i);
  }
  return dend;
}

namespace detail {

inline Index find_root(std::vector<Index>& parent, Index x)
{
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

} // namespace detail

/// State after the first m - k merges.
inline Partition cut_at_k(const Dendrogram& dend, Index k)
{
  const Index m = dend.leaves;
  if (k < 1 || k > m) throw std::out_of_range("cut_at_k: k = " + std::to_string(k) + " outside [1, " +
                                              std::to_string(m) + "]");
  std::vector<Index> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  for (Index s = 0; s < m - k; ++s) {
    const Index ra = detail::find_root(parent, dend.merges[s].a);
    const Index rb = detail::find_root(parent, dend.merges[s].b);
    parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  Partition part;
  part.labels.resize(m);
  std::vector<Index> label_of_root(m, 0);
  for (Index i = 0; i < m; ++i) {
    const Index r = detail::find_root(parent, i);
    if (label_of_root[r] == 0) label_of_root[r] = ++part.k;
    part.labels[i] = label_of_root[r];
  }
  return part;
}

/// Number of clusters just before the largest relative jump in linkage height.
///
/// Candidate k in [2, min(k_max, m - 1)] scores height(merge m-k+1) /
/// height(merge m-k), the jump paid by going from k to k - 1 clusters. A
/// denominator below 1e-12 with a numerator above it is an unbounded ratio;
/// such candidates outrank every finite ratio and are ordered among
/// themselves by the additive gap. When no height rises above 1e-12 the
/// answer is 1. Ties go to the smaller k.
inline Index choose_k_by_gap(const Dendrogram& dend, Index k_max)
{
  constexpr double kFloor = 1e-12;
  const Index m = dend.leaves;
  const Index upper = std::min(k_max, m - 1);
  Index best_k = 1;
  bool best_unbounded = false;
  double best_score = -1.0;
  for (Index k = 2; k <= upper; ++k) {
    // 1-based merge number m-k+1 is merges[m-k].
    const double num = dend.merges[m - k].height;
    const double den = dend.merges[m - k - 1].height;
    if (num < kFloor) continue;
    const bool unbounded = den < kFloor;
    const double score = unbounded ? num - den : num / den;
    const bool better = (unbounded && !best_unbounded) || (unbounded == best_unbounded && score > best_score);
    if (better) {
      best_k = k;
      best_unbounded = unbounded;
      best_score = score;
    }
  }
  return best_k;
}

/// Hubert-Arabie adjusted Rand index from the contingency table. Labels are
/// arbitrary integers. Identical trivial partitions (all singletons, or one
/// block) score 1.
inline double adjusted_rand_index(std::span<const Index> a, std::span<const Index> b)
{
  if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand_index: partitions differ in length");
  const auto n = static_cast<std::int64_t>(a.size());
  std::map<std::pair<Index, Index>, std::int64_t> cells;
  std::map<Index, std::int64_t> rows;
  std::map<Index, std::int64_t> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++cells[{a[i], b[i]}];
    ++rows[a[i]];
    ++cols[b[i]];
  }
  auto pairs = [](std::int64_t x) { return static_cast<long double>(x) * static_cast<long double>(x - 1) / 2.0L; };
  long double index = 0, sum_a = 0, sum_b = 0;
  for (const auto& [key, c] : cells) index += pairs(c);
  for (const auto& [key, c] : rows) sum_a += pairs(c);
  for (const auto& [key, c] : cols) sum_b += pairs(c);
  const long double total = pairs(n);
  if (total == 0) return 1.0;
  const long double expected = sum_a * sum_b / total;
  const long double maximum = (sum_a + sum_b) / 2.0L;
  if (maximum == expected) return 1.0;
  return static_cast<double>((index - expected) / (maximum - expected));
}

inline double adjusted_rand_index(const Partition& a, const Partition& b)
{
  return adjusted_rand_index(std::span<const Index>(a.labels), std::span<const Index>(b.labels));
}

/// Relabels arbitrary ids to 1..k in order of first appearance.
inline Partition make_partition(std::span<const Index> ids)
{
  Partition part;
  std::map<Index, Index> relabel;
  part.labels.reserve(ids.size());
  for (Index id : ids) {
    auto [it, inserted] = relabel.try_emplace(id, static_cast<Index>(relabel.size()) + 1);
    part.labels.push_back(it->second);
  }
  part.k = static_cast<Index>(relabel.size());
  return part;
}

} // namespace hsbm
