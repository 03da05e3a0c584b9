#pragma once

// Interaction hypergraphs, their incidence matrices, and block-model ground
// truth.
//
// Indices are 0-based throughout the C++ API. The text formats in io.hpp use
// 1-based node ids and class labels.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsbm {

using Index = std::int64_t;
using IntMatrix = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>;

/// Node count plus an ordered multiset of interactions. Each interaction is a
/// sorted set of node indices; storage is compressed by interaction.
class InteractionHypergraph
{
public:
  InteractionHypergraph() = default;

  /// Vertices within an interaction may come in any order; they are sorted.
  /// Throws std::invalid_argument on an empty interaction list, out-of-range
  /// vertices, or a vertex repeated within one interaction.
  InteractionHypergraph(Index n, const std::vector<std::vector<Index>>& interactions) : n_(n)
  {
    if (n < 1) throw std::invalid_argument("hypergraph needs at least one node");
    if (interactions.empty()) throw std::invalid_argument("hypergraph needs at least one interaction");
    offsets_.reserve(interactions.size() + 1);
    for (std::size_t p = 0; p < interactions.size(); ++p) {
      std::vector<Index> e = interactions[p];
      std::sort(e.begin(), e.end());
      for (std::size_t j = 0; j < e.size(); ++j) {
        if (e[j] < 0 || e[j] >= n)
          throw std::invalid_argument("interaction " + std::to_string(p) + ": vertex " +
                                      std::to_string(e[j]) + " outside [0, " + std::to_string(n) + ")");
        if (j > 0 && e[j] == e[j - 1])
          throw std::invalid_argument("interaction " + std::to_string(p) + ": vertex " +
                                      std::to_string(e[j]) + " repeated");
      }
      vertices_.insert(vertices_.end(), e.begin(), e.end());
      offsets_.push_back(static_cast<Index>(vertices_.size()));
    }
  }

  Index num_nodes() const { return n_; }
  Index num_interactions() const { return static_cast<Index>(offsets_.size()) - 1; }

  std::span<const Index> interaction(Index p) const
  {
    check_interaction(p);
    return {vertices_.data() + offsets_[p], static_cast<std::size_t>(offsets_[p + 1] - offsets_[p])};
  }

  Index interaction_size(Index p) const
  {
    check_interaction(p);
    return offsets_[p + 1] - offsets_[p];
  }

  Index max_interaction_size() const
  {
    Index k = 0;
    for (Index p = 0; p < num_interactions(); ++p) k = std::max(k, offsets_[p + 1] - offsets_[p]);
    return k;
  }

  double mean_interaction_size() const
  {
    return static_cast<double>(vertices_.size()) / static_cast<double>(num_interactions());
  }

  /// Number of interactions containing v.
  Index node_degree(Index v) const
  {
    if (v < 0 || v >= n_) throw std::out_of_range("node index " + std::to_string(v) + " out of range");
    return static_cast<Index>(std::count(vertices_.begin(), vertices_.end(), v));
  }

  /// Number of other interactions q != p that share a vertex with p.
  Index interaction_degree(Index p) const
  {
    auto ep = interaction(p);
    Index count = 0;
    for (Index q = 0; q < num_interactions(); ++q) {
      if (q == p) continue;
      auto eq = interaction(q);
      auto a = ep.begin();
      auto b = eq.begin();
      while (a != ep.end() && b != eq.end()) {
        if (*a < *b) ++a;
        else if (*b < *a) ++b;
        else {
          ++count;
          break;
        }
      }
    }
    return count;
  }

  std::span<const Index> offsets() const { return offsets_; }
  std::span<const Index> vertices() const { return vertices_; }

  friend bool operator==(const InteractionHypergraph&, const InteractionHypergraph&) = default;

private:
  void check_interaction(Index p) const
  {
    if (p < 0 || p >= num_interactions())
      throw std::out_of_range("interaction index " + std::to_string(p) + " out of range");
  }

  Index n_ = 0;
  std::vector<Index> offsets_{0};
  std::vector<Index> vertices_;
};

/// Sparse binary n x m matrix stored by column: column p lists the rows with a
/// one, ascending.
class IncidenceMatrix
{
public:
  IncidenceMatrix() = default;
  explicit IncidenceMatrix(const InteractionHypergraph& h)
      : n_(h.num_nodes()), offsets_(h.offsets().begin(), h.offsets().end()),
        rows_(h.vertices().begin(), h.vertices().end())
  {
  }

  Index rows() const { return n_; }
  Index cols() const { return static_cast<Index>(offsets_.size()) - 1; }
  Index nonzeros() const { return static_cast<Index>(rows_.size()); }

  std::span<const Index> column(Index p) const
  {
    return {rows_.data() + offsets_[p], static_cast<std::size_t>(offsets_[p + 1] - offsets_[p])};
  }

  bool operator()(Index i, Index p) const
  {
    auto c = column(p);
    return std::binary_search(c.begin(), c.end(), i);
  }

  Eigen::MatrixXd to_dense() const
  {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n_, cols());
    for (Index p = 0; p < cols(); ++p)
      for (Index i : column(p)) r(i, p) = 1.0;
    return r;
  }

  /// Left product A^T R for a dense n x k matrix A, giving k x m.
  Eigen::MatrixXd left_multiply_transpose(const Eigen::MatrixXd& a) const
  {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.cols(), cols());
    for (Index p = 0; p < cols(); ++p)
      for (Index i : column(p)) out.col(p) += a.row(i).transpose();
    return out;
  }

private:
  Index n_ = 0;
  std::vector<Index> offsets_{0};
  std::vector<Index> rows_;
};

inline IncidenceMatrix incidence_matrix(const InteractionHypergraph& h) { return IncidenceMatrix(h); }

/// Classes of the nodes and the per-interaction class counts.
///
/// type_matrix is d x m with entry (r, p) the number of class-r nodes in
/// interaction p; basic_type_matrix is its 0/1 support.
class BlockModelSpec
{
public:
  BlockModelSpec() = default;

  /// `labels` holds a class in [0, d) per node. Throws std::invalid_argument
  /// when a class is empty, a column has no members, or a count exceeds its
  /// class size.
  BlockModelSpec(Index d, std::vector<Index> labels, IntMatrix type_matrix)
      : d_(d), labels_(std::move(labels)), types_(std::move(type_matrix))
  {
    if (d < 1) throw std::invalid_argument("need at least one class");
    if (labels_.empty()) throw std::invalid_argument("need at least one node");
    sizes_.assign(d, 0);
    for (Index z : labels_) {
      if (z < 0 || z >= d) throw std::invalid_argument("class label " + std::to_string(z) + " out of range");
      ++sizes_[z];
    }
    for (Index r = 0; r < d; ++r)
      if (sizes_[r] < 1) throw std::invalid_argument("class " + std::to_string(r) + " is empty");
    if (types_.rows() != d) throw std::invalid_argument("type matrix must have d rows");
    if (types_.cols() < 1) throw std::invalid_argument("type matrix needs at least one column");
    for (Index p = 0; p < types_.cols(); ++p) {
      Index k = 0;
      for (Index r = 0; r < d; ++r) {
        const Index t = types_(r, p);
        if (t < 0 || t > sizes_[r])
          throw std::invalid_argument("type count " + std::to_string(t) + " for class " + std::to_string(r) +
                                      " in column " + std::to_string(p) + " outside [0, n_r]");
        k += t;
      }
      if (k < 1) throw std::invalid_argument("column " + std::to_string(p) + " has no members");
    }
    members_.assign(d, {});
    for (Index i = 0; i < static_cast<Index>(labels_.size()); ++i) members_[labels_[i]].push_back(i);
  }

  Index num_classes() const { return d_; }
  Index num_nodes() const { return static_cast<Index>(labels_.size()); }
  Index num_interactions() const { return types_.cols(); }

  const std::vector<Index>& labels() const { return labels_; }
  const std::vector<Index>& class_sizes() const { return sizes_; }
  /// Node indices of class r, ascending.
  const std::vector<Index>& members(Index r) const { return members_[r]; }

  const IntMatrix& type_matrix() const { return types_; }
  IntMatrix basic_type_matrix() const { return (types_.array() > 0).cast<Index>(); }

  Index interaction_size(Index p) const { return types_.col(p).sum(); }
  Index max_interaction_size() const { return types_.colwise().sum().maxCoeff(); }
  double mean_interaction_size() const
  {
    return static_cast<double>(types_.sum()) / static_cast<double>(types_.cols());
  }

  /// min_r n_r / n, the default balance constant.
  double balance() const
  {
    return static_cast<double>(*std::min_element(sizes_.begin(), sizes_.end())) /
           static_cast<double>(num_nodes());
  }

  /// n x d class indicator matrix.
  Eigen::MatrixXd indicator() const
  {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(num_nodes(), d_);
    for (Index i = 0; i < num_nodes(); ++i) z(i, labels_[i]) = 1.0;
    return z;
  }

  /// diag(1 / n_r) as a vector.
  Eigen::VectorXd inverse_sizes() const
  {
    Eigen::VectorXd b(d_);
    for (Index r = 0; r < d_; ++r) b(r) = 1.0 / static_cast<double>(sizes_[r]);
    return b;
  }

  /// Column p of the mean matrix: entry i is tau_{z_i p} / n_{z_i}.
  Eigen::VectorXd mean_column(Index p) const
  {
    Eigen::VectorXd g(num_nodes());
    for (Index i = 0; i < num_nodes(); ++i)
      g(i) = static_cast<double>(types_(labels_[i], p)) / static_cast<double>(sizes_[labels_[i]]);
    return g;
  }

private:
  Index d_ = 0;
  std::vector<Index> labels_;
  std::vector<Index> sizes_;
  std::vector<std::vector<Index>> members_;
  IntMatrix types_;
};

/// Class counts of every interaction of h under labels z (d x m).
inline IntMatrix type_matrix(const InteractionHypergraph& h, const std::vector<Index>& labels, Index d)
{
  if (static_cast<Index>(labels.size()) != h.num_nodes())
    throw std::invalid_argument("need one class label per node");
  IntMatrix t = IntMatrix::Zero(d, h.num_interactions());
  for (Index p = 0; p < h.num_interactions(); ++p)
    for (Index v : h.interaction(p)) {
      const Index r = labels[v];
      if (r < 0 || r >= d) throw std::invalid_argument("class label out of range");
      ++t(r, p);
    }
  return t;
}

/// Block-model ground truth for an observed hypergraph.
inline BlockModelSpec block_model(const InteractionHypergraph& h, const std::vector<Index>& labels, Index d)
{
  return {d, labels, type_matrix(h, labels, d)};
}

/// Dense mean matrix Gamma = Z B T (n x m). Prefer BlockModelSpec::mean_column
/// when only a few columns are needed.
inline Eigen::MatrixXd mean_matrix(const BlockModelSpec& spec)
{
  const Eigen::VectorXd b = spec.inverse_sizes();
  const Eigen::MatrixXd scaled = b.asDiagonal() * spec.type_matrix().cast<double>();
  Eigen::MatrixXd gamma(spec.num_nodes(), spec.num_interactions());
  for (Index i = 0; i < spec.num_nodes(); ++i) gamma.row(i) = scaled.row(spec.labels()[i]);
  return gamma;
}

/// Ids 0..K-1 for the distinct columns of the type matrix, in order of first
/// appearance.
inline std::vector<Index> type_ids(const IntMatrix& types)
{
  std::vector<Index> ids(types.cols());
  std::map<std::vector<Index>, Index> seen;
  for (Index p = 0; p < types.cols(); ++p) {
    std::vector<Index> key(types.col(p).data(), types.col(p).data() + types.rows());
    auto [it, inserted] = seen.try_emplace(std::move(key), static_cast<Index>(seen.size()));
    ids[p] = it->second;
  }
  return ids;
}

} // namespace hsbm
