#pragma once

// Spectral embedding of interactions.
//
// The pipeline works on the hollowed Gram matrix H(RR^T) = RR^T - diag(RR^T).
// Its expectation under a Hyper-SBM splits into a rank-d signal part living in
// range(Z) and a bulk part with eigenvalue -mu_r of multiplicity n_r - 1 for
// every class. Selecting the d signal eigenvectors U_hat and taking the SVD
// U_hat^T R = X_hat S_hat V_hat^T gives the interaction positions V_hat S_hat.

#include "error.hpp"
#include "hypergraph.hpp"
#include "linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsbm {

struct HollowedGram
{
  Eigen::MatrixXd matrix;
};

/// Accumulated one interaction at a time: column p adds a clique on e_p.
inline HollowedGram hollowed_gram(const IncidenceMatrix& r)
{
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(r.rows(), r.rows());
  for (Index p = 0; p < r.cols(); ++p) {
    auto col = r.column(p);
    for (std::size_t a = 0; a < col.size(); ++a)
      for (std::size_t b = a + 1; b < col.size(); ++b) {
        g(col[a], col[b]) += 1.0;
        g(col[b], col[a]) += 1.0;
      }
  }
  return {std::move(g)};
}

/// Dense variant, used for real-valued inputs such as the mean matrix itself.
inline HollowedGram hollowed_gram(const Eigen::MatrixXd& r)
{
  Eigen::MatrixXd g = r * r.transpose();
  g.diagonal().setZero();
  return {std::move(g)};
}

/// Closed-form spectrum of H(E[RR^T]).
struct ExpectedGramStructure
{
  /// Sigma_T = T T^T - diag(T 1), d x d.
  Eigen::MatrixXd sigma_t;
  /// Eigenvalues of sqrt(B) Sigma_T sqrt(B), descending.
  Eigen::VectorXd signal_eigenvalues;
  /// n x d orthonormal eigenvectors for the signal eigenvalues, in range(Z).
  Eigen::MatrixXd signal_basis;
  /// mu_r = sum_p tau_rp (tau_rp - 1) / (n_r (n_r - 1)); zero when n_r = 1.
  Eigen::VectorXd bulk_values;
  /// n_r - 1 per class; -mu_r is an eigenvalue with this multiplicity.
  std::vector<Index> bulk_multiplicities;

  /// All n eigenvalues of H(E[RR^T]), descending.
  Eigen::VectorXd spectrum() const
  {
    std::vector<double> all(signal_eigenvalues.data(), signal_eigenvalues.data() + signal_eigenvalues.size());
    for (Eigen::Index r = 0; r < bulk_values.size(); ++r)
      all.insert(all.end(), static_cast<std::size_t>(bulk_multiplicities[r]), -bulk_values(r));
    std::sort(all.begin(), all.end(), std::greater<>());
    return Eigen::Map<Eigen::VectorXd>(all.data(), static_cast<Eigen::Index>(all.size()));
  }
};

inline ExpectedGramStructure expected_gram_structure(const BlockModelSpec& spec)
{
  const Index d = spec.num_classes();
  const Eigen::MatrixXd t = spec.type_matrix().cast<double>();
  ExpectedGramStructure out;
  out.sigma_t = t * t.transpose();
  out.sigma_t.diagonal() -= t.rowwise().sum();

  const Eigen::VectorXd sqrt_b = spec.inverse_sizes().cwiseSqrt();
  const Eigen::MatrixXd core = sqrt_b.asDiagonal() * out.sigma_t * sqrt_b.asDiagonal();
  const SymmetricEigen eig = symmetric_eigen(core);
  out.signal_eigenvalues = eig.values;
  out.signal_basis = spec.indicator() * sqrt_b.asDiagonal() * eig.vectors;
  fix_column_signs(out.signal_basis);

  out.bulk_values.resize(d);
  out.bulk_multiplicities.resize(d);
  for (Index r = 0; r < d; ++r) {
    const double nr = static_cast<double>(spec.class_sizes()[r]);
    double acc = 0.0;
    for (Index p = 0; p < spec.num_interactions(); ++p) {
      const double tau = t(r, p);
      acc += tau * (tau - 1.0);
    }
    out.bulk_values(r) = nr > 1.0 ? acc / (nr * (nr - 1.0)) : 0.0;
    out.bulk_multiplicities[r] = spec.class_sizes()[r] - 1;
  }
  return out;
}

/// H(E[RR^T]) assembled from the block formula
/// Z B Sigma_T B Z^T - sum_r mu_r (I - J / n_r) on each class block.
inline Eigen::MatrixXd expected_gram_matrix(const BlockModelSpec& spec, const ExpectedGramStructure& s)
{
  const Eigen::MatrixXd z = spec.indicator();
  const Eigen::VectorXd b = spec.inverse_sizes();
  Eigen::MatrixXd h = z * b.asDiagonal() * s.sigma_t * b.asDiagonal() * z.transpose();
  for (Index i = 0; i < spec.num_nodes(); ++i)
    for (Index j = 0; j < spec.num_nodes(); ++j) {
      const Index r = spec.labels()[i];
      if (spec.labels()[j] != r) continue;
      const double nr = static_cast<double>(spec.class_sizes()[r]);
      h(i, j) -= s.bulk_values(r) * ((i == j ? 1.0 : 0.0) - 1.0 / nr);
    }
  return h;
}

/// H(E[RR^T]) entry by entry: 0 on the diagonal, mu_r inside class r, and
/// sum_p tau_rp tau_sp / (n_r n_s) across classes r != s.
inline Eigen::MatrixXd expected_gram_entrywise(const BlockModelSpec& spec)
{
  const Index d = spec.num_classes();
  const Eigen::MatrixXd t = spec.type_matrix().cast<double>();
  Eigen::MatrixXd block(d, d);
  for (Index r = 0; r < d; ++r)
    for (Index s = 0; s < d; ++s) {
      const double nr = static_cast<double>(spec.class_sizes()[r]);
      const double ns = static_cast<double>(spec.class_sizes()[s]);
      double acc = 0.0;
      if (r == s) {
        for (Index p = 0; p < spec.num_interactions(); ++p) acc += t(r, p) * (t(r, p) - 1.0);
        block(r, r) = nr > 1.0 ? acc / (nr * (nr - 1.0)) : 0.0;
      } else {
        for (Index p = 0; p < spec.num_interactions(); ++p) acc += t(r, p) * t(s, p);
        block(r, s) = acc / (nr * ns);
      }
    }
  const Index n = spec.num_nodes();
  Eigen::MatrixXd h(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) h(i, j) = i == j ? 0.0 : block(spec.labels()[i], spec.labels()[j]);
  return h;
}

struct ExpectedGram
{
  Eigen::MatrixXd matrix;
  ExpectedGramStructure structure;
};

inline ExpectedGram expected_gram(const BlockModelSpec& spec)
{
  ExpectedGramStructure s = expected_gram_structure(spec);
  Eigen::MatrixXd m = expected_gram_matrix(spec, s);
  return {std::move(m), std::move(s)};
}

/// Signal strength Delta and the perturbation radius
/// b = 7 sqrt(m log(m) k_max k_bar / c_tilde).
struct SignalGap
{
  double delta = 0.0;
  double b = 0.0;
  Index k_max = 0;
  double k_bar = 0.0;
  double c_tilde = 0.0;

  /// Delta >= 3b.
  bool strong() const { return delta >= 3.0 * b; }
};

inline double perturbation_radius(Index m, Index k_max, double k_bar, double c_tilde)
{
  const double md = static_cast<double>(m);
  return 7.0 * std::sqrt(md * std::log(md) * static_cast<double>(k_max) * k_bar / c_tilde);
}

/// `c_tilde` must lie in (0, min_r n_r / n]; pass a nonpositive value for the
/// default min_r n_r / n.
inline SignalGap signal_gap(const BlockModelSpec& spec, const ExpectedGramStructure& s, double c_tilde = 0.0)
{
  const double balance = spec.balance();
  if (c_tilde <= 0.0) c_tilde = balance;
  if (c_tilde > balance * (1.0 + 1e-12))
    throw std::invalid_argument("c_tilde " + std::to_string(c_tilde) + " exceeds min_r n_r / n = " +
                                std::to_string(balance));
  SignalGap g;
  g.c_tilde = c_tilde;
  g.k_max = spec.max_interaction_size();
  g.k_bar = spec.mean_interaction_size();
  g.b = perturbation_radius(spec.num_interactions(), g.k_max, g.k_bar, c_tilde);
  g.delta = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < s.signal_eigenvalues.size(); ++r)
    for (Eigen::Index q = 0; q < s.bulk_values.size(); ++q)
      g.delta = std::min(g.delta, std::abs(s.signal_eigenvalues(r) + s.bulk_values(q)));
  return g;
}

inline SignalGap signal_gap(const BlockModelSpec& spec, double c_tilde = 0.0)
{
  return signal_gap(spec, expected_gram_structure(spec), c_tilde);
}

/// How the d signal eigenvalues of H(RR^T) are told apart from the bulk.
///
/// kOracle keeps the eigenvalues outside every interval [-mu_r - b, -mu_r + b]
/// and fails unless exactly d remain. kMatched sorts both spectra and keeps
/// the positions that the signal eigenvalues occupy in the known expected
/// spectrum. kEmpirical needs no model: it keeps the d eigenvalues with the
/// largest distance to their nearest neighbour in the sorted spectrum (ties to
/// larger magnitude), since bulk values come in tight clusters.
struct SelectionMode
{
  enum class Kind { kOracle, kMatched, kEmpirical };

  Kind kind = Kind::kEmpirical;
  Eigen::VectorXd bulk_values;
  double radius = 0.0;
  Eigen::VectorXd expected_spectrum;
  Eigen::VectorXd expected_signal;

  static SelectionMode oracle(Eigen::VectorXd mu, double b)
  {
    SelectionMode m;
    m.kind = Kind::kOracle;
    m.bulk_values = std::move(mu);
    m.radius = b;
    return m;
  }
  static SelectionMode matched(const ExpectedGramStructure& s)
  {
    SelectionMode m;
    m.kind = Kind::kMatched;
    m.expected_spectrum = s.spectrum();
    m.expected_signal = s.signal_eigenvalues;
    return m;
  }
  static SelectionMode empirical() { return {}; }
};

inline const char* to_string(SelectionMode::Kind k)
{
  switch (k) {
  case SelectionMode::Kind::kOracle: return "oracle";
  case SelectionMode::Kind::kMatched: return "matched";
  default: return "empirical";
  }
}

struct SignalSelection
{
  Eigen::MatrixXd u_hat;
  Eigen::VectorXd lambda_hat;
  /// Positions of the selected eigenvalues in `spectrum`.
  std::vector<Index> indices;
  /// Every eigenvalue of the hollowed Gram matrix, descending.
  Eigen::VectorXd spectrum;
  /// Distance of each eigenvalue to its nearest neighbour (empirical mode).
  Eigen::VectorXd neighbour_gaps;
};

namespace detail {

inline Eigen::VectorXd neighbour_gaps(const Eigen::VectorXd& sorted_desc)
{
  const Eigen::Index n = sorted_desc.size();
  Eigen::VectorXd gaps = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) gaps(i) = std::min(gaps(i), sorted_desc(i - 1) - sorted_desc(i));
    if (i + 1 < n) gaps(i) = std::min(gaps(i), sorted_desc(i) - sorted_desc(i + 1));
  }
  return gaps;
}

} // namespace detail

inline SignalSelection select_signal_eigenpairs(const HollowedGram& g, Index d, const SelectionMode& mode)
{
  const Index n = g.matrix.rows();
  if (d < 1 || d > n) throw std::invalid_argument("need 1 <= d <= n for eigenpair selection");
  const SymmetricEigen eig = symmetric_eigen(g.matrix);
  SignalSelection sel;
  sel.spectrum = eig.values;
  sel.neighbour_gaps = detail::neighbour_gaps(eig.values);

  switch (mode.kind) {
  case SelectionMode::Kind::kOracle: {
    for (Index i = 0; i < n; ++i) {
      bool trapped = false;
      for (Eigen::Index r = 0; r < mode.bulk_values.size(); ++r)
        if (std::abs(eig.values(i) + mode.bulk_values(r)) <= mode.radius) trapped = true;
      if (!trapped) sel.indices.push_back(i);
    }
    if (static_cast<Index>(sel.indices.size()) != d) throw SelectionError(sel.indices.size(), d);
    break;
  }
  case SelectionMode::Kind::kMatched: {
    if (mode.expected_spectrum.size() != n || mode.expected_signal.size() != d)
      throw std::invalid_argument("matched selection: expected spectrum does not fit the matrix");
    // Walk the expected spectrum and claim, for each signal value, the first
    // unclaimed position holding that value.
    std::vector<bool> claimed(n, false);
    for (Index s = 0; s < d; ++s) {
      Index best = -1;
      double best_err = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < n; ++i) {
        if (claimed[i]) continue;
        const double err = std::abs(mode.expected_spectrum(i) - mode.expected_signal(s));
        if (err < best_err) {
          best_err = err;
          best = i;
        }
      }
      claimed[best] = true;
      sel.indices.push_back(best);
    }
    std::sort(sel.indices.begin(), sel.indices.end());
    break;
  }
  case SelectionMode::Kind::kEmpirical: {
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      if (sel.neighbour_gaps(a) != sel.neighbour_gaps(b)) return sel.neighbour_gaps(a) > sel.neighbour_gaps(b);
      return std::abs(eig.values(a)) > std::abs(eig.values(b));
    });
    sel.indices.assign(order.begin(), order.begin() + d);
    std::sort(sel.indices.begin(), sel.indices.end());
    break;
  }
  }

  sel.u_hat.resize(n, d);
  sel.lambda_hat.resize(d);
  for (Index c = 0; c < d; ++c) {
    sel.u_hat.col(c) = eig.vectors.col(sel.indices[c]);
    sel.lambda_hat(c) = eig.values(sel.indices[c]);
  }
  return sel;
}

/// Estimated interaction positions.
struct EmbeddingResult
{
  Eigen::MatrixXd u_hat;      ///< n x d
  Eigen::VectorXd lambda_hat; ///< d, descending
  Eigen::VectorXd s_hat;      ///< d, descending
  Eigen::MatrixXd x_hat;      ///< d x d
  Eigen::MatrixXd v_hat;      ///< m x d
  Eigen::MatrixXd embedding;  ///< m x d, V_hat S_hat
  Eigen::VectorXd spectrum;   ///< all eigenvalues of H(RR^T), descending
  Eigen::VectorXd neighbour_gaps;
  std::vector<Index> selected;
};

namespace detail {

inline EmbeddingResult finish_embedding(SignalSelection sel, const Eigen::MatrixXd& projected)
{
  ThinSvd svd = thin_svd(projected.transpose());
  EmbeddingResult out;
  // projected^T = V S X^T, so projected = X S V^T.
  out.v_hat = std::move(svd.left);
  out.s_hat = std::move(svd.values);
  out.x_hat = std::move(svd.right);
  const Eigen::VectorXd signs = fix_column_signs(out.v_hat);
  out.x_hat = out.x_hat * signs.asDiagonal();
  out.embedding = out.v_hat * out.s_hat.asDiagonal();
  out.u_hat = std::move(sel.u_hat);
  out.lambda_hat = std::move(sel.lambda_hat);
  out.spectrum = std::move(sel.spectrum);
  out.neighbour_gaps = std::move(sel.neighbour_gaps);
  out.selected = std::move(sel.indices);
  return out;
}

} // namespace detail

inline EmbeddingResult embed_interactions(const IncidenceMatrix& r, Index d, const SelectionMode& mode)
{
  if (d < 1 || d > std::min(r.rows(), r.cols())) throw std::invalid_argument("need 1 <= d <= min(n, m)");
  SignalSelection sel = select_signal_eigenpairs(hollowed_gram(r), d, mode);
  const Eigen::MatrixXd projected = r.left_multiply_transpose(sel.u_hat);
  return detail::finish_embedding(std::move(sel), projected);
}

inline EmbeddingResult embed_interactions(const Eigen::MatrixXd& r, Index d, const SelectionMode& mode)
{
  if (d < 1 || d > std::min(r.rows(), r.cols())) throw std::invalid_argument("need 1 <= d <= min(n, m)");
  SignalSelection sel = select_signal_eigenpairs(hollowed_gram(r), d, mode);
  const Eigen::MatrixXd projected = sel.u_hat.transpose() * r;
  return detail::finish_embedding(std::move(sel), projected);
}

/// Thin SVD Gamma = U S V^T, obtained from the d x m matrix sqrt(B) T because
/// Gamma = (Z sqrt(B)) (sqrt(B) T) and Z sqrt(B) has orthonormal columns.
struct TheoreticalEmbedding
{
  Eigen::MatrixXd u;         ///< n x d
  Eigen::VectorXd s;         ///< d, descending; zero beyond rank(Gamma)
  Eigen::MatrixXd v;         ///< m x d
  Eigen::MatrixXd embedding; ///< m x d, V S
};

inline TheoreticalEmbedding theoretical_embedding(const BlockModelSpec& spec)
{
  const Eigen::VectorXd sqrt_b = spec.inverse_sizes().cwiseSqrt();
  const Eigen::MatrixXd reduced = sqrt_b.asDiagonal() * spec.type_matrix().cast<double>();
  ThinSvd svd = thin_svd(reduced.transpose());
  TheoreticalEmbedding out;
  out.v = std::move(svd.left);
  out.s = std::move(svd.values);
  const Eigen::VectorXd signs = fix_column_signs(out.v);
  out.u = spec.indicator() * sqrt_b.asDiagonal() * svd.right * signs.asDiagonal();
  out.embedding = out.v * out.s.asDiagonal();
  return out;
}

/// Smallest Euclidean distance between rows of `positions` whose type ids
/// differ; infinity when only one type is present.
inline double type_separation(const Eigen::MatrixXd& positions, const std::vector<Index>& ids)
{
  std::vector<Index> representative;
  for (Index p = 0; p < static_cast<Index>(ids.size()); ++p)
    if (ids[p] == static_cast<Index>(representative.size())) representative.push_back(p);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < representative.size(); ++a)
    for (std::size_t b = a + 1; b < representative.size(); ++b)
      best = std::min(best, (positions.row(representative[a]) - positions.row(representative[b])).norm());
  return best;
}

/// (R - Gamma)(R - Gamma)^T without forming the n x m residual:
/// RR^T - R T^T B Z^T - Z B T R^T + Z B T T^T B Z^T.
inline Eigen::MatrixXd residual_gram(const IncidenceMatrix& r, const BlockModelSpec& spec)
{
  const Index n = r.rows();
  const Index d = spec.num_classes();
  const Eigen::MatrixXd t = spec.type_matrix().cast<double>();
  Eigen::MatrixXd rr = hollowed_gram(r).matrix;
  Eigen::MatrixXd rt = Eigen::MatrixXd::Zero(n, d);
  for (Index p = 0; p < r.cols(); ++p)
    for (Index i : r.column(p)) {
      rr(i, i) += 1.0;
      rt.row(i) += t.col(p).transpose();
    }
  const Eigen::MatrixXd zb = spec.indicator() * spec.inverse_sizes().asDiagonal();
  const Eigen::MatrixXd cross = rt * zb.transpose();
  return rr - cross - cross.transpose() + zb * (t * t.transpose()) * zb.transpose();
}

inline Eigen::MatrixXd residual_gram(const Eigen::MatrixXd& r, const BlockModelSpec& spec)
{
  const Eigen::MatrixXd diff = r - mean_matrix(spec);
  return diff * diff.transpose();
}

/// Frobenius norm of U^T (R - Gamma) for an n x k basis U.
inline double projected_residual_norm(const IncidenceMatrix& r, const BlockModelSpec& spec, const Eigen::MatrixXd& u)
{
  const Eigen::MatrixXd ur = r.left_multiply_transpose(u);
  const Eigen::MatrixXd ug =
      (u.transpose() * spec.indicator() * spec.inverse_sizes().asDiagonal()) * spec.type_matrix().cast<double>();
  return (ur - ug).norm();
}

/// Error norms between the estimated and the noiseless embedding.
///
/// The alignment W is the orthogonal Procrustes solution minimizing
/// ||V_hat S_hat - V S W||_F; W_star is the polar factor of V^T V_hat.
struct DiagnosticsReport
{
  double norm_r_gamma = 0.0;   ///< ||R - Gamma||_2
  double norm_hollow = 0.0;    ///< ||H(RR^T) - H(E RR^T)||_2
  double norm_sw = 0.0;        ///< ||S W - W_star S_hat||_F
  double norm_sinv = 0.0;      ///< ||S^-1 W - W_star S_hat^-1||_F
  double norm_v_2inf = 0.0;    ///< ||V_hat - V W_star||_{2->inf}
  double norm_vs_2inf = 0.0;   ///< ||V_hat S_hat - V S W||_{2->inf}
  Eigen::MatrixXd w;
  Eigen::MatrixXd w_star;
  std::string alignment = "procrustes";
};

namespace detail {

inline DiagnosticsReport diagnostics_from(const Eigen::MatrixXd& residual, const Eigen::MatrixXd& hollow,
                                          const BlockModelSpec& spec, const EmbeddingResult& e,
                                          const TheoreticalEmbedding& theo)
{
  if (e.v_hat.rows() != spec.num_interactions() || theo.v.rows() != spec.num_interactions() ||
      e.v_hat.cols() != theo.v.cols() || hollow.rows() != spec.num_nodes())
    throw std::invalid_argument("diagnostics: inputs come from different instances");
  DiagnosticsReport rep;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> res(residual, Eigen::EigenvaluesOnly);
  rep.norm_r_gamma = std::sqrt(std::max(0.0, res.eigenvalues().maxCoeff()));
  rep.norm_hollow = symmetric_spectral_norm(hollow - expected_gram_entrywise(spec));

  rep.w_star = polar_factor(theo.v.transpose() * e.v_hat);
  rep.w = procrustes_align(e.embedding, theo.embedding);

  const Eigen::MatrixXd s = theo.s.asDiagonal();
  const Eigen::MatrixXd s_hat = e.s_hat.asDiagonal();
  rep.norm_sw = (s * rep.w - rep.w_star * s_hat).norm();
  if (theo.s.minCoeff() > 0.0 && e.s_hat.minCoeff() > 0.0) {
    const Eigen::MatrixXd s_inv = theo.s.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd s_hat_inv = e.s_hat.cwiseInverse().asDiagonal();
    rep.norm_sinv = (s_inv * rep.w - rep.w_star * s_hat_inv).norm();
  } else {
    rep.norm_sinv = std::numeric_limits<double>::quiet_NaN();
  }
  rep.norm_v_2inf = two_to_infinity_norm(e.v_hat - theo.v * rep.w_star);
  rep.norm_vs_2inf = two_to_infinity_norm(e.embedding - theo.embedding * rep.w);
  return rep;
}

} // namespace detail

inline DiagnosticsReport diagnostics(const IncidenceMatrix& r, const BlockModelSpec& spec, const EmbeddingResult& e,
                                     const TheoreticalEmbedding& theo)
{
  if (r.rows() != spec.num_nodes() || r.cols() != spec.num_interactions())
    throw std::invalid_argument("diagnostics: incidence matrix does not match the block model");
  return detail::diagnostics_from(residual_gram(r, spec), hollowed_gram(r).matrix, spec, e, theo);
}

inline DiagnosticsReport diagnostics(const Eigen::MatrixXd& r, const BlockModelSpec& spec, const EmbeddingResult& e,
                                     const TheoreticalEmbedding& theo)
{
  if (r.rows() != spec.num_nodes() || r.cols() != spec.num_interactions())
    throw std::invalid_argument("diagnostics: matrix does not match the block model");
  return detail::diagnostics_from(residual_gram(r, spec), hollowed_gram(r).matrix, spec, e, theo);
}

} // namespace hsbm
