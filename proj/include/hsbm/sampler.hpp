#pragma once

// Random interaction hypergraphs: the sequential weighted draw, Hyper-SBM
// sampling given a type matrix, and the two-class simulation design.

#include "hypergraph.hpp"
#include "rng.hpp"

#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsbm {

/// Draws k distinct candidates one at a time, each with probability
/// proportional to its weight among those not yet drawn. The result is in
/// draw order; sort it for the unordered set.
inline std::vector<Index> sample_weighted_without_replacement(std::span<const double> weights, Index k,
                                                              RngStream& rng)
{
  Index support = 0;
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
    if (w > 0.0) ++support;
    total += w;
  }
  if (support == 0) throw std::invalid_argument("all weights are zero");
  if (k < 0 || k > support)
    throw std::invalid_argument("cannot draw " + std::to_string(k) + " items from a support of " +
                                std::to_string(support));

  std::vector<double> remaining(weights.begin(), weights.end());
  std::vector<Index> drawn;
  drawn.reserve(k);
  for (Index step = 0; step < k; ++step) {
    const double target = rng.uniform() * total;
    double partial = 0.0;
    Index pick = -1;
    Index last_positive = -1;
    for (Index i = 0; i < static_cast<Index>(remaining.size()); ++i) {
      if (remaining[i] <= 0.0) continue;
      last_positive = i;
      partial += remaining[i];
      if (target < partial) {
        pick = i;
        break;
      }
    }
    // Rounding can leave target at or past the final partial sum.
    if (pick < 0) pick = last_positive;
    drawn.push_back(pick);
    total -= remaining[pick];
    remaining[pick] = 0.0;
    // Recompute to keep cancellation from drifting the normalizer.
    if (step + 1 < k) total = std::accumulate(remaining.begin(), remaining.end(), 0.0);
  }
  return drawn;
}

/// Uniform subset of `count` elements of `pool` (partial Fisher-Yates).
inline std::vector<Index> sample_uniform_subset(std::span<const Index> pool, Index count, RngStream& rng)
{
  const auto size = static_cast<Index>(pool.size());
  if (count < 0 || count > size)
    throw std::invalid_argument("cannot draw " + std::to_string(count) + " of " + std::to_string(size));
  std::vector<Index> scratch(pool.begin(), pool.end());
  for (Index j = 0; j < count; ++j) {
    const Index swap_with = j + static_cast<Index>(rng.below(static_cast<std::uint64_t>(size - j)));
    std::swap(scratch[j], scratch[swap_with]);
  }
  scratch.resize(count);
  return scratch;
}

/// For each interaction independently, draws tau_rp nodes uniformly without
/// replacement from every class r. Interaction p uses the child stream
/// rng.split(p), so any single column can be regenerated on its own.
inline InteractionHypergraph sample_hyper_sbm(const BlockModelSpec& spec, const RngStream& rng)
{
  const auto& types = spec.type_matrix();
  std::vector<std::vector<Index>> interactions(spec.num_interactions());
  for (Index p = 0; p < spec.num_interactions(); ++p) {
    RngStream column_rng = rng.split(static_cast<std::uint64_t>(p));
    auto& e = interactions[p];
    for (Index r = 0; r < spec.num_classes(); ++r) {
      auto chosen = sample_uniform_subset(spec.members(r), types(r, p), column_rng);
      e.insert(e.end(), chosen.begin(), chosen.end());
    }
  }
  return {spec.num_nodes(), interactions};
}

/// k_min + Binomial(k_max - k_min, alpha).
struct SizeLaw
{
  int k_min = 2;
  int k_max = 5;
  double alpha = 0.4;

  void validate() const
  {
    if (k_min < 2 || k_max < k_min) throw std::invalid_argument("size law needs 2 <= k_min <= k_max");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("size law needs 0 < alpha < 1");
  }

  double mean() const { return k_min + alpha * (k_max - k_min); }

  int draw(RngStream& rng) const { return k_min + rng.binomial(k_max - k_min, alpha); }
};

inline std::vector<int> sample_sizes(const SizeLaw& law, Index m, RngStream& rng)
{
  law.validate();
  std::vector<int> sizes(m);
  for (auto& k : sizes) k = law.draw(rng);
  return sizes;
}

enum class Regime { kGrowing, kFixed };

inline const char* to_string(Regime r) { return r == Regime::kGrowing ? "growing" : "fixed"; }

inline Regime parse_regime(const std::string& s)
{
  if (s == "growing") return Regime::kGrowing;
  if (s == "fixed") return Regime::kFixed;
  throw std::invalid_argument("unknown regime '" + s + "' (expected growing or fixed)");
}

/// Two equal classes; interactions split in thirds into pure class 1, pure
/// class 2, and mixed. Sizes follow k_min + Binomial(k_max - k_min, alpha)
/// with k_max = n/2 (growing) or `fixed_k_max` (fixed).
struct SimulationDesign
{
  Index n = 10;
  Index m = 999;
  Regime regime = Regime::kGrowing;
  double alpha = 0.4;
  int fixed_k_max = 5;
  int pure_k_min = 2;
  /// Success probability of the class-1 share of a mixed interaction:
  /// tau_1 = 1 + Binomial(k - 2, mixed_split).
  double mixed_split = 0.5;
  std::uint64_t seed = 1;

  static constexpr Index kClasses = 2;

  int k_max() const { return regime == Regime::kGrowing ? static_cast<int>(n / kClasses) : fixed_k_max; }

  void validate() const
  {
    if (n < 1 || m < 1) throw std::invalid_argument("design needs positive n and m");
    if (m % 3 != 0) throw std::invalid_argument("design needs m divisible by 3");
    if (n % kClasses != 0) throw std::invalid_argument("design needs n divisible by 2");
    if (k_max() > n / kClasses)
      throw std::invalid_argument("k_max " + std::to_string(k_max()) + " exceeds class size " +
                                  std::to_string(n / kClasses));
    if (!(mixed_split > 0.0 && mixed_split < 1.0)) throw std::invalid_argument("mixed_split must lie in (0, 1)");
    pure_law().validate();
    mixed_law().validate();
  }

  SizeLaw pure_law() const { return {pure_k_min, k_max(), alpha}; }
  /// A mixed interaction needs one node from each of its two classes.
  SizeLaw mixed_law() const { return {static_cast<int>(kClasses), k_max(), alpha}; }

  /// Basic type of column p: 0 pure class 1, 1 pure class 2, 2 mixed.
  int basic_type(Index p) const { return static_cast<int>(p / (m / 3)); }
};

/// Class-1 share of a mixed interaction of size k.
inline Index mixed_allocation(Index k, double split, RngStream& rng)
{
  return 1 + rng.binomial(static_cast<int>(k - 2), split);
}

struct DesignInstance
{
  BlockModelSpec spec;
  InteractionHypergraph hypergraph;
};

/// Type vectors come from rng.split(0); the hypergraph from rng.split(1).
inline BlockModelSpec design_spec(const SimulationDesign& design, const RngStream& rng)
{
  design.validate();
  const Index half = design.n / SimulationDesign::kClasses;
  std::vector<Index> labels(design.n);
  for (Index i = 0; i < design.n; ++i) labels[i] = i < half ? 0 : 1;

  RngStream type_rng = rng.split(0);
  IntMatrix types = IntMatrix::Zero(SimulationDesign::kClasses, design.m);
  const SizeLaw pure = design.pure_law();
  const SizeLaw mixed = design.mixed_law();
  for (Index p = 0; p < design.m; ++p) {
    switch (design.basic_type(p)) {
    case 0: types(0, p) = pure.draw(type_rng); break;
    case 1: types(1, p) = pure.draw(type_rng); break;
    default: {
      const Index k = mixed.draw(type_rng);
      types(0, p) = mixed_allocation(k, design.mixed_split, type_rng);
      types(1, p) = k - types(0, p);
    }
    }
  }
  return {SimulationDesign::kClasses, std::move(labels), std::move(types)};
}

inline DesignInstance generate_design(const SimulationDesign& design, const RngStream& rng)
{
  BlockModelSpec spec = design_spec(design, rng);
  InteractionHypergraph h = sample_hyper_sbm(spec, rng.split(1));
  return {std::move(spec), std::move(h)};
}

} // namespace hsbm
