#include "oracles.hpp"

#include <hsbm/rng.hpp>
#include <hsbm/sampler.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

using namespace hsbm;

namespace {

// Upper 0.001 quantiles of chi-square.
double chi2_critical_999(int df)
{
  static const std::map<int, double> table{{1, 10.828}, {2, 13.816}, {3, 16.266}, {4, 18.467},
                                           {5, 20.515}, {6, 22.458}, {7, 24.322}, {8, 26.124}};
  return table.at(df);
}

double chi2(const std::vector<double>& observed, const std::vector<double>& expected)
{
  double s = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i)
    s += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  return s;
}

} // namespace

TEST(Rng, SameSeedAndKeyRepeat)
{
  RngStream a(7, 11), b(7, 11), c(7, 12);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, SplitIsIndependentOfParentPosition)
{
  RngStream a(3, 5);
  const RngStream child_before = a.split(9);
  for (int i = 0; i < 10; ++i) a.next();
  RngStream x = child_before;
  RngStream y = a.split(9);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(x.next(), y.next());
}

TEST(Rng, BelowStaysInRangeAndIsRoughlyUniform)
{
  RngStream rng(1, 1);
  std::vector<double> counts(7, 0.0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    counts[v] += 1;
  }
  EXPECT_LT(chi2(counts, std::vector<double>(7, 10000.0)), chi2_critical_999(6));
}

TEST(Rng, UniformInUnitInterval)
{
  RngStream rng(2, 2);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 4 * std::sqrt(1.0 / 12 / 100000));
}

TEST(WeightedSampler, PairLawOracleMatchesHandValues)
{
  const auto law = oracle::weighted_pair_law({1, 2, 3});
  EXPECT_NEAR((law.at({0, 1})), 3.0 / 20, 1e-15);
  EXPECT_NEAR((law.at({0, 2})), 4.0 / 15, 1e-15);
  EXPECT_NEAR((law.at({1, 2})), 7.0 / 12, 1e-15);
}

TEST(WeightedSampler, SecondDrawAndPairDistribution)
{
  const std::vector<double> w{1, 2, 3};
  const auto law = oracle::weighted_pair_law(w);
  RngStream rng(42, 0);
  const int trials = 60000;
  int third_second = 0;
  std::map<std::pair<Index, Index>, double> counts;
  for (int t = 0; t < trials; ++t) {
    const auto draw = sample_weighted_without_replacement(w, 2, rng);
    ASSERT_EQ(draw.size(), 2u);
    ASSERT_NE(draw[0], draw[1]);
    if (draw[1] == 2) ++third_second;
    counts[{std::min(draw[0], draw[1]), std::max(draw[0], draw[1])}] += 1;
  }
  const double p = 7.0 / 20;
  EXPECT_NEAR(third_second / static_cast<double>(trials), p, 3 * std::sqrt(p * (1 - p) / trials));
  std::vector<double> obs, exp;
  for (const auto& [pair, prob] : law) {
    obs.push_back(counts[pair]);
    exp.push_back(prob * trials);
  }
  EXPECT_LT(chi2(obs, exp), chi2_critical_999(2));
}

TEST(WeightedSampler, ExhaustiveDrawReturnsSupport)
{
  RngStream rng(5, 5);
  const std::vector<double> w{1, 1, 1, 1};
  for (int t = 0; t < 20; ++t) {
    auto draw = sample_weighted_without_replacement(w, 4, rng);
    std::sort(draw.begin(), draw.end());
    EXPECT_EQ(draw, (std::vector<Index>{0, 1, 2, 3}));
  }
}

TEST(WeightedSampler, ZeroWeightsNeverDrawn)
{
  RngStream rng(5, 6);
  const std::vector<double> w{0, 2, 0, 1};
  for (int t = 0; t < 200; ++t) {
    auto draw = sample_weighted_without_replacement(w, 2, rng);
    std::sort(draw.begin(), draw.end());
    EXPECT_EQ(draw, (std::vector<Index>{1, 3}));
  }
}

TEST(WeightedSampler, Errors)
{
  RngStream rng(1, 1);
  EXPECT_THROW(sample_weighted_without_replacement(std::vector<double>{0, 0}, 1, rng), std::invalid_argument);
  EXPECT_THROW(sample_weighted_without_replacement(std::vector<double>{1, 0}, 2, rng), std::invalid_argument);
  EXPECT_THROW(sample_weighted_without_replacement(std::vector<double>{1, -1}, 1, rng), std::invalid_argument);
}

TEST(HyperSbm, ColumnsHaveTheirTypeVectors)
{
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 30; ++trial) {
    const BlockModelSpec spec = oracle::random_spec(gen, 20, 3, 15);
    const InteractionHypergraph h = sample_hyper_sbm(spec, RngStream(trial, 0));
    EXPECT_EQ(type_matrix(h, spec.labels(), spec.num_classes()), spec.type_matrix());
  }
}

TEST(HyperSbm, SaturatedColumnIsEverything)
{
  IntMatrix t(2, 1);
  t << 3, 2;
  const BlockModelSpec spec(2, {0, 1, 0, 1, 0}, t);
  const InteractionHypergraph h = sample_hyper_sbm(spec, RngStream(1, 1));
  EXPECT_EQ(h.interaction_size(0), 5);
}

TEST(HyperSbm, MembershipProbabilityIsTauOverClassSize)
{
  IntMatrix t(2, 1);
  t << 2, 1;
  const BlockModelSpec spec(2, {0, 0, 0, 0, 0, 1, 1, 1}, t);
  const int reps = 20000;
  std::vector<double> hits(8, 0.0);
  const RngStream base(99, 0);
  for (int r = 0; r < reps; ++r) {
    const InteractionHypergraph h = sample_hyper_sbm(spec, base.split(r));
    for (Index v : h.interaction(0)) hits[v] += 1;
  }
  for (Index i = 0; i < 8; ++i) {
    const double p = i < 5 ? 2.0 / 5 : 1.0 / 3;
    EXPECT_NEAR(hits[i] / reps, p, 3 * std::sqrt(p * (1 - p) / reps)) << "node " << i;
  }
}

TEST(HyperSbm, UniformPairsWithinOneClass)
{
  IntMatrix t(1, 1);
  t << 2;
  const BlockModelSpec spec(1, {0, 0, 0, 0}, t);
  const int reps = 60000;
  std::map<std::pair<Index, Index>, double> counts;
  const RngStream base(123, 0);
  for (int r = 0; r < reps; ++r) {
    const InteractionHypergraph h = sample_hyper_sbm(spec, base.split(r));
    const auto e = h.interaction(0);
    counts[{e[0], e[1]}] += 1;
  }
  ASSERT_EQ(counts.size(), 6u);
  std::vector<double> obs;
  for (const auto& [pair, c] : counts) obs.push_back(c);
  EXPECT_LT(chi2(obs, std::vector<double>(6, reps / 6.0)), chi2_critical_999(5));
}

TEST(SizeLaw, Means)
{
  EXPECT_DOUBLE_EQ((SizeLaw{2, 5, 0.4}.mean()), 3.2);
  EXPECT_DOUBLE_EQ((SizeLaw{2, 20, 0.4}.mean()), 9.2);
  for (Index n : {10, 20, 40, 80}) EXPECT_NEAR((SizeLaw{2, static_cast<int>(n / 2), 0.4}.mean()), 1.2 + 0.2 * n, 1e-12);
  RngStream rng(8, 8);
  const auto sizes = sample_sizes({2, 5, 0.4}, 200000, rng);
  double sum = 0;
  for (int k : sizes) {
    ASSERT_GE(k, 2);
    ASSERT_LE(k, 5);
    sum += k;
  }
  const double sd = std::sqrt(3 * 0.4 * 0.6 / 200000);
  EXPECT_NEAR(sum / 200000, 3.2, 4 * sd);
}

TEST(SizeLaw, DegenerateLawIsConstant)
{
  RngStream rng(1, 2);
  for (int k : sample_sizes({5, 5, 0.4}, 100, rng)) EXPECT_EQ(k, 5);
  EXPECT_THROW(sample_sizes({1, 5, 0.4}, 3, rng), std::invalid_argument);
  EXPECT_THROW(sample_sizes({2, 5, 1.0}, 3, rng), std::invalid_argument);
}

TEST(Design, ThirdsOfBasicTypes)
{
  for (Regime regime : {Regime::kFixed, Regime::kGrowing}) {
    SimulationDesign design;
    design.n = 10;
    design.m = 999;
    design.regime = regime;
    const DesignInstance inst = generate_design(design, RngStream(1, 2));
    const IntMatrix basic = inst.spec.basic_type_matrix();
    std::map<std::pair<Index, Index>, int> counts;
    for (Index p = 0; p < 999; ++p) counts[{basic(0, p), basic(1, p)}] += 1;
    EXPECT_EQ(counts.size(), 3u);
    EXPECT_EQ((counts[{1, 0}]), 333);
    EXPECT_EQ((counts[{0, 1}]), 333);
    EXPECT_EQ((counts[{1, 1}]), 333);
    for (Index p = 0; p < 999; ++p) {
      const Index k = inst.spec.interaction_size(p);
      EXPECT_GE(k, 2);
      EXPECT_LE(k, design.k_max());
    }
    EXPECT_EQ(type_matrix(inst.hypergraph, inst.spec.labels(), 2), inst.spec.type_matrix());
  }
}

TEST(Design, PureColumnsUseOneClass)
{
  SimulationDesign design;
  design.n = 20;
  design.m = 300;
  const BlockModelSpec spec = design_spec(design, RngStream(4, 4));
  for (Index p = 0; p < 100; ++p) EXPECT_EQ(spec.type_matrix()(1, p), 0);
  for (Index p = 100; p < 200; ++p) EXPECT_EQ(spec.type_matrix()(0, p), 0);
}

TEST(Design, MixedAllocationLaw)
{
  // Brute force: every sequence of k - 2 fair coin flips, class 1 gets one
  // node plus the heads.
  const int k = 6;
  std::vector<double> pmf(k + 1, 0.0);
  for (int mask = 0; mask < (1 << (k - 2)); ++mask) pmf[1 + __builtin_popcount(mask)] += 1.0 / (1 << (k - 2));
  RngStream rng(31, 0);
  const int trials = 50000;
  std::vector<double> counts(k + 1, 0.0);
  for (int t = 0; t < trials; ++t) {
    const Index a = mixed_allocation(k, 0.5, rng);
    ASSERT_GE(a, 1);
    ASSERT_LE(k - a, k - 1);
    ASSERT_GE(k - a, 1);
    counts[a] += 1;
  }
  std::vector<double> obs, exp;
  for (int a = 1; a < k; ++a) {
    obs.push_back(counts[a]);
    exp.push_back(pmf[a] * trials);
  }
  EXPECT_LT(chi2(obs, exp), chi2_critical_999(4));
}

TEST(Design, Validation)
{
  SimulationDesign design;
  design.m = 1000;
  EXPECT_THROW(design.validate(), std::invalid_argument);
  design.m = 999;
  design.n = 11;
  EXPECT_THROW(design.validate(), std::invalid_argument);
  design.n = 8;
  design.regime = Regime::kFixed;
  EXPECT_THROW(design.validate(), std::invalid_argument);
  design.regime = Regime::kGrowing;
  EXPECT_NO_THROW(design.validate());
}

TEST(Design, DeterministicGivenStream)
{
  SimulationDesign design;
  design.n = 20;
  design.m = 99;
  const auto a = generate_design(design, RngStream(9, 9));
  const auto b = generate_design(design, RngStream(9, 9));
  const auto c = generate_design(design, RngStream(9, 10));
  EXPECT_TRUE(a.hypergraph == b.hypergraph);
  EXPECT_EQ(a.spec.type_matrix(), b.spec.type_matrix());
  EXPECT_FALSE(a.hypergraph == c.hypergraph);
}
