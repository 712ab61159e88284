#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "sparsenle/oracles.hpp"

using namespace sparsenle;

TEST(Enumerate, SmallExamples) {
  const auto all = enumerate_preimage({0}, 1, 2, 2);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0], (WordTuple{0, 0}));
  EXPECT_EQ(all[1], (WordTuple{1, 1}));

  const auto empty_tuple = enumerate_preimage({0, 0}, 2, 3, 0);
  ASSERT_EQ(empty_tuple.size(), 1u);
  EXPECT_TRUE(empty_tuple[0].empty());
  EXPECT_TRUE(enumerate_preimage({1, 0}, 2, 3, 0).empty());
}

TEST(Enumerate, SizeMatchesCountAndSumsHit) {
  Rng rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const unsigned h = 1 + uniform_index(3, rng);
    const std::uint64_t q = 2 + uniform_index(3, rng);
    const unsigned k = uniform_index(6, rng);
    ResidueVector b(h);
    for (auto& x : b) x = uniform_index(q, rng);
    const auto tuples = enumerate_preimage(b, h, q, k);
    const WordCodec codec(WordParams{h, q, k, 1});
    EXPECT_EQ(BigUint(tuples.size()), codec.count_preimages(hamming_weight(b)));
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      EXPECT_EQ(word_tuple_sum(tuples[i], h, q), b);
      if (i > 0) {
        EXPECT_LT(tuples[i - 1], tuples[i]);
      }
    }
  }
}

TEST(Enumerate, TooLarge) {
  try {
    enumerate_preimage({0, 0, 0, 0}, 4, 4, 6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLarge);
  }
}

TEST(ChiSquare, ExactCountsGiveOne) {
  const auto r = chi_square_uniform(std::vector<std::uint64_t>{10, 10, 10, 10});
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.dof, 3u);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(ChiSquare, SingleCell) {
  const auto r = chi_square_uniform(std::vector<std::uint64_t>{42});
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(ChiSquare, Underpowered) {
  try {
    chi_square_uniform(std::vector<std::uint64_t>{1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnderpoweredCells);
  }
  EXPECT_THROW(chi_square_uniform({1.0, 2.0}, {5.0}), Error);
}

TEST(ChiSquare, TwoDegreesOfFreedomClosedForm) {
  // With 2 dof the upper tail is exp(-x / 2).
  const auto r = chi_square_uniform({30.0, 10.0, 20.0}, {20.0, 20.0, 20.0});
  EXPECT_DOUBLE_EQ(r.statistic, 10.0);
  EXPECT_NEAR(r.p_value, std::exp(-5.0), 1e-12);
  EXPECT_NEAR(r.max_deviation_sigma, 10.0 / std::sqrt(20.0), 1e-12);
}

TEST(ChiSquare, CalibratedUnderNull) {
  Rng rng(2);
  int rejections = 0;
  const int trials = 1000;
  for (int i = 0; i < trials; ++i) {
    std::vector<std::uint64_t> counts(6, 0);
    for (int j = 0; j < 300; ++j) ++counts[uniform_index(6, rng)];
    if (chi_square_uniform(counts).p_value < 0.05) ++rejections;
  }
  EXPECT_GT(rejections, 25);
  EXPECT_LT(rejections, 80);
}

TEST(BruteForce, PlantedSecretFound) {
  const auto planted = sample_dense_instance(4, 3, 30, ErrorModel::zero(), Rng(3));
  const auto hits = brute_force_search(planted.instance, 0, WeightFn::indicator());
  bool found = false;
  for (const auto& hit : hits) {
    EXPECT_EQ(hit.objective, 0);
    found = found || hit.secret == planted.secret;
  }
  EXPECT_TRUE(found);
}

TEST(BruteForce, ContradictionHasNoExactSolution) {
  Instance inst;
  inst.kind = InstanceKind::Dense;
  inst.q = 2;
  inst.dim = 2;
  inst.dense = {{{1, 0}, 0}, {{1, 0}, 1}};
  EXPECT_TRUE(brute_force_search(inst, 0, WeightFn::indicator()).empty());
  const auto best = brute_force_minimum(inst, WeightFn::indicator());
  EXPECT_EQ(best.objective, BigRational(1, 2));
  EXPECT_EQ(best.secret, (ResidueVector{0, 0}));
}

TEST(BruteForce, MinimumMatchesDirectScan) {
  const auto planted = sample_dense_instance(5, 3, 40, ErrorModel::uniform(1), Rng(4));
  for (const auto& mu : {WeightFn::indicator(), WeightFn::circular_lp(2)}) {
    const auto best = brute_force_minimum(planted.instance, mu);
    BigRational direct = 2;
    ResidueVector s(5, 0);
    for (int code = 0; code < 243; ++code) {
      int c = code;
      for (int j = 4; j >= 0; --j) {
        s[j] = c % 3;
        c /= 3;
      }
      const auto v = objective(planted.instance, s, mu);
      if (v < direct) direct = v;
    }
    EXPECT_EQ(best.objective, direct);
    EXPECT_EQ(objective(planted.instance, best.secret, mu), direct);
  }
}

TEST(BruteForce, NullMinimumNearHalf) {
  const auto inst = sample_null_dense(8, 2, 400, Rng(5));
  const auto best = brute_force_minimum(inst, WeightFn::indicator());
  EXPECT_GT(best.objective, BigRational(35, 100));
  EXPECT_LE(best.objective, BigRational(1, 2));
}

TEST(BruteForce, TooLarge) {
  const auto inst = sample_null_dense(30, 2, 5, Rng(6));
  EXPECT_THROW(brute_force_minimum(inst, WeightFn::indicator()), Error);
}

TEST(Folklore, PlantedAndNull) {
  const auto planted =
      sample_sparse_instance(8, 2, 2, 600, SupportDistribution::ones(), ErrorModel::zero(), Rng(7));
  const auto r = folklore_distinguisher(planted.instance);
  EXPECT_EQ(r.verdict, DecisionVerdict::Planted);
  EXPECT_DOUBLE_EQ(r.zero_fraction, 1.0);
  EXPECT_DOUBLE_EQ(r.bias, 0.5);
  EXPECT_GT(r.groups_with_collisions, 0u);

  const auto null = sample_null_sparse(8, 2, 2, 600, SupportDistribution::ones(), Rng(8));
  const auto n = folklore_distinguisher(null);
  EXPECT_EQ(n.verdict, DecisionVerdict::Null);
  EXPECT_EQ(n.difference_counts[0] + n.difference_counts[1], n.pairs);
}

TEST(Folklore, PairsCountedPerGroup) {
  const auto inst = sample_null_sparse(6, 2, 3, 900, SupportDistribution::uniform_units(), Rng(10));
  std::map<SparseVector, std::size_t> sizes;
  for (const auto& s : inst.sparse) ++sizes[s.a];
  std::size_t pairs = 0, groups = 0;
  for (const auto& [a, c] : sizes) {
    pairs += c / 2;
    groups += c >= 2;
  }
  const auto r = folklore_distinguisher(inst);
  EXPECT_EQ(r.pairs, pairs);
  EXPECT_EQ(r.groups_with_collisions, groups);
}

TEST(Folklore, NoCollisions) {
  const auto inst = sample_null_sparse(1000, 5, 2, 10, SupportDistribution::ones(), Rng(9));
  try {
    folklore_distinguisher(inst);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoCollisions);
  }
}
