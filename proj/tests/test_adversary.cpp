#include <gtest/gtest.h>

#include "coracle/adversary.hpp"
#include "coracle/littlestone.hpp"
#include "coracle/random.hpp"
#include "oracles.hpp"

using namespace coracle;

namespace {

std::vector<Bit> random_labels(Rng& rng, std::size_t n) {
  std::vector<Bit> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = coin(rng);
  return out;
}

std::vector<bool> as_bools(const std::vector<Bit>& v) { return {v.begin(), v.end()}; }

// Drives the informative learner on every query; returns its mistakes.
unsigned play_informative(unsigned d, const std::vector<Bit>& labels, std::uint64_t r,
                          const std::vector<Point>& queries) {
  InformativeLearner learner(d, labels);
  for (Point z : queries) {
    const Bit guess = learner.predict(z);
    learner.update(z, ternary_value(r, d, labels, z));
    (void)guess;
  }
  return learner.mistakes();
}

}  // namespace

TEST(Ternary, Expansion) {
  const TernaryExpansion t(7, 2);  // 21
  EXPECT_EQ(t.digit(0), 1U);
  EXPECT_EQ(t.digit(1), 2U);
  EXPECT_EQ(t.from_top(0), 2U);
  EXPECT_EQ(t.value(), 7U);
  EXPECT_EQ(pow3(3), 27U);
}

TEST(Ternary, HandEvaluatedValues) {
  const std::vector<Bit> labels{0, 0, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(ternary_value(4, 2, labels, 7), 1);  // 11 vs 21
  EXPECT_EQ(ternary_value(4, 2, labels, 5), 1);  // 11 vs 12
  EXPECT_EQ(ternary_value(4, 2, labels, 9), 0);
  EXPECT_EQ(ternary_value(0, 1, {1, 0, 0}, 9), 0);
}

TEST(Ternary, MatchesDigitStringReference) {
  Rng rng(8);
  for (unsigned d = 1; d <= 4; ++d) {
    const auto n = pow3(d);
    for (int rep = 0; rep < 3; ++rep) {
      const auto labels = random_labels(rng, n);
      for (std::uint64_t r = 0; r < n; ++r) {
        const Hypothesis f = ternary_function(r, d, labels);
        for (std::uint64_t x = 0; x < n + 3; ++x) {
          ASSERT_EQ(f(x), oracle::reference_ternary(r, d, as_bools(labels), x))
              << "d=" << d << " r=" << r << " x=" << x;
        }
      }
    }
  }
}

TEST(Ternary, FunctionErrors) {
  EXPECT_THROW(ternary_function(9, 2, std::vector<Bit>(9)), PreconditionViolation);
  EXPECT_THROW(ternary_function(3, 2, std::vector<Bit>(2)), PreconditionViolation);
  EXPECT_THROW(TernaryAdversary(0), PreconditionViolation);
}

TEST(TernaryAdversary, FirstRoundD1) {
  TernaryAdversary adv(1);
  ASSERT_EQ(adv.next_point(), std::optional<Point>(0));
  const auto ans = adv.answer(0, false);
  EXPECT_EQ(ans.y, 1);
  EXPECT_EQ(ans.f(0), 1);
  EXPECT_EQ(ans.f(1), 0);
  EXPECT_EQ(ans.f(2), 0);
  EXPECT_EQ(ans.f(3), 0);
}

// Each revealed f_r agrees with every earlier round, and the final set has
// dimension at most d.
TEST(TernaryAdversary, LegalAgainstArbitraryPredictions) {
  Rng rng(21);
  for (unsigned d = 1; d <= 3; ++d) {
    TernaryAdversary adv(d);
    Sample history;
    std::vector<Hypothesis> revealed;
    while (auto x = adv.next_point()) {
      const Bit guess = coin(rng);
      const auto ans = adv.answer(*x, guess);
      EXPECT_NE(ans.y, guess);
      history.push_back(*x, ans.y);
      EXPECT_TRUE(is_consistent(ans.f, history));
      revealed.push_back(ans.f);
    }
    EXPECT_EQ(revealed.size(), pow3(d));
    EXPECT_LE(ldim(revealed), static_cast<int>(d));
    if (d <= 2) {
      std::vector<Point> pts;
      for (Point p = 0; p < pow3(d); ++p) pts.push_back(p);
      EXPECT_LE(oracle::brute_force_ldim(revealed, pts), static_cast<int>(d));
    }
  }
}

TEST(FloodAdversary, ForcesMistakesWithLowDimension) {
  for (unsigned d = 1; d <= 3; ++d) {
    FloodAdversary adv(d);
    std::vector<Hypothesis> revealed;
    Sample history;
    std::size_t rounds = 0;
    while (auto x = adv.next_point()) {
      const auto ans = adv.answer(*x, false);
      history.push_back(*x, ans.y);
      EXPECT_TRUE(is_consistent(ans.f, history));
      revealed.push_back(ans.f);
      ++rounds;
    }
    EXPECT_EQ(rounds, (std::size_t{2} << d) - 1);
    std::vector<Point> pts;
    for (Point p = 0; p < adv.points(); ++p) pts.push_back(p);
    EXPECT_LE(oracle::brute_force_ldim(revealed, pts), static_cast<int>(d));
  }
}

TEST(FreeAdversary, IndicatorOfFirstPoint) {
  FreeAdversary adv;
  ASSERT_EQ(adv.next_point(), std::optional<Point>(0));
  const auto ans = adv.answer(0, false);
  EXPECT_EQ(ans.y, 1);
  EXPECT_EQ(ans.f, Hypothesis("e", {0}, "1"));
  EXPECT_EQ(adv.next_point(), std::optional<Point>(1));
}

TEST(ClassGreedy, FlipsWhenRealizable) {
  const auto thresholds = HypothesisClass::from_rows(
      {0, 1, 2, 3}, {"1111", "0111", "0011", "0001", "0000"});
  ClassGreedyAdversary adv(thresholds, 1);
  const auto ans = adv.answer(0, false);
  EXPECT_EQ(ans.y, 1);
  EXPECT_TRUE(is_consistent(ans.f, Sample{{0, true}}));
  EXPECT_EQ(ans.f.id(), "h0");

  ClassGreedyAdversary single(HypothesisClass::from_rows({0, 1}, {"10"}), 1);
  EXPECT_EQ(single.answer(0, true).y, 1);
  EXPECT_EQ(single.answer(1, false).y, 0);
}

TEST(ClassGreedy, PrefersSplittingPointsAndIsSeeded) {
  const auto c = HypothesisClass::from_rows({0, 1, 2, 3, 4, 5},
                                            {"000000", "000001", "000011", "000111"});
  ClassGreedyAdversary a(c, 4), b(c, 4);
  for (int i = 0; i < 10; ++i) {
    const auto xa = a.next_point();
    ASSERT_EQ(xa, b.next_point());
    if (i == 0) {
      // Points 0..2 are constant on the class.
      EXPECT_GE(*xa, 3U);
    }
    const auto ya = a.answer(*xa, false);
    EXPECT_EQ(ya.y, b.answer(*xa, false).y);
    EXPECT_TRUE(is_consistent(ya.f, a.history()));
  }
}

TEST(ClassRandom, AnswersAreLegal) {
  Rng rng(1);
  const auto c = HypothesisClass::from_rows({0, 1, 2}, {"000", "011", "110", "101"});
  ClassRandomAdversary adv(c, 12);
  Sample history;
  for (int i = 0; i < 30; ++i) {
    const auto x = adv.next_point();
    ASSERT_TRUE(x);
    const auto ans = adv.answer(*x, coin(rng));
    history.push_back(*x, ans.y);
    EXPECT_TRUE(is_consistent(ans.f, history));
    EXPECT_NE(std::find(c.hypotheses().begin(), c.hypotheses().end(), ans.f),
              c.hypotheses().end());
  }
}

TEST(InformativeLearner, WitnessDigitTwoUsesItsLabel) {
  // d = 1, target f_1: f_1(2) is r's digit, 1, while y_2 = 0. The first
  // mistake makes 2 the witness; its digit is 2, so r_0 = not y_2 = 1.
  const std::vector<Bit> labels{1, 0, 0};
  InformativeLearner learner(1, labels);
  EXPECT_EQ(learner.predict(2), 0);
  learner.update(2, ternary_value(1, 1, labels, 2));
  EXPECT_EQ(learner.mistakes(), 1U);
  EXPECT_EQ(learner.recovered_index(), std::optional<std::uint64_t>(1));
}

TEST(InformativeLearner, WitnessDigitOneGivesZero) {
  // d = 1, target f_0: f_0(1) = 0 while y_1 = 1. The witness has digit 1, so
  // r_0 = 0.
  const std::vector<Bit> labels{0, 1, 1};
  InformativeLearner learner(1, labels);
  EXPECT_EQ(learner.predict(1), 1);
  learner.update(1, ternary_value(0, 1, labels, 1));
  EXPECT_EQ(learner.recovered_index(), std::optional<std::uint64_t>(0));
  // Once r is known every prediction is exact.
  EXPECT_EQ(learner.predict(2), 0);
}

TEST(InformativeLearner, UpdateNeedsPrediction) {
  InformativeLearner learner(2, std::vector<Bit>(9));
  EXPECT_THROW(learner.update(1, false), PreconditionViolation);
  EXPECT_THROW(InformativeLearner(2, std::vector<Bit>(8)), PreconditionViolation);
}

// At most d mistakes for every target, every labeling tried, random query
// orders with repeats and out-of-range points.
TEST(InformativeLearner, AtMostDMistakes) {
  Rng rng(314);
  for (unsigned d = 1; d <= 3; ++d) {
    const auto n = pow3(d);
    for (int lab = 0; lab < 6; ++lab) {
      const auto labels = random_labels(rng, n);
      for (std::uint64_t r = 0; r < n; ++r) {
        for (int order = 0; order < 20; ++order) {
          std::vector<Point> queries;
          for (Point p = 0; p < n + 2; ++p) queries.push_back(p);
          for (int extra = 0; extra < 5; ++extra) queries.push_back(uniform_below(rng, n + 4));
          shuffle(queries, rng);
          EXPECT_LE(play_informative(d, labels, r, queries), d)
              << "d=" << d << " r=" << r;
        }
      }
    }
  }
}

// Every labeling on d = 1 and every query order of the three points.
TEST(InformativeLearner, ExhaustiveD1) {
  for (unsigned mask = 0; mask < 8; ++mask) {
    const std::vector<Bit> labels{(mask & 1U) != 0, (mask & 2U) != 0, (mask & 4U) != 0};
    for (std::uint64_t r = 0; r < 3; ++r) {
      std::vector<Point> q{0, 1, 2, 3};
      do {
        EXPECT_LE(play_informative(1, labels, r, q), 1U);
      } while (std::next_permutation(q.begin(), q.end()));
    }
  }
}
