#include <gtest/gtest.h>

#include "aoilab/aoilab.hpp"
#include "support.hpp"

using namespace aoilab;
using aoilab::testing::R;

TEST(Example2, SmallCase) {
  auto inst = generate(gen::Example2{2, R("1/10"), R("3")});
  std::vector<RawUpdate> expected{{R("1/20"), R("1/2")}, {R("1/10"), R("1/2")}, {R("1"), R("1")}, {R("2"), R("1")}};
  EXPECT_EQ(inst.raw(), expected);
  EXPECT_EQ(inst.horizon(), R("3"));
}

TEST(Example2, CountsAndBurstWindow) {
  for (std::uint64_t m : {1u, 5u, 20u}) {
    for (const char* T : {"1/2", "4", "9/2", "40"}) {
      auto inst = generate(gen::Example2{m, R("1/100"), R(T)});
      std::size_t unit = 0, burst = 0;
      for (const auto& u : inst.updates()) {
        if (u.size == R("1/2")) {
          ++burst;
          EXPECT_GT(u.generation, Ratio(0));
          EXPECT_LE(u.generation, R("1/100"));
        } else {
          ++unit;
        }
      }
      EXPECT_EQ(burst, m);
      Ratio t = R(T);
      long below = mpz_class(t.numerator() / t.denominator()).get_si();
      if (t.denominator() == 1) --below;  // strictly before T
      EXPECT_EQ(static_cast<long>(unit), below);
    }
  }
}

TEST(Example2, RejectsBadParams) {
  EXPECT_THROW(generate(gen::Example2{0, R("1/10"), R("3")}), Error);
  EXPECT_THROW(generate(gen::Example2{2, R("0"), R("3")}), Error);
  EXPECT_THROW(generate(gen::Example2{2, R("1/10"), R("0")}), Error);
}

TEST(Example3, SixUpdates) {
  auto inst = generate(gen::Example3{});
  ASSERT_EQ(inst.size(), 6u);
  EXPECT_EQ(inst.at(1).size, R("1.45"));
  EXPECT_EQ(inst.at(6).generation, R("1.8"));
  EXPECT_EQ(inst.horizon(), Ratio(2));
  EXPECT_EQ(inst.initial_generation(), Ratio(0));
}

TEST(RandomUniform, EmptyAndReproducible) {
  EXPECT_TRUE(generate(gen::RandomUniform{0, R("4"), R("2"), 1}).empty());
  auto a = generate(gen::RandomUniform{9, R("4"), R("2"), 42});
  auto b = generate(gen::RandomUniform{9, R("4"), R("2"), 42});
  auto c = generate(gen::RandomUniform{9, R("4"), R("2"), 43});
  EXPECT_EQ(io::format_instance(a), io::format_instance(b));
  EXPECT_NE(io::format_instance(a), io::format_instance(c));
  EXPECT_EQ(a.horizon(), R("6"));
  for (const auto& u : a.updates()) {
    EXPECT_LT(u.generation, R("4"));
    EXPECT_GT(u.size, Ratio(0));
    EXPECT_LE(u.size, R("2"));
    EXPECT_LE((u.generation * Ratio(256) / R("4")).denominator(), 1);  // dyadic grid
  }
}

TEST(RandomPoissonLike, GapsOnLatticeAndReproducible) {
  auto a = generate(gen::RandomPoissonLike{30, R("2"), R("1/2"), 7});
  auto b = generate(gen::RandomPoissonLike{30, R("2"), R("1/2"), 7});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 30u);
  for (const auto& u : a.updates()) {
    EXPECT_EQ((u.generation * Ratio(32)).denominator(), 1);
    EXPECT_EQ((u.size * Ratio(32)).denominator(), 1);
  }
  auto clipped = generate(gen::RandomPoissonLike{30, R("2"), R("1/2"), 7, R("3")});
  for (const auto& u : clipped.updates()) EXPECT_LT(u.generation, R("3"));
}

TEST(Perturb, StaysValidAndNear) {
  auto base = generate(gen::Example3{});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto p = generate(gen::Perturb{base, R("1/8"), seed});
    EXPECT_EQ(p.size(), base.size());
    EXPECT_EQ(p.horizon(), base.horizon());
    EXPECT_EQ(p, generate(gen::Perturb{base, R("1/8"), seed}));
  }
  EXPECT_THROW(generate(gen::Perturb{base, R("0"), 1}), Error);
}

TEST(DyadicRng, UnitIntervalsAndGeometric) {
  DyadicRng rng(1);
  for (int k = 0; k < 1000; ++k) {
    Ratio u = rng.unit(5);
    EXPECT_GE(u, Ratio(0));
    EXPECT_LT(u, Ratio(1));
    EXPECT_LE(u.denominator(), 32);
    Ratio v = rng.unit_open_closed(5);
    EXPECT_GT(v, Ratio(0));
    EXPECT_LE(v, Ratio(1));
  }
  double mean = 0;
  for (int k = 0; k < 20000; ++k) mean += static_cast<double>(rng.geometric16());
  mean /= 20000;
  EXPECT_NEAR(mean, 15.0, 0.5);  // failures before success, p = 1/16
}

TEST(AdversarialSearch, ZeroBudgetReturnsSeedInstance) {
  auto res = adversarial_search(PolicyId::SrptPlus, 5, 0, 3);
  EXPECT_EQ(res.instance, generate(gen::RandomUniform{5, R("4"), R("2"), 3, std::nullopt, 6}));
  EXPECT_EQ(res.ratio, competitive_ratio(res.instance, PolicyId::SrptPlus));
  EXPECT_EQ(res.evaluations, 1u);
}

TEST(AdversarialSearch, FindsBadSrptInstances) {
  auto res = adversarial_search(PolicyId::Srpt, 8, 10000, 1);
  EXPECT_GT(res.ratio, Ratio(2));
  EXPECT_EQ(res.ratio, competitive_ratio(res.instance, PolicyId::Srpt));
}

TEST(AdversarialSearch, SrptPlusStaysUnderFour) {
  auto res = adversarial_search(PolicyId::SrptPlus, 8, 10000, 2);
  EXPECT_GE(res.ratio, Ratio(1));
  EXPECT_LE(res.ratio, Ratio(4));
}
