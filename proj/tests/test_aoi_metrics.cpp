#include <gtest/gtest.h>

#include <random>

#include "aoilab/aoilab.hpp"
#include "support.hpp"

using namespace aoilab;
using aoilab::testing::R;
using aoilab::testing::random_instance;
using aoilab::testing::random_schedule;
using aoilab::testing::trapezoid_integral;

namespace {

Instance example1() { return generate(gen::Example1{}); }
Instance example3() { return generate(gen::Example3{}); }

}  // namespace

TEST(Trajectory, Example1StepsOnlyWhenLambdaRises) {
  auto traj = trajectory_from_trace(example1_trace(), example1());
  ASSERT_EQ(traj.breakpoints.size(), 3u);
  EXPECT_EQ(traj.breakpoints[0].time, Ratio(0));
  EXPECT_EQ(traj.breakpoints[0].lambda, Ratio(0));
  EXPECT_EQ(traj.breakpoints[1].time, Ratio(3));
  EXPECT_EQ(traj.breakpoints[1].lambda, Ratio(2));
  EXPECT_EQ(traj.breakpoints[2].time, Ratio(5));
  EXPECT_EQ(traj.breakpoints[2].lambda, Ratio(4));
  EXPECT_EQ(traj.end_time, Ratio(5));
  EXPECT_EQ(traj.age_at(Ratio(2)), Ratio(2));
  EXPECT_EQ(traj.age_at(Ratio(4)), Ratio(2));
}

TEST(Trajectory, EmptyTraceIsSingleRamp) {
  auto inst = validate_instance({}, Ratio(1));
  auto traj = trajectory_from_trace(Trace{}, inst);
  ASSERT_EQ(traj.breakpoints.size(), 1u);
  EXPECT_EQ(integrate(traj, Ratio(0), Ratio(1)), Ratio(1, 2));
}

TEST(Trajectory, SrptPlusExample3Jumps) {
  auto inst = example3();
  auto traj = trajectory_from_trace(simulate(inst, PolicyId::SrptPlus), inst);
  ASSERT_EQ(traj.breakpoints.size(), 4u);
  EXPECT_EQ(traj.breakpoints[1].time, R("1.5"));
  EXPECT_EQ(traj.breakpoints[1].lambda, R("1"));
  EXPECT_EQ(traj.breakpoints[2].time, R("1.8"));
  EXPECT_EQ(traj.breakpoints[2].lambda, R("1.25"));
  EXPECT_EQ(traj.breakpoints[3].time, R("1.9"));
  EXPECT_EQ(traj.breakpoints[3].lambda, R("1.8"));
}

TEST(Trajectory, RejectsInvalidTrace) {
  Trace bad;
  bad.segments = {{2, Ratio(0), Ratio(1)}};
  try {
    trajectory_from_trace(bad, example1());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidTrace);
  }
}

TEST(Integrate, Example1MatchesIndependentTrapezoids) {
  // The reference value comes from the trapezoid oracle first.
  Ratio reference = trapezoid_integral(example1_trace(), example1());
  ASSERT_EQ(reference, Ratio(17, 2));
  auto traj = trajectory_from_trace(example1_trace(), example1());
  EXPECT_EQ(integrate(traj, Ratio(0), Ratio(5)), reference);
}

TEST(Integrate, EmptyIntervalAndBounds) {
  auto traj = trajectory_from_trace(example1_trace(), example1());
  EXPECT_EQ(integrate(traj, Ratio(2), Ratio(2)), Ratio(0));
  EXPECT_THROW(integrate(traj, Ratio(-1), Ratio(2)), Error);
  EXPECT_THROW(integrate(traj, Ratio(0), Ratio(6)), Error);
  EXPECT_THROW(integrate(traj, Ratio(3), Ratio(2)), Error);
}

TEST(Integrate, Example3SrptPlusArea) {
  auto inst = example3();
  auto trace = simulate(inst, PolicyId::SrptPlus);
  EXPECT_EQ(trapezoid_integral(trace, inst), R("1.395"));
  auto traj = trajectory_from_trace(trace, inst);
  EXPECT_EQ(integrate(traj, Ratio(0), Ratio(2)), Ratio(279, 200));
}

TEST(Integrate, AdditiveOverAdjacentIntervals) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 300; ++k) {
    auto inst = random_instance(rng, 1 + rng() % 7);
    auto trace = random_schedule(inst, rng, false);
    auto traj = trajectory_from_trace(trace, inst);
    const Ratio& T = inst.horizon();
    Ratio a = T * Ratio(static_cast<long>(rng() % 17), 16);
    Ratio b = T * Ratio(static_cast<long>(rng() % 17), 16);
    Ratio c = T * Ratio(static_cast<long>(rng() % 17), 16);
    std::vector<Ratio> pts{a, b, c};
    std::sort(pts.begin(), pts.end());
    EXPECT_EQ(integrate(traj, pts[0], pts[2]), integrate(traj, pts[0], pts[1]) + integrate(traj, pts[1], pts[2]));
  }
}

TEST(AverageAoi, Example1Decomposition) {
  auto rep = average_aoi(example1_trace(), example1());
  EXPECT_EQ(rep.integral, Ratio(17, 2));
  EXPECT_EQ(rep.average, Ratio(17, 10));
  ASSERT_EQ(rep.terms.size(), 3u);
  EXPECT_EQ(rep.terms[0].value, Ratio(0));
  EXPECT_EQ(rep.terms[1].value, Ratio(4));
  EXPECT_EQ(rep.terms[2].value, Ratio(4));
  EXPECT_EQ(rep.tail, Ratio(1, 2));
  EXPECT_EQ(rep.tail, closed_form_tail(example1()));
}

TEST(AverageAoi, Example3PolicyAreas) {
  auto inst = example3();
  auto plus = average_aoi(simulate(inst, PolicyId::SrptPlus), inst);
  EXPECT_EQ(plus.integral, Ratio(279, 200));
  EXPECT_EQ(plus.average * inst.horizon(), plus.integral);
  auto l = average_aoi(simulate(inst, PolicyId::SrptL), inst);
  EXPECT_EQ(l.integral, Ratio(653, 400));
  EXPECT_EQ(l.average, Ratio(653, 800));
}

TEST(PerUpdateMetrics, SrptPlusExample3) {
  auto inst = example3();
  auto m = per_update_metrics(simulate(inst, PolicyId::SrptPlus), inst);
  const Ratio r[] = {R("1.5"), R("1.5"), R("1.5"), R("1.5"), R("1.8"), R("1.9")};
  const Ratio b[] = {R("0.25"), R("0.25"), R("1"), R("1"), R("1.5"), R("1.8")};
  for (UpdateIndex i = 1; i <= 6; ++i) {
    ASSERT_TRUE(m.r[i]) << i;
    EXPECT_EQ(*m.r[i], r[i - 1]) << i;
    EXPECT_EQ(*m.b[i], b[i - 1]) << i;
    EXPECT_EQ(*m.nu[i], *m.w[i] + *m.d[i]);
  }
  EXPECT_EQ(*m.w[1], R("0.25"));
  EXPECT_EQ(*m.w[2], R("0"));
  EXPECT_EQ(m.nu_min[1], R("1.45"));
  EXPECT_EQ(m.delta[1], R("0"));
  EXPECT_EQ(m.delta[6], R("0.55"));
}

TEST(PerUpdateMetrics, NuMinByDirectEvaluation) {
  auto inst = example3();
  auto m = per_update_metrics(Trace{}, inst);
  for (UpdateIndex i = 1; i <= inst.size(); ++i) {
    Ratio best = inst.at(i).generation + inst.at(i).size;
    for (UpdateIndex j = i; j <= inst.size(); ++j) best = min(best, inst.at(j).generation + inst.at(j).size);
    EXPECT_EQ(m.nu_min[i], best - inst.at(i).generation);
    EXPECT_FALSE(m.r[i]);
    EXPECT_FALSE(m.b[i]);
  }
}

TEST(PerUpdateMetrics, LoneUpdateServedImmediately) {
  auto inst = validate_instance({{Ratio(0), Ratio(1)}}, Ratio(2));
  Trace t;
  t.segments = {{1, Ratio(0), Ratio(1)}};
  t.completions = {{1, Ratio(1)}};
  auto m = per_update_metrics(t, inst);
  EXPECT_EQ(*m.b[1], Ratio(0));
  EXPECT_EQ(*m.w[1], Ratio(0));
  EXPECT_EQ(*m.d[1], Ratio(1));
  EXPECT_EQ(*m.nu[1], Ratio(1));
  EXPECT_EQ(m.nu_min[1], Ratio(1));
}

TEST(PerUpdateMetrics, UniversalOrderFactsOnRandomSchedules) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 500; ++k) {
    auto inst = random_instance(rng, 1 + rng() % 8);
    auto trace = random_schedule(inst, rng, false);
    auto m = per_update_metrics(trace, inst);
    for (UpdateIndex i = 1; i <= inst.size(); ++i) {
      const Ratio& g = inst.at(i).generation;
      if (m.b[i]) {
        EXPECT_GE(*m.b[i], g);
      }
      if (m.r[i]) {
        EXPECT_GE(*m.r[i], *m.b[i]);
        EXPECT_LE(*m.r[i], inst.horizon());
        EXPECT_EQ(*m.nu[i], *m.w[i] + *m.d[i]);
        EXPECT_GE(*m.nu[i], m.nu_min[i]);  // lower bound holds for any schedule
      }
    }
  }
}

TEST(Decomposition, ExactOnRandomCompletedSchedules) {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int k = 0; checked < 1000; ++k) {
    auto inst = random_instance(rng, 1 + rng() % 8, 8, 24, 12, Ratio(20));
    auto trace = random_schedule(inst, rng, true);
    auto m = per_update_metrics(trace, inst);
    if (!m.r[inst.size()]) continue;
    ++checked;
    auto rep = average_aoi(trace, inst);
    EXPECT_EQ(rep.integral, trapezoid_integral(trace, inst));
    Ratio sum;
    for (const auto& t : rep.terms) sum += t.value;
    EXPECT_EQ(rep.terms.size(), inst.size());
    EXPECT_EQ(rep.integral, sum + closed_form_tail(inst));
  }
}

TEST(Decomposition, HoldsWithNonzeroInitialAnchor) {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 200; ++k) {
    Ratio lambda0(-static_cast<long>(rng() % 9), 4);
    std::vector<RawUpdate> raw;
    for (int j = 0; j < 4; ++j)
      raw.push_back({Ratio(static_cast<long>(rng() % 12), 4), Ratio(static_cast<long>(rng() % 6 + 1), 4)});
    if (rng() % 2) lambda0 = min(Ratio(static_cast<long>(rng() % 4), 4), raw[0].generation);
    for (const auto& u : raw) lambda0 = min(lambda0, u.generation);
    auto inst = validate_instance(raw, Ratio(20), lambda0);
    auto trace = random_schedule(inst, rng, true);
    auto rep = average_aoi(trace, inst);
    EXPECT_EQ(rep.integral, trapezoid_integral(trace, inst));
    if (per_update_metrics(trace, inst).r[inst.size()]) {
      EXPECT_EQ(rep.tail, closed_form_tail(inst));
    }
  }
}

TEST(Integral, MonotoneInEachCompletionTime) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 300; ++k) {
    auto inst = random_instance(rng, 2 + rng() % 6, 8, 24, 6, Ratio(12));
    // Back-to-back delivery of a random increasing subset with slack.
    Chain chain;
    for (UpdateIndex i = 1; i <= inst.size(); ++i)
      if (rng() % 2) chain.push_back(i);
    Trace base = chain_schedule(chain, inst);
    if (base.segments.empty()) continue;
    std::size_t pick = rng() % base.segments.size();
    Ratio limit = pick + 1 < base.segments.size() ? base.segments[pick + 1].start : inst.horizon();
    Ratio slack = limit - base.segments[pick].end;
    if (slack.sign() <= 0) continue;
    Trace delayed = base;
    Ratio shift = slack * Ratio(static_cast<long>(rng() % 4 + 1), 4);
    delayed.segments[pick].start += shift;
    delayed.segments[pick].end += shift;
    delayed.completions[pick].time += shift;
    ASSERT_TRUE(validate_trace(delayed, inst).valid);
    EXPECT_GE(average_aoi(delayed, inst).integral, average_aoi(base, inst).integral);
  }
}
