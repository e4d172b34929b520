#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aoilab/error.hpp"
#include "aoilab/metrics.hpp"
#include "aoilab/oracle.hpp"
#include "aoilab/policies.hpp"

namespace aoilab {

struct Witness {
  UpdateIndex update = 0;  // 0 for checks over aggregates
  Ratio lhs;
  Ratio rhs;
  std::string note;
};

struct CheckReport {
  std::string check_id;
  std::string instance_id;
  bool passed = true;
  std::vector<Witness> witnesses;
  std::vector<UpdateIndex> skipped;

  void fail(UpdateIndex i, Ratio lhs, Ratio rhs, std::string note) {
    passed = false;
    witnesses.push_back({i, std::move(lhs), std::move(rhs), std::move(note)});
  }
};

/// nu_i >= nu_i^min for every update with a delivery at or after it by T.
inline CheckReport check_lemma2(const Trace& trace, const Instance& instance) {
  CheckReport rep{"lemma2", trace.instance_id, true, {}, {}};
  auto m = per_update_metrics(trace, instance);
  for (UpdateIndex i = 1; i <= instance.size(); ++i) {
    if (!m.nu[i]) {
      rep.skipped.push_back(i);
      continue;
    }
    if (*m.nu[i] < m.nu_min[i]) rep.fail(i, *m.nu[i], m.nu_min[i], "nu < nu_min");
  }
  return rep;
}

/// SRPT+ waiting and delivery times against the offline optimum:
/// w+_i <= 2 nu*_i per update, and sum delta_i d+_i <= 2 sum delta_i nu*_i
/// over the updates where both sides are defined.
inline CheckReport check_lemma4(const Instance& instance, const Trace& srpt_plus, const Trace& optimum) {
  CheckReport rep{"lemma4", srpt_plus.instance_id, true, {}, {}};
  auto plus = per_update_metrics(srpt_plus, instance);
  auto star = per_update_metrics(optimum, instance);
  Ratio lhs_sum, rhs_sum;
  for (UpdateIndex i = 1; i <= instance.size(); ++i) {
    if (plus.w[i] && star.nu[i]) {
      if (*plus.w[i] > Ratio(2) * *star.nu[i])
        rep.fail(i, *plus.w[i], Ratio(2) * *star.nu[i], "w+ > 2 nu*");
    }
    if (plus.d[i] && star.nu[i]) {
      lhs_sum += plus.delta[i] * *plus.d[i];
      rhs_sum += plus.delta[i] * *star.nu[i];
    } else {
      rep.skipped.push_back(i);
    }
  }
  if (lhs_sum > Ratio(2) * rhs_sum)
    rep.fail(0, lhs_sum, Ratio(2) * rhs_sum, "sum delta d+ > 2 sum delta nu*");
  return rep;
}

inline CheckReport check_lemma4(const Instance& instance, const OracleOptions& options = {}) {
  if (instance.size() > options.cap)
    throw Error(ErrorCode::InstanceTooLarge, "lemma4 needs the oracle; instance above cap");
  return check_lemma4(instance, simulate(instance, PolicyId::SrptPlus), optimal(instance, options).best_trace);
}

/// SRPT^L structure: (1) w_i <= nu_i^min (<= nu*_i when an optimum is given);
/// (2) every transmission starts on the latest generation seen so far;
/// (3) a started update i is settled at min(b_i + s_i, min_{g_j > g_i} g_j + s_j)
/// (undefined past T), and d_i <= nu_i^min.
inline CheckReport check_lemma5(const Instance& instance, const Trace& srpt_l,
                                const Trace* optimum = nullptr) {
  CheckReport rep{"lemma5", srpt_l.instance_id, true, {}, {}};
  const std::size_t n = instance.size();
  auto m = per_update_metrics(srpt_l, instance);
  std::optional<PerUpdateMetrics> star;
  if (optimum) star = per_update_metrics(*optimum, instance);

  for (UpdateIndex i = 1; i <= n; ++i) {
    if (!m.w[i]) {
      rep.skipped.push_back(i);
      continue;
    }
    if (*m.w[i] > m.nu_min[i]) rep.fail(i, *m.w[i], m.nu_min[i], "w > nu_min");
    if (star && star->nu[i] && m.nu_min[i] > *star->nu[i])
      rep.fail(i, m.nu_min[i], *star->nu[i], "nu_min > nu*");
  }

  std::vector<bool> started(n + 1, false);
  for (const auto& seg : srpt_l.segments) {
    const Ratio& g = instance.at(seg.update).generation;
    Ratio latest = g;
    for (const auto& u : instance.updates()) {
      if (u.generation > seg.start) break;
      latest = max(latest, u.generation);
    }
    if (g != latest) rep.fail(seg.update, g, latest, "started update is not the latest generated");
    started[seg.update] = true;
  }

  for (UpdateIndex i = 1; i <= n; ++i) {
    if (!started[i]) continue;
    const Update& u = instance.at(i);
    std::optional<Ratio> best;
    for (UpdateIndex j = i + 1; j <= n; ++j) {
      const Update& v = instance.at(j);
      if (v.generation <= u.generation) continue;
      Ratio c = v.generation + v.size;
      if (!best || c < *best) best = c;
    }
    Ratio expected = *m.b[i] + u.size;
    if (best) expected = min(expected, *best);
    if (expected <= instance.horizon()) {
      if (!m.r[i]) rep.fail(i, expected, instance.horizon(), "r undefined but predicted within T");
      else if (*m.r[i] != expected) rep.fail(i, *m.r[i], expected, "r != predicted settle time");
    } else if (m.r[i]) {
      rep.fail(i, *m.r[i], expected, "r defined but predicted beyond T");
    }
    if (m.d[i] && *m.d[i] > m.nu_min[i]) rep.fail(i, *m.d[i], m.nu_min[i], "d > nu_min");
  }
  return rep;
}

inline CheckReport check_lemma5(const Instance& instance, const OracleOptions* options) {
  auto trace = simulate(instance, PolicyId::SrptL);
  if (!options) return check_lemma5(instance, trace);
  if (instance.size() > options->cap)
    throw Error(ErrorCode::InstanceTooLarge, "lemma5 nu* comparison needs the oracle; instance above cap");
  auto opt = optimal(instance, *options);
  return check_lemma5(instance, trace, &opt.best_trace);
}

/// Exact finite-horizon decomposition:
/// integral = sum(delta^2/2 + delta nu) + (T - g_R)^2/2 - lambda0^2/2.
/// Traces leaving some update without a later delivery are skipped.
inline CheckReport check_decomposition(const Trace& trace, const Instance& instance) {
  CheckReport rep{"decomposition", trace.instance_id, true, {}, {}};
  auto report = average_aoi(trace, instance);
  auto m = per_update_metrics(trace, instance);
  for (UpdateIndex i = 1; i <= instance.size(); ++i)
    if (!m.nu[i]) rep.skipped.push_back(i);
  if (!rep.skipped.empty()) return rep;
  Ratio sum;
  for (const auto& t : report.terms) sum += t.value;
  Ratio rhs = sum + closed_form_tail(instance);
  if (report.integral != rhs) rep.fail(0, report.integral, rhs, "integral != terms + closed-form tail");
  return rep;
}

/// Ratio of the policy's age integral to the offline optimum's on [0, T].
inline Ratio competitive_ratio(const Ratio& policy_integral, const Ratio& optimal_integral) {
  if (optimal_integral.sign() <= 0)
    throw Error(ErrorCode::DegenerateOptimal, "optimal age integral is " + optimal_integral.str());
  return policy_integral / optimal_integral;
}

inline Ratio competitive_ratio(const Instance& instance, PolicyId policy,
                               OracleMethod method = OracleMethod::Auto, const OracleOptions& options = {}) {
  auto opt = solve_offline(instance, method, options);
  auto rep = average_aoi(simulate(instance, policy), instance);
  return competitive_ratio(rep.integral, opt.best_report.integral);
}

/// Theorem constant for the paper's policies; none for baselines.
inline std::optional<Ratio> ratio_ceiling(PolicyId policy) {
  switch (policy) {
    case PolicyId::SrptPlus: return Ratio(4);
    case PolicyId::SrptL: return Ratio(29);
    default: return std::nullopt;
  }
}

}  // namespace aoilab
