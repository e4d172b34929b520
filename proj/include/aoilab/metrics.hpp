#pragma once

#include <optional>
#include <vector>

#include "aoilab/error.hpp"
#include "aoilab/model.hpp"
#include "aoilab/ratio.hpp"

namespace aoilab {

/// Piecewise-linear age curve. On [breakpoints[k].time, breakpoints[k+1].time)
/// the age is t - breakpoints[k].lambda.
struct AoiTrajectory {
  struct Breakpoint {
    Ratio time;
    Ratio lambda;
    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
  };

  std::vector<Breakpoint> breakpoints;
  Ratio start_time;
  Ratio end_time;

  /// Freshest delivered generation at time t (right-continuous).
  Ratio lambda_at(const Ratio& t) const {
    Ratio lambda = breakpoints.front().lambda;
    for (const auto& bp : breakpoints) {
      if (bp.time > t) break;
      lambda = bp.lambda;
    }
    return lambda;
  }

  Ratio age_at(const Ratio& t) const { return t - lambda_at(t); }
};

namespace detail {

inline void require_valid(const Trace& trace, const Instance& instance) {
  auto check = validate_trace(trace, instance);
  if (!check.valid) {
    const auto& v = check.violations.front();
    throw Error(ErrorCode::InvalidTrace,
                std::string(to_string(v.kind)) + " (update " + std::to_string(v.update) + "): " + v.detail);
  }
}

// Area under t - lambda for t in [lo, hi].
inline Ratio ramp_area(const Ratio& lo, const Ratio& hi, const Ratio& lambda) {
  Ratio a = lo - lambda;
  Ratio b = hi - lambda;
  return (b * b - a * a) / Ratio(2);
}

}  // namespace detail

inline AoiTrajectory trajectory_from_trace(const Trace& trace, const Instance& instance) {
  detail::require_valid(trace, instance);
  AoiTrajectory traj;
  traj.start_time = Ratio(0);
  traj.end_time = instance.horizon();
  Ratio lambda = instance.initial_generation();
  traj.breakpoints.push_back({Ratio(0), lambda});
  for (const auto& c : trace.completions) {
    const Ratio& g = instance.at(c.update).generation;
    if (g > lambda) {
      lambda = g;
      traj.breakpoints.push_back({c.time, lambda});
    }
  }
  return traj;
}

/// Exact area under the age curve on [from, to].
inline Ratio integrate(const AoiTrajectory& traj, const Ratio& from, const Ratio& to) {
  if (from < traj.start_time || to > traj.end_time || from > to)
    throw Error(ErrorCode::RangeOutOfBounds,
                "[" + from.str() + ", " + to.str() + "] outside [" + traj.start_time.str() + ", " +
                    traj.end_time.str() + "]");
  Ratio area;
  const auto& bps = traj.breakpoints;
  for (std::size_t k = 0; k < bps.size(); ++k) {
    const Ratio& piece_lo = bps[k].time;
    const Ratio& piece_hi = k + 1 < bps.size() ? bps[k + 1].time : traj.end_time;
    Ratio lo = max(piece_lo, from);
    Ratio hi = min(piece_hi, to);
    if (lo < hi) area += detail::ramp_area(lo, hi, bps[k].lambda);
  }
  return area;
}

/// Per-update quantities. Vectors are indexed by update index (slot 0 unused).
struct PerUpdateMetrics {
  std::vector<Ratio> delta;
  std::vector<std::optional<Ratio>> b;
  std::vector<std::optional<Ratio>> r;
  std::vector<std::optional<Ratio>> w;
  std::vector<std::optional<Ratio>> d;
  std::vector<std::optional<Ratio>> nu;
  std::vector<Ratio> nu_min;

  std::size_t size() const { return delta.empty() ? 0 : delta.size() - 1; }
};

inline PerUpdateMetrics per_update_metrics(const Trace& trace, const Instance& instance) {
  detail::require_valid(trace, instance);
  const std::size_t n = instance.size();
  PerUpdateMetrics m;
  m.delta.resize(n + 1);
  m.b.resize(n + 1);
  m.r.resize(n + 1);
  m.w.resize(n + 1);
  m.d.resize(n + 1);
  m.nu.resize(n + 1);
  m.nu_min.resize(n + 1);

  std::vector<std::optional<Ratio>> first_start(n + 1), done(n + 1);
  for (const auto& s : trace.segments)
    if (!first_start[s.update] || s.start < *first_start[s.update]) first_start[s.update] = s.start;
  for (const auto& c : trace.completions) done[c.update] = c.time;

  // Suffix minima over {j : g_j >= g_i}. Updates sharing a generation form
  // one group, so tie-mates see each other whatever their index.
  std::optional<Ratio> b_suffix, r_suffix;
  std::optional<Ratio> earliest_possible;
  auto keep_min = [](std::optional<Ratio>& acc, const std::optional<Ratio>& x) {
    if (x && (!acc || *x < *acc)) acc = x;
  };
  for (UpdateIndex hi = n; hi >= 1;) {
    UpdateIndex lo = hi;
    while (lo > 1 && instance.at(lo - 1).generation == instance.at(hi).generation) --lo;
    for (UpdateIndex j = lo; j <= hi; ++j) {
      keep_min(b_suffix, first_start[j]);
      keep_min(r_suffix, done[j]);
      keep_min(earliest_possible, instance.at(j).generation + instance.at(j).size);
    }
    for (UpdateIndex i = lo; i <= hi; ++i) {
      const Ratio& g = instance.at(i).generation;
      m.delta[i] = g - instance.generation(i - 1);
      m.nu_min[i] = *earliest_possible - g;
      m.b[i] = b_suffix;
      m.r[i] = r_suffix;
      if (b_suffix) m.w[i] = *b_suffix - g;
      if (r_suffix) {
        m.nu[i] = *r_suffix - g;
        // r defined implies some j in the suffix was served, so b is too.
        m.d[i] = *r_suffix - *b_suffix;
      }
    }
    hi = lo - 1;
  }
  return m;
}

struct AoiTerm {
  UpdateIndex update = 0;
  Ratio value;  // delta^2 / 2 + delta * nu
};

struct AoiReport {
  Ratio horizon;
  Ratio integral;
  Ratio average;
  std::vector<AoiTerm> terms;
  Ratio tail;
  std::size_t completions = 0;
};

/// Residual area once every update has a completion at or after it by T:
/// (T - g_R)^2 / 2 - lambda0^2 / 2, where g_R is the last generation.
inline Ratio closed_form_tail(const Instance& instance) {
  const Ratio& last = instance.generation(instance.size());
  Ratio tail_ramp = instance.horizon() - last;
  const Ratio& anchor = instance.initial_generation();
  return (tail_ramp * tail_ramp - anchor * anchor) / Ratio(2);
}

inline AoiReport average_aoi(const Trace& trace, const Instance& instance) {
  auto traj = trajectory_from_trace(trace, instance);
  auto metrics = per_update_metrics(trace, instance);
  AoiReport rep;
  rep.horizon = instance.horizon();
  rep.integral = integrate(traj, Ratio(0), instance.horizon());
  rep.average = rep.integral / instance.horizon();
  rep.completions = trace.completions.size();
  Ratio sum;
  for (UpdateIndex i = 1; i <= instance.size(); ++i) {
    if (!metrics.nu[i]) continue;
    const Ratio& delta = metrics.delta[i];
    Ratio term = delta * delta / Ratio(2) + delta * *metrics.nu[i];
    sum += term;
    rep.terms.push_back({i, std::move(term)});
  }
  rep.tail = rep.integral - sum;
  return rep;
}

}  // namespace aoilab
