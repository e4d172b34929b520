#pragma once

// Test-only helpers: independent reference computations and random
// schedule builders. Nothing here calls the code paths it is used to check.

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "aoilab/aoilab.hpp"

namespace aoilab::testing {

inline Ratio R(const char* text) { return Ratio::parse(text); }

/// Age integral over [0, T] from the completion list alone: sort every
/// instant where the age curve can kink, evaluate lambda by scanning all
/// completions at each piece's midpoint, and sum trapezoids.
inline Ratio trapezoid_integral(const Trace& trace, const Instance& inst) {
  std::vector<Ratio> cuts{Ratio(0), inst.horizon()};
  for (const auto& c : trace.completions) cuts.push_back(c.time);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  Ratio area;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const Ratio& a = cuts[k];
    const Ratio& b = cuts[k + 1];
    Ratio mid = (a + b) / Ratio(2);
    Ratio lambda = inst.initial_generation();
    for (const auto& c : trace.completions)
      if (c.time <= mid) lambda = max(lambda, inst.at(c.update).generation);
    Ratio left = a - lambda;
    Ratio right = b - lambda;
    area += (left + right) / Ratio(2) * (b - a);
  }
  return area;
}

/// Random feasible preemptive schedule. With `finish_last`, the last
/// update is always served to completion (the horizon must allow it).
inline Trace random_schedule(const Instance& inst, std::mt19937_64& rng, bool finish_last) {
  const std::size_t n = inst.size();
  std::vector<Ratio> remaining(n + 1);
  for (UpdateIndex i = 1; i <= n; ++i) remaining[i] = inst.at(i).size;
  Trace trace;
  Ratio now(0);
  auto emit = [&](UpdateIndex i, const Ratio& len) {
    if (!trace.segments.empty() && trace.segments.back().update == i && trace.segments.back().end == now)
      trace.segments.back().end = now + len;
    else
      trace.segments.push_back({i, now, now + len});
    now += len;
    remaining[i] -= len;
    if (remaining[i].is_zero()) trace.completions.push_back({i, now});
  };
  for (int step = 0; step < 4 * static_cast<int>(n) + 4 && now < inst.horizon(); ++step) {
    std::vector<UpdateIndex> ready;
    for (UpdateIndex i = 1; i <= n; ++i)
      if (inst.at(i).generation <= now && remaining[i].sign() > 0) ready.push_back(i);
    std::optional<Ratio> next_arrival;
    for (const auto& u : inst.updates())
      if (u.generation > now) {
        next_arrival = u.generation;
        break;
      }
    if (ready.empty() || rng() % 4 == 0) {
      if (!next_arrival) break;
      Ratio gap = *next_arrival - now;
      Ratio wait = gap * Ratio(static_cast<long>(rng() % 4 + 1), 4);
      now = min(now + wait, inst.horizon());
      continue;
    }
    UpdateIndex pick = ready[rng() % ready.size()];
    Ratio len = remaining[pick];
    if (rng() % 2 == 0) len = len * Ratio(static_cast<long>(rng() % 3 + 1), 4);
    if (now + len > inst.horizon()) len = inst.horizon() - now;
    if (len.sign() <= 0) break;
    emit(pick, len);
  }
  if (finish_last && n > 0 && remaining[n].sign() > 0) {
    now = max(now, inst.at(n).generation);
    if (now + remaining[n] <= inst.horizon()) emit(n, remaining[n]);
  }
  return trace;
}

inline Instance random_instance(std::mt19937_64& rng, std::size_t n, long g_den = 8, long span = 24,
                                long size_max = 12, Ratio horizon_pad = Ratio(0)) {
  std::vector<RawUpdate> raw;
  Ratio total;
  for (std::size_t k = 0; k < n; ++k) {
    Ratio g(static_cast<long>(rng() % span), g_den);
    Ratio s(static_cast<long>(rng() % size_max + 1), g_den);
    total += s;
    raw.push_back({g, s});
  }
  Ratio horizon = Ratio(span, g_den) + horizon_pad;
  if (horizon_pad.is_zero()) horizon += Ratio(size_max, g_den);
  return validate_instance(std::move(raw), horizon);
}

}  // namespace aoilab::testing
