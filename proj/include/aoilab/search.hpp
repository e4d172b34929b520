#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "aoilab/generators.hpp"
#include "aoilab/harness.hpp"

namespace aoilab {

struct SearchOptions {
  Ratio g_max{4};
  Ratio s_max{2};
  unsigned bits = 6;
  /// Non-improving steps before restarting from a new random instance; 0 never restarts.
  std::uint64_t patience = 300;
  OracleMethod method = OracleMethod::Auto;
  OracleOptions oracle;
  /// Called with every evaluated instance and its ratio.
  std::function<void(const Instance&, const Ratio&)> on_evaluate;
};

struct SearchResult {
  Instance instance;
  Ratio ratio;
  std::uint64_t evaluations = 0;
  std::uint64_t accepted = 0;
};

/// Randomized hill climb for instances on which `policy` does badly against
/// the offline optimum. Each step moves one generation or size of the current
/// instance by a dyadic amount, or copies another update's size onto it, and
/// keeps the move only if the ratio grows. After `patience` steps without
/// progress the climb restarts from a fresh random instance; the best
/// instance over all restarts is returned.
inline SearchResult adversarial_search(PolicyId policy, std::size_t n, std::uint64_t budget,
                                       std::uint64_t seed, const SearchOptions& options = {}) {
  SearchResult out;
  auto score = [&](const Instance& inst) {
    Ratio r = competitive_ratio(inst, policy, options.method, options.oracle);
    ++out.evaluations;
    if (options.on_evaluate) options.on_evaluate(inst, r);
    return r;
  };
  auto fresh = [&](std::uint64_t s) {
    return generate(gen::RandomUniform{n, options.g_max, options.s_max, s, std::nullopt, options.bits});
  };
  out.instance = fresh(seed);
  out.ratio = score(out.instance);
  if (n == 0) return out;

  DyadicRng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const Ratio horizon = out.instance.horizon();
  const Ratio top_g = horizon - horizon / Ratio(1L << options.bits);
  const Ratio step_floor = Ratio(1) / Ratio(1L << options.bits);
  const Ratio scales[] = {Ratio(1, 8), Ratio(1, 2), Ratio(2)};

  Instance current = out.instance;
  Ratio current_ratio = out.ratio;
  std::uint64_t stale = 0;
  for (std::uint64_t it = 0; it < budget; ++it) {
    if (options.patience > 0 && stale >= options.patience) {
      current = fresh(rng.bits(32) << 32 | rng.bits(32));
      current_ratio = score(current);
      stale = 0;
      if (++it >= budget) break;
    }
    auto raw = current.raw();
    auto& victim = raw[rng.below(raw.size())];
    const auto move = rng.below(7);
    if (move < 2) {
      Ratio shift = scales[rng.below(3)] * (Ratio(2) * rng.unit(options.bits) - Ratio(1));
      victim.generation = min(max(victim.generation + shift, Ratio(0)), top_g);
    } else if (move < 4) {
      Ratio shift = scales[rng.below(3)] * (Ratio(2) * rng.unit(options.bits) - Ratio(1));
      victim.size = max(victim.size + shift, step_floor);
    } else if (move == 4) {
      victim.size = raw[rng.below(raw.size())].size;
    } else if (move == 5) {
      // Cluster next to another update.
      Ratio g = raw[rng.below(raw.size())].generation + step_floor * Ratio(static_cast<long>(rng.below(3)) - 1);
      victim.generation = min(max(g, Ratio(0)), top_g);
    } else {
      Ratio factor = rng.bits(1) ? Ratio(9, 8) : Ratio(7, 8);
      for (auto& u : raw) u.size = max(u.size * factor, step_floor);
    }
    Instance candidate = validate_instance(std::move(raw), horizon, current.initial_generation());
    Ratio r = score(candidate);
    if (r > current_ratio) {
      current = std::move(candidate);
      current_ratio = std::move(r);
      ++out.accepted;
      stale = 0;
      if (current_ratio > out.ratio) {
        out.instance = current;
        out.ratio = current_ratio;
      }
    } else {
      ++stale;
    }
  }
  return out;
}

}  // namespace aoilab
