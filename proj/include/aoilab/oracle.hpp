#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "aoilab/error.hpp"
#include "aoilab/metrics.hpp"
#include "aoilab/model.hpp"

namespace aoilab {

/// Increasing list of update indices delivered back to back by the oracle.
using Chain = std::vector<UpdateIndex>;

struct OracleResult {
  Chain chain;
  Trace best_trace;
  AoiReport best_report;
  std::uint64_t chains_examined = 0;
};

struct OracleOptions {
  std::size_t cap = 20;
  unsigned jobs = 1;
};

/// Non-preemptive, as-early-as-possible delivery of `chain` in order.
/// Elements from the first one that would finish after T onward are dropped.
inline Trace chain_schedule(const Chain& chain, const Instance& instance) {
  Trace trace;
  std::optional<Ratio> last;
  std::optional<UpdateIndex> prev;
  for (UpdateIndex i : chain) {
    if (i == 0 || i > instance.size() || (prev && i <= *prev))
      throw Error(ErrorCode::InvalidSpecParams, "chain must list increasing valid indices");
    prev = i;
    const Update& u = instance.at(i);
    Ratio start = last ? max(*last, u.generation) : u.generation;
    Ratio end = start + u.size;
    if (end > instance.horizon()) break;
    trace.segments.push_back({i, start, end});
    trace.completions.push_back({i, end});
    last = end;
  }
  return trace;
}

namespace detail {

// Area under lambda(t) is maximized instead of the age area minimized:
// integral of age over [0, T] = T^2/2 - integral of lambda.
struct ChainSearch {
  const Instance& inst;
  Chain current;
  Chain best;
  Ratio best_value;
  bool have_best = false;
  std::uint64_t examined = 0;

  void visit(const Ratio& value) {
    ++examined;
    if (!have_best || value > best_value) {
      best_value = value;
      best = current;
      have_best = true;
    }
  }

  // `c` is the last completion (none yet when `started` is false),
  // `held` the integral of lambda over [0, c].
  void expand(UpdateIndex from, bool started, const Ratio& c, const Ratio& lambda, const Ratio& held) {
    const std::size_t n = inst.size();
    const Ratio& horizon = inst.horizon();
    for (UpdateIndex j = from; j <= n; ++j) {
      const Update& u = inst.at(j);
      Ratio start = started ? max(c, u.generation) : u.generation;
      Ratio end = start + u.size;
      // Chains continuing through j are either truncated back to the prefix
      // or deliver a stale update, which only delays what follows.
      if (end > horizon || u.generation <= lambda) {
        examined += std::uint64_t{1} << (n - j);
        continue;
      }
      Ratio next_held = held + lambda * (end - (started ? c : Ratio(0)));
      Ratio next_lambda = max(lambda, u.generation);
      current.push_back(j);
      visit(next_held + next_lambda * (horizon - end));
      expand(j + 1, true, end, next_lambda, next_held);
      current.pop_back();
    }
  }
};

inline OracleResult finish(Chain chain, const Instance& instance, std::uint64_t examined) {
  OracleResult out;
  out.chain = std::move(chain);
  out.best_trace = chain_schedule(out.chain, instance);
  out.best_report = average_aoi(out.best_trace, instance);
  out.chains_examined = examined;
  return out;
}

}  // namespace detail

/// Offline optimum by exhaustive enumeration of all 2^n chains. Chains that
/// deliver an update no fresher than the current lambda are dominated and
/// counted without being scored. Ties among the rest go to the
/// lexicographically smallest chain.
inline OracleResult optimal(const Instance& instance, const OracleOptions& options = {}) {
  const std::size_t n = instance.size();
  if (n > options.cap || n >= 63)
    throw Error(ErrorCode::InstanceTooLarge,
                std::to_string(n) + " updates exceed the enumeration cap of " +
                    std::to_string(options.cap) + " (raise it with --cap)");
  const Ratio& lambda0 = instance.initial_generation();
  const Ratio base = lambda0 * instance.horizon();

  // Subtrees rooted at each first element are independent; merging them in
  // index order reproduces the sequential lexicographic tie rule.
  auto root = [&](UpdateIndex first) {
    detail::ChainSearch search{instance, {}, {}, {}};
    search.expand(first, false, Ratio(0), lambda0, Ratio(0));
    return search;
  };
  auto subtree = [&](UpdateIndex first) {
    detail::ChainSearch search{instance, {}, {}, {}};
    const Update& u = instance.at(first);
    Ratio end = u.generation + u.size;
    if (end > instance.horizon() || u.generation <= lambda0) {
      search.examined = std::uint64_t{1} << (n - first);
      return search;
    }
    Ratio held = lambda0 * end;
    Ratio lambda = max(lambda0, u.generation);
    search.current.push_back(first);
    search.visit(held + lambda * (instance.horizon() - end));
    search.expand(first + 1, true, end, lambda, held);
    return search;
  };

  Chain best;
  Ratio best_value = base;
  std::uint64_t examined = 1;  // the empty chain
  if (options.jobs <= 1) {
    auto all = root(1);
    examined += all.examined;
    if (all.have_best && all.best_value > best_value) best = all.best;
  } else {
    std::vector<std::optional<detail::ChainSearch>> parts(n + 1);
    std::atomic<UpdateIndex> next{1};
    auto worker = [&] {
      for (UpdateIndex first; (first = next.fetch_add(1)) <= n;) parts[first].emplace(subtree(first));
    };
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < std::min<std::size_t>(options.jobs, n); ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (UpdateIndex first = 1; first <= n; ++first) {
      const auto& s = *parts[first];
      examined += s.examined;
      if (s.have_best && s.best_value > best_value) {
        best_value = s.best_value;
        best = s.best;
      }
    }
  }
  return detail::finish(std::move(best), instance, examined);
}

/// Offline optimum over the same chain space by dynamic programming.
///
/// States are (last chain element, its completion time c, area under lambda
/// up to c). For a fixed last element e, (c1, A1) dominates (c2, A2) when
/// c1 <= c2 and A1 - g_e c1 >= A2 - g_e c2, so only that Pareto frontier is
/// expanded. Chain elements that cannot raise lambda are never added.
inline OracleResult optimal_frontier(const Instance& instance) {
  struct State {
    Ratio completion;
    Ratio held;
    UpdateIndex parent_element;
    std::size_t parent_state;
  };
  const std::size_t n = instance.size();
  const Ratio& horizon = instance.horizon();
  const Ratio& lambda0 = instance.initial_generation();
  std::vector<std::vector<State>> frontier(n + 1);
  frontier[0].push_back({Ratio(0), Ratio(0), 0, 0});

  auto level = [&](UpdateIndex e) -> const Ratio& {
    return e == 0 ? lambda0 : instance.at(e).generation;
  };

  std::uint64_t examined = 0;
  std::optional<Ratio> best_value;
  UpdateIndex best_element = 0;
  std::size_t best_state = 0;

  for (UpdateIndex e = 0; e <= n; ++e) {
    auto& states = frontier[e];
    const Ratio& lambda = level(e);
    if (e > 0 && !states.empty()) {
      std::vector<std::size_t> idx(states.size());
      for (std::size_t k = 0; k < states.size(); ++k) idx[k] = k;
      std::vector<Ratio> key(states.size());
      for (std::size_t k = 0; k < states.size(); ++k)
        key[k] = states[k].held - lambda * states[k].completion;
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (states[a].completion != states[b].completion)
          return states[a].completion < states[b].completion;
        return key[a] > key[b];
      });
      std::vector<State> kept;
      std::optional<Ratio> best_key;
      for (std::size_t k : idx) {
        if (!best_key || key[k] > *best_key) {
          best_key = key[k];
          kept.push_back(std::move(states[k]));
        }
      }
      states = std::move(kept);
    }
    for (std::size_t k = 0; k < states.size(); ++k) {
      const State& s = states[k];
      ++examined;
      Ratio value = s.held + lambda * (horizon - s.completion);
      if (!best_value || value > *best_value) {
        best_value = value;
        best_element = e;
        best_state = k;
      }
      for (UpdateIndex j = e + 1; j <= n; ++j) {
        const Update& u = instance.at(j);
        if (u.generation <= lambda) continue;
        Ratio start = e == 0 ? u.generation : max(s.completion, u.generation);
        Ratio end = start + u.size;
        if (end > horizon) continue;
        frontier[j].push_back({end, s.held + lambda * (end - s.completion), e, k});
      }
    }
  }

  Chain chain;
  for (UpdateIndex e = best_element; e != 0;) {
    chain.push_back(e);
    const State& s = frontier[e][best_state];
    e = s.parent_element;
    best_state = s.parent_state;
  }
  std::reverse(chain.begin(), chain.end());
  return detail::finish(std::move(chain), instance, examined);
}

enum class OracleMethod { Auto, Enumerate, Frontier };

/// Enumeration within the cap, the frontier program above it (Auto).
inline OracleResult solve_offline(const Instance& instance, OracleMethod method,
                                  const OracleOptions& options = {}) {
  switch (method) {
    case OracleMethod::Enumerate: return optimal(instance, options);
    case OracleMethod::Frontier: return optimal_frontier(instance);
    case OracleMethod::Auto:
      return instance.size() <= options.cap ? optimal(instance, options) : optimal_frontier(instance);
  }
  throw Error(ErrorCode::InvalidSpecParams, "unknown oracle method");
}

struct MicroValidation {
  bool passed = false;
  Ratio lattice_best;  // least age integral over all lattice schedules
  Ratio oracle;        // integral of optimal()
  std::size_t peak_states = 0;

  explicit operator bool() const { return passed; }
};

/// Exhaustive search over every preemptive schedule on the 1/grid time
/// lattice (each slot serves one arrived update or idles). Passes when no
/// lattice schedule beats the chain-enumeration optimum.
inline MicroValidation micro_validate(const Instance& instance, std::int64_t grid,
                                      std::size_t state_cap = 4'000'000) {
  const std::size_t n = instance.size();
  if (n > 6) throw Error(ErrorCode::InstanceTooLarge, "lattice search supports at most 6 updates");
  if (grid <= 0) throw Error(ErrorCode::InvalidSpecParams, "grid must be positive");
  auto units = [&](const Ratio& x, const char* what) -> std::int64_t {
    Ratio scaled = x * Ratio(grid);
    if (scaled.denominator() != 1)
      throw Error(ErrorCode::InvalidSpecParams,
                  std::string(what) + " " + x.str() + " is not a multiple of 1/" + std::to_string(grid));
    if (!scaled.numerator().fits_slong_p() || abs(scaled.numerator()) > 60000)
      throw Error(ErrorCode::GridTooFine, std::string(what) + " too large for the lattice");
    return scaled.numerator().get_si();
  };
  const std::int64_t slots = units(instance.horizon(), "horizon");
  const std::int64_t anchor = units(instance.initial_generation(), "initial generation");
  std::vector<std::int64_t> gen(n), size(n);
  for (std::size_t i = 0; i < n; ++i) {
    gen[i] = units(instance.updates()[i].generation, "generation");
    size[i] = units(instance.updates()[i].size, "size");
  }

  // State: freshest delivered update (0 = anchor) + remaining units of each
  // update; updates that can no longer raise lambda are zeroed.
  using Key = std::basic_string<std::uint16_t>;
  auto level = [&](std::uint16_t who) { return who == 0 ? anchor : gen[who - 1]; };
  auto canonical = [&](Key& k) {
    std::int64_t lam = level(k[0]);
    for (std::size_t i = 0; i < n; ++i)
      if (gen[i] <= lam) k[i + 1] = 0;
  };

  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<std::string_view>{}(
          std::string_view(reinterpret_cast<const char*>(k.data()), k.size() * sizeof(std::uint16_t)));
    }
  };
  std::unordered_map<Key, std::int64_t, KeyHash> layer, next;
  Key init(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) init[i + 1] = static_cast<std::uint16_t>(size[i]);
  canonical(init);
  layer.emplace(init, 0);
  std::size_t peak = 1;

  for (std::int64_t slot = 0; slot < slots; ++slot) {
    next.clear();
    for (const auto& [key, held] : layer) {
      std::int64_t lam = level(key[0]);
      auto relax = [&](Key k) {
        canonical(k);
        auto [it, fresh] = next.emplace(std::move(k), held + lam);
        if (!fresh && it->second < held + lam) it->second = held + lam;
      };
      relax(key);  // idle
      for (std::size_t i = 0; i < n; ++i) {
        if (key[i + 1] == 0 || gen[i] > slot) continue;
        Key k = key;
        if (--k[i + 1] == 0) k[0] = static_cast<std::uint16_t>(i + 1);
        relax(std::move(k));
      }
    }
    layer.swap(next);
    peak = std::max(peak, layer.size());
    if (peak > state_cap)
      throw Error(ErrorCode::GridTooFine, "lattice state space exceeds " + std::to_string(state_cap));
  }

  std::int64_t best_held = 0;
  bool first = true;
  for (const auto& [key, held] : layer) {
    if (first || held > best_held) best_held = held;
    first = false;
  }
  MicroValidation out;
  const Ratio& horizon = instance.horizon();
  out.lattice_best = horizon * horizon / Ratio(2) - Ratio(best_held) / Ratio(grid * grid);
  out.oracle = optimal(instance).best_report.integral;
  out.peak_states = peak;
  out.passed = out.lattice_best >= out.oracle;
  return out;
}

}  // namespace aoilab
