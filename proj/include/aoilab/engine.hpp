#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aoilab/error.hpp"
#include "aoilab/model.hpp"
#include "aoilab/ratio.hpp"

namespace aoilab {

/// An arrived, incomplete update as seen by a causal policy.
struct KnownUpdate {
  UpdateIndex index = 0;
  Ratio generation;
  Ratio remaining;
};

/// Everything a causal policy may look at when it is consulted.
/// Nothing here depends on updates generated after `now`.
struct CausalState {
  Ratio now;
  Ratio lambda;
  /// Largest generation among all updates arrived so far (complete or not).
  std::optional<Ratio> latest_generation;
  /// Number of updates delivered so far.
  std::size_t delivered = 0;
  std::optional<KnownUpdate> in_service;
  /// Arrived, incomplete, not in service; ascending index.
  std::vector<KnownUpdate> pending;
  /// Updates generated exactly at `now`; ascending index, all in `pending`.
  std::vector<UpdateIndex> newly_arrived;

  const KnownUpdate* find_pending(UpdateIndex i) const {
    for (const auto& u : pending)
      if (u.index == i) return &u;
    return nullptr;
  }
};

struct Decision {
  std::optional<UpdateIndex> transmit;

  static Decision idle() { return {}; }
  static Decision send(UpdateIndex i) { return {i}; }
  bool is_idle() const { return !transmit.has_value(); }

  friend bool operator==(const Decision&, const Decision&) = default;
};

using Policy = std::function<Decision(const CausalState&)>;

/// Event-driven run of `policy` over [0, T].
///
/// Same-time events: the in-service completion is applied first, then all
/// arrivals at that instant, then the policy is consulted once. Between
/// consultations the decision is held. Work in progress at T is discarded.
inline Trace simulate(const Instance& instance, const Policy& policy) {
  const std::size_t n = instance.size();
  const Ratio& horizon = instance.horizon();

  std::vector<Ratio> remaining(n + 1);
  std::vector<bool> done(n + 1, false);
  for (UpdateIndex i = 1; i <= n; ++i) remaining[i] = instance.at(i).size;

  Trace trace;
  Ratio now(0);
  Ratio lambda = instance.initial_generation();
  std::optional<Ratio> latest;
  std::size_t arrived = 0;
  std::optional<UpdateIndex> current;
  Ratio segment_start;

  auto close_segment = [&](const Ratio& t) {
    if (current && segment_start < t) trace.segments.push_back({*current, segment_start, t});
  };
  auto complete_if_done = [&]() {
    if (current && remaining[*current].is_zero()) {
      close_segment(now);
      done[*current] = true;
      trace.completions.push_back({*current, now});
      lambda = max(lambda, instance.at(*current).generation);
      current.reset();
    }
  };

  for (;;) {
    complete_if_done();

    CausalState state;
    while (arrived < n && instance.updates()[arrived].generation <= now) {
      const Update& u = instance.updates()[arrived++];
      state.newly_arrived.push_back(u.index);
      latest = u.generation;
    }
    state.now = now;
    state.lambda = lambda;
    state.latest_generation = latest;
    state.delivered = trace.completions.size();
    for (UpdateIndex i = 1; i <= arrived; ++i) {
      if (done[i]) continue;
      KnownUpdate known{i, instance.at(i).generation, remaining[i]};
      if (current && *current == i)
        state.in_service = std::move(known);
      else
        state.pending.push_back(std::move(known));
    }

    Decision decision = policy(state);
    if (decision.transmit) {
      UpdateIndex j = *decision.transmit;
      if (j == 0 || j > arrived || done[j])
        throw Error(ErrorCode::PolicyProtocolViolation,
                    "policy chose update " + std::to_string(j) + " at t=" + now.str() +
                        ", which is not an arrived incomplete update");
      if (!current || *current != j) {
        close_segment(now);
        current = j;
        segment_start = now;
      }
    } else {
      close_segment(now);
      current.reset();
    }

    Ratio next = horizon;
    if (arrived < n) next = min(next, instance.updates()[arrived].generation);
    if (current) next = min(next, now + remaining[*current]);
    if (current) remaining[*current] -= next - now;
    now = next;
    if (now == horizon) {
      complete_if_done();
      close_segment(horizon);
      break;
    }
  }
  return trace;
}

}  // namespace aoilab
