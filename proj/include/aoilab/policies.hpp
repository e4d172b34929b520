#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aoilab/engine.hpp"
#include "aoilab/error.hpp"

namespace aoilab {

enum class PolicyId { SrptPlus, SrptL, Srpt, Fcfs, NonPreemptiveLatest };

inline constexpr std::array<PolicyId, 5> kAllPolicies = {
    PolicyId::SrptPlus, PolicyId::SrptL, PolicyId::Srpt, PolicyId::Fcfs,
    PolicyId::NonPreemptiveLatest};

constexpr std::string_view policy_name(PolicyId id) {
  switch (id) {
    case PolicyId::SrptPlus: return "srpt-plus";
    case PolicyId::SrptL: return "srpt-l";
    case PolicyId::Srpt: return "srpt";
    case PolicyId::Fcfs: return "fcfs";
    case PolicyId::NonPreemptiveLatest: return "non-preemptive-latest";
  }
  return "?";
}

inline std::string policy_names() {
  std::string out;
  for (auto id : kAllPolicies) {
    if (!out.empty()) out += ", ";
    out += policy_name(id);
  }
  return out;
}

inline PolicyId parse_policy(std::string_view name) {
  for (auto id : kAllPolicies)
    if (policy_name(id) == name) return id;
  throw Error(ErrorCode::UnknownPolicy,
              "unknown policy '" + std::string(name) + "'; valid ids: " + policy_names());
}

/// AoI reduction per unit of remaining transmission time:
/// max(g - lambda, 0) / remaining.
inline Ratio gamma_index(const Ratio& generation, const Ratio& remaining, const Ratio& lambda) {
  Ratio gain = generation - lambda;
  if (gain.sign() <= 0) return Ratio(0);
  return gain / remaining;
}

namespace detail {

// Tie-break chain shared by all policies: larger key, then later generation,
// then smaller remaining size, then lower index.
template <typename KeyFn>
std::optional<KnownUpdate> pick_best(const std::vector<const KnownUpdate*>& candidates, KeyFn key) {
  const KnownUpdate* best = nullptr;
  std::optional<Ratio> best_key;
  for (const KnownUpdate* c : candidates) {
    Ratio k = key(*c);
    if (!best) {
      best = c;
      best_key = std::move(k);
      continue;
    }
    auto better = [&] {
      if (k != *best_key) return k > *best_key;
      if (c->generation != best->generation) return c->generation > best->generation;
      if (c->remaining != best->remaining) return c->remaining < best->remaining;
      return c->index < best->index;
    }();
    if (better) {
      best = c;
      best_key = std::move(k);
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

// Newly arrived updates small enough to preempt the update in service.
inline std::vector<const KnownUpdate*> preemptors(const CausalState& s) {
  std::vector<const KnownUpdate*> out;
  for (UpdateIndex i : s.newly_arrived)
    if (const KnownUpdate* u = s.find_pending(i); u && u->remaining <= s.in_service->remaining)
      out.push_back(u);
  return out;
}

inline std::vector<const KnownUpdate*> all_pending(const CausalState& s) {
  std::vector<const KnownUpdate*> out;
  for (const auto& u : s.pending) out.push_back(&u);
  return out;
}

}  // namespace detail

inline Decision srpt_plus_decide(const CausalState& s) {
  auto gamma = [&](const KnownUpdate& u) { return gamma_index(u.generation, u.remaining, s.lambda); };
  if (s.in_service) {
    if (auto j = detail::pick_best(detail::preemptors(s), gamma)) return Decision::send(j->index);
    return Decision::send(s.in_service->index);
  }
  std::vector<const KnownUpdate*> useful;
  for (const auto& u : s.pending)
    if (gamma(u).sign() > 0) useful.push_back(&u);
  if (auto j = detail::pick_best(useful, gamma)) return Decision::send(j->index);
  return Decision::idle();
}

inline Decision srpt_l_decide(const CausalState& s) {
  auto generation = [](const KnownUpdate& u) { return u.generation; };
  if (s.in_service) {
    if (auto j = detail::pick_best(detail::preemptors(s), generation)) return Decision::send(j->index);
    return Decision::send(s.in_service->index);
  }
  // Only the latest generation counts; once it is delivered, older
  // incomplete updates are never revisited. With several updates sharing
  // the latest generation, delivering any one of them settles it.
  if (!s.latest_generation) return Decision::idle();
  if (s.delivered > 0 && *s.latest_generation <= s.lambda) return Decision::idle();
  std::vector<const KnownUpdate*> latest;
  for (const auto& u : s.pending)
    if (s.latest_generation && u.generation == *s.latest_generation) latest.push_back(&u);
  if (auto j = detail::pick_best(latest, generation)) return Decision::send(j->index);
  return Decision::idle();
}

inline Decision srpt_decide(const CausalState& s) {
  auto candidates = detail::all_pending(s);
  if (s.in_service) candidates.push_back(&*s.in_service);
  auto shortest = [](const KnownUpdate& u) { return -u.remaining; };
  if (auto j = detail::pick_best(candidates, shortest)) return Decision::send(j->index);
  return Decision::idle();
}

inline Decision fcfs_decide(const CausalState& s) {
  if (s.in_service) return Decision::send(s.in_service->index);
  if (s.pending.empty()) return Decision::idle();
  return Decision::send(s.pending.front().index);
}

inline Decision non_preemptive_latest_decide(const CausalState& s) {
  if (s.in_service) return Decision::send(s.in_service->index);
  auto generation = [](const KnownUpdate& u) { return u.generation; };
  if (auto j = detail::pick_best(detail::all_pending(s), generation)) return Decision::send(j->index);
  return Decision::idle();
}

inline Policy make_policy(PolicyId id) {
  switch (id) {
    case PolicyId::SrptPlus: return srpt_plus_decide;
    case PolicyId::SrptL: return srpt_l_decide;
    case PolicyId::Srpt: return srpt_decide;
    case PolicyId::Fcfs: return fcfs_decide;
    case PolicyId::NonPreemptiveLatest: return non_preemptive_latest_decide;
  }
  throw Error(ErrorCode::UnknownPolicy, "unhandled policy id");
}

inline Trace simulate(const Instance& instance, PolicyId id) { return simulate(instance, make_policy(id)); }

}  // namespace aoilab
