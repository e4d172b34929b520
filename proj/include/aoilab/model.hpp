#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aoilab/error.hpp"
#include "aoilab/ratio.hpp"

namespace aoilab {

/// 1-based arrival-order index of an update.
using UpdateIndex = std::size_t;

struct Update {
  UpdateIndex index = 0;
  Ratio generation;
  Ratio size;

  friend bool operator==(const Update&, const Update&) = default;
};

/// Raw (generation, size) pair as read from a file or produced by a generator.
struct RawUpdate {
  Ratio generation;
  Ratio size;

  friend bool operator==(const RawUpdate&, const RawUpdate&) = default;
};

/// Validated update sequence: sorted by generation, densely indexed from 1.
/// Only `validate_instance` produces one.
class Instance {
 public:
  Instance() : horizon_(1) {}

  const std::vector<Update>& updates() const { return updates_; }
  const Ratio& horizon() const { return horizon_; }
  const Ratio& initial_generation() const { return initial_generation_; }
  std::size_t size() const { return updates_.size(); }
  bool empty() const { return updates_.empty(); }

  /// Update by 1-based index.
  const Update& at(UpdateIndex i) const { return updates_.at(i - 1); }

  /// Generation of update i, with index 0 standing for the initial anchor.
  const Ratio& generation(UpdateIndex i) const {
    return i == 0 ? initial_generation_ : updates_.at(i - 1).generation;
  }

  std::vector<RawUpdate> raw() const {
    std::vector<RawUpdate> out;
    out.reserve(updates_.size());
    for (const auto& u : updates_) out.push_back({u.generation, u.size});
    return out;
  }

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  friend Instance validate_instance(std::vector<RawUpdate>, Ratio, Ratio);

  std::vector<Update> updates_;
  Ratio horizon_;
  Ratio initial_generation_;
};

/// Checks and canonicalizes an update list. Ties in generation keep their
/// input order (stable sort), so the result is idempotent on its own output.
inline Instance validate_instance(std::vector<RawUpdate> raw, Ratio horizon,
                                  Ratio initial_generation = Ratio(0)) {
  if (horizon.sign() <= 0)
    throw Error(ErrorCode::NonPositiveHorizon, "horizon must be positive, got " + horizon.str());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const auto& u = raw[k];
    const std::string where = "update #" + std::to_string(k + 1);
    if (u.size.sign() <= 0)
      throw Error(ErrorCode::NonPositiveSize, where + " has size " + u.size.str());
    if (u.generation.sign() < 0)
      throw Error(ErrorCode::NegativeGeneration, where + " has generation " + u.generation.str());
    if (u.generation >= horizon)
      throw Error(ErrorCode::GenerationBeyondHorizon,
                  where + " generated at " + u.generation.str() + " >= horizon " + horizon.str());
  }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const RawUpdate& a, const RawUpdate& b) { return a.generation < b.generation; });
  const Ratio& first = raw.empty() ? horizon : raw.front().generation;
  if (initial_generation > first)
    throw Error(ErrorCode::InitialGenerationTooLarge,
                "initial generation " + initial_generation.str() + " exceeds " + first.str());

  Instance inst;
  inst.horizon_ = std::move(horizon);
  inst.initial_generation_ = std::move(initial_generation);
  inst.updates_.reserve(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k)
    inst.updates_.push_back({k + 1, std::move(raw[k].generation), std::move(raw[k].size)});
  return inst;
}

struct Segment {
  UpdateIndex update = 0;
  Ratio start;
  Ratio end;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Completion {
  UpdateIndex update = 0;
  Ratio time;

  friend bool operator==(const Completion&, const Completion&) = default;
};

/// Transmission record of one schedule over [0, horizon].
struct Trace {
  std::string instance_id;  // content hash of the instance, may be empty
  std::vector<Segment> segments;
  std::vector<Completion> completions;

  friend bool operator==(const Trace&, const Trace&) = default;
};

enum class ViolationKind {
  UnknownUpdate,
  EmptySegment,
  StartsBeforeGeneration,
  EndsAfterHorizon,
  Overlap,
  Overwork,
  MissingCompletion,
  SpuriousCompletion,
  CompletionTimeMismatch,
  CompletionOrder,
};

constexpr std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::UnknownUpdate: return "UnknownUpdate";
    case ViolationKind::EmptySegment: return "EmptySegment";
    case ViolationKind::StartsBeforeGeneration: return "StartsBeforeGeneration";
    case ViolationKind::EndsAfterHorizon: return "EndsAfterHorizon";
    case ViolationKind::Overlap: return "Overlap";
    case ViolationKind::Overwork: return "Overwork";
    case ViolationKind::MissingCompletion: return "MissingCompletion";
    case ViolationKind::SpuriousCompletion: return "SpuriousCompletion";
    case ViolationKind::CompletionTimeMismatch: return "CompletionTimeMismatch";
    case ViolationKind::CompletionOrder: return "CompletionOrder";
  }
  return "Unknown";
}

struct Violation {
  ViolationKind kind;
  UpdateIndex update = 0;
  std::string detail;
};

struct TraceValidation {
  bool valid = true;
  std::vector<Violation> violations;

  explicit operator bool() const { return valid; }
};

inline TraceValidation validate_trace(const Trace& trace, const Instance& instance) {
  TraceValidation out;
  auto flag = [&](ViolationKind kind, UpdateIndex i, std::string detail) {
    out.valid = false;
    out.violations.push_back({kind, i, std::move(detail)});
  };

  const std::size_t n = instance.size();
  std::vector<Ratio> work(n + 1);
  std::vector<std::optional<Ratio>> last_end(n + 1);

  for (std::size_t k = 0; k < trace.segments.size(); ++k) {
    const auto& seg = trace.segments[k];
    std::string where = "segment #" + std::to_string(k + 1);
    if (seg.update == 0 || seg.update > n) {
      flag(ViolationKind::UnknownUpdate, seg.update, where);
      continue;
    }
    if (!(seg.start < seg.end)) flag(ViolationKind::EmptySegment, seg.update, where);
    if (seg.start < instance.at(seg.update).generation)
      flag(ViolationKind::StartsBeforeGeneration, seg.update, where + " starts at " + seg.start.str());
    if (seg.end > instance.horizon())
      flag(ViolationKind::EndsAfterHorizon, seg.update, where + " ends at " + seg.end.str());
    if (k > 0 && seg.start < trace.segments[k - 1].end)
      flag(ViolationKind::Overlap, seg.update,
           where + " starts at " + seg.start.str() + " before previous end " +
               trace.segments[k - 1].end.str());
    work[seg.update] += seg.end - seg.start;
    last_end[seg.update] = last_end[seg.update] ? max(*last_end[seg.update], seg.end) : seg.end;
  }

  std::vector<std::optional<Ratio>> completed(n + 1);
  for (std::size_t k = 0; k < trace.completions.size(); ++k) {
    const auto& c = trace.completions[k];
    if (c.update == 0 || c.update > n) {
      flag(ViolationKind::UnknownUpdate, c.update, "completion #" + std::to_string(k + 1));
      continue;
    }
    if (k > 0 && !(trace.completions[k - 1].time < c.time))
      flag(ViolationKind::CompletionOrder, c.update, "completion #" + std::to_string(k + 1));
    if (completed[c.update])
      flag(ViolationKind::SpuriousCompletion, c.update, "duplicate completion");
    completed[c.update] = c.time;
  }

  for (UpdateIndex i = 1; i <= n; ++i) {
    const Ratio& size = instance.at(i).size;
    if (work[i] > size)
      flag(ViolationKind::Overwork, i, "served " + work[i].str() + " > size " + size.str());
    if (work[i] == size && !completed[i])
      flag(ViolationKind::MissingCompletion, i, "fully served but no completion");
    if (completed[i]) {
      if (work[i] != size)
        flag(ViolationKind::SpuriousCompletion, i, "completion with work " + work[i].str());
      else if (last_end[i] && *last_end[i] != *completed[i])
        flag(ViolationKind::CompletionTimeMismatch, i,
             "completion at " + completed[i]->str() + " but last segment ends " + last_end[i]->str());
    }
  }
  return out;
}

}  // namespace aoilab
