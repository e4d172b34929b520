#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "aoilab/error.hpp"
#include "aoilab/model.hpp"

namespace aoilab {

/// Dyadic-rational variates drawn from MT19937-64 (std::mt19937_64).
/// A draw with b bits is k / 2^b where k is the top b bits of one 64-bit
/// output, so sequences are reproducible across platforms and languages.
class DyadicRng {
 public:
  explicit DyadicRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits(unsigned b) {
    if (b == 0) return 0;
    return engine_() >> (64 - b);
  }

  /// Uniform on {0, 1/2^b, ..., 1 - 1/2^b}.
  Ratio unit(unsigned b) { return Ratio(mpq_class(mpz_class(std::to_string(bits(b))), pow2(b))); }

  /// Uniform on {1/2^b, ..., 1}.
  Ratio unit_open_closed(unsigned b) {
    return Ratio(mpq_class(mpz_class(std::to_string(bits(b))) + 1, pow2(b)));
  }

  /// Uniform index in [0, n) by rejection on the smallest covering power of two.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    unsigned b = 0;
    while ((std::uint64_t{1} << b) < n) ++b;
    for (;;)
      if (auto k = bits(b); k < n) return k;
  }

  /// Number of failed Bernoulli(1/16) trials before the first success.
  std::uint64_t geometric16() {
    std::uint64_t count = 0;
    while (bits(4) != 0) ++count;
    return count;
  }

 private:
  static mpz_class pow2(unsigned b) {
    mpz_class p = 1;
    p <<= b;
    return p;
  }

  std::mt19937_64 engine_;
};

namespace gen {

struct Example1 {};
struct Example2 {
  std::uint64_t m = 1;
  Ratio epsilon;
  Ratio horizon;
};
struct Example3 {};
struct RandomUniform {
  std::size_t n = 0;
  Ratio g_max;
  Ratio s_max;
  std::uint64_t seed = 0;
  std::optional<Ratio> horizon;  // default g_max + s_max
  unsigned bits = 8;
};
struct RandomPoissonLike {
  std::size_t n = 0;
  Ratio rate;
  Ratio mean_size;
  std::uint64_t seed = 0;
  std::optional<Ratio> horizon;  // default last generation + 2 mean_size
};
struct Perturb {
  Instance base;
  Ratio magnitude;
  std::uint64_t seed = 0;
  unsigned bits = 8;
};

}  // namespace gen

using GeneratorSpec = std::variant<gen::Example1, gen::Example2, gen::Example3, gen::RandomUniform,
                                   gen::RandomPoissonLike, gen::Perturb>;

namespace detail {

inline Instance make(std::vector<RawUpdate> raw, Ratio horizon, Ratio lambda0 = Ratio(0)) {
  return validate_instance(std::move(raw), std::move(horizon), std::move(lambda0));
}

inline Instance generate_one(const gen::Example1&) {
  return make({{Ratio(0), Ratio(1)}, {Ratio(2), Ratio(1)}, {Ratio(4), Ratio(1)}}, Ratio(5));
}

inline Instance generate_one(const gen::Example3&) {
  return make({{Ratio(0), Ratio(29, 20)},
               {Ratio(1, 4), Ratio(5, 4)},
               {Ratio(3, 4), Ratio(1)},
               {Ratio(1), Ratio(1, 2)},
               {Ratio(5, 4), Ratio(3, 10)},
               {Ratio(9, 5), Ratio(1, 10)}},
              Ratio(2));
}

inline Instance generate_one(const gen::Example2& s) {
  if (s.m == 0 || s.epsilon.sign() <= 0 || s.horizon.sign() <= 0 || s.epsilon >= s.horizon)
    throw Error(ErrorCode::InvalidSpecParams, "Example2 needs m >= 1 and 0 < epsilon < horizon");
  std::vector<RawUpdate> raw;
  // Burst of m half-unit updates inside (0, epsilon], latest at epsilon.
  for (std::uint64_t i = 0; i < s.m; ++i)
    raw.push_back({s.epsilon / Ratio(static_cast<long>(s.m - i)), Ratio(1, 2)});
  // Unit-size update at every positive integer time before the horizon.
  for (long i = 1; Ratio(i) < s.horizon; ++i) raw.push_back({Ratio(i), Ratio(1)});
  return make(std::move(raw), s.horizon);
}

inline Instance generate_one(const gen::RandomUniform& s) {
  if (s.g_max.sign() <= 0 || s.s_max.sign() <= 0 || s.bits == 0 || s.bits > 32)
    throw Error(ErrorCode::InvalidSpecParams, "RandomUniform needs g_max > 0, s_max > 0, 1 <= bits <= 32");
  Ratio horizon = s.horizon.value_or(s.g_max + s.s_max);
  if (horizon < s.g_max)
    throw Error(ErrorCode::InvalidSpecParams, "horizon must be at least g_max");
  DyadicRng rng(s.seed);
  std::vector<RawUpdate> raw;
  for (std::size_t k = 0; k < s.n; ++k) {
    Ratio g = s.g_max * rng.unit(s.bits);
    Ratio size = s.s_max * rng.unit_open_closed(s.bits);
    raw.push_back({std::move(g), std::move(size)});
  }
  return make(std::move(raw), std::move(horizon));
}

inline Instance generate_one(const gen::RandomPoissonLike& s) {
  if (s.rate.sign() <= 0 || s.mean_size.sign() <= 0)
    throw Error(ErrorCode::InvalidSpecParams, "RandomPoissonLike needs rate > 0 and mean_size > 0");
  DyadicRng rng(s.seed);
  // Lattice steps of 1/(16 rate): a geometric count of steps with mean 16
  // gives inter-generation gaps with mean 1/rate.
  const Ratio gap_step = Ratio(1) / (Ratio(16) * s.rate);
  const Ratio size_step = s.mean_size / Ratio(16);
  std::vector<RawUpdate> raw;
  Ratio t(0);
  for (std::size_t k = 0; k < s.n; ++k) {
    if (k > 0) t += gap_step * Ratio(static_cast<long>(rng.geometric16() + 1));
    Ratio size = size_step * Ratio(static_cast<long>(rng.geometric16() + 1));
    raw.push_back({t, std::move(size)});
  }
  Ratio horizon = s.horizon.value_or(t + Ratio(2) * s.mean_size);
  std::erase_if(raw, [&](const RawUpdate& u) { return u.generation >= horizon; });
  return make(std::move(raw), std::move(horizon));
}

inline Instance generate_one(const gen::Perturb& s) {
  if (s.magnitude.sign() <= 0 || s.bits == 0 || s.bits > 32)
    throw Error(ErrorCode::InvalidSpecParams, "Perturb needs magnitude > 0 and 1 <= bits <= 32");
  DyadicRng rng(s.seed);
  const Ratio& horizon = s.base.horizon();
  const Ratio& lambda0 = s.base.initial_generation();
  const Ratio floor_g = max(Ratio(0), lambda0);
  const Ratio ceil_g = horizon - horizon / Ratio(1L << s.bits);
  const Ratio min_size = s.magnitude / Ratio(1L << s.bits);
  std::vector<RawUpdate> raw;
  for (const auto& u : s.base.updates()) {
    Ratio g = u.generation + s.magnitude * (Ratio(2) * rng.unit(s.bits) - Ratio(1));
    Ratio size = u.size + s.magnitude * (Ratio(2) * rng.unit(s.bits) - Ratio(1));
    g = min(max(g, floor_g), ceil_g);
    if (size.sign() <= 0) size = min_size;
    raw.push_back({std::move(g), std::move(size)});
  }
  return make(std::move(raw), horizon, lambda0);
}

}  // namespace detail

inline Instance generate(const GeneratorSpec& spec) {
  return std::visit([](const auto& s) { return detail::generate_one(s); }, spec);
}

/// Completion pattern of the three-update illustration on Example1():
/// each update is sent on [g, g + 1].
inline Trace example1_trace() {
  Trace t;
  for (long g : {0L, 2L, 4L}) {
    UpdateIndex i = static_cast<UpdateIndex>(g / 2 + 1);
    t.segments.push_back({i, Ratio(g), Ratio(g + 1)});
    t.completions.push_back({i, Ratio(g + 1)});
  }
  return t;
}

}  // namespace aoilab
