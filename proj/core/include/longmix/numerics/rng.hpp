#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace longmix {

// xoshiro256** seeded through splitmix64. Self-contained so that a fixed seed
// gives a byte-identical draw sequence on every platform and build.
//
// RngState is single-owner: hand it off, never share it across threads.
class RngState {
 public:
  explicit RngState(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();
  double next_uniform();  // [0, 1), 53-bit resolution

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_;
};

double draw_uniform(RngState& rng, double lo, double hi);

// sd == 0 returns mean exactly; sd < 0 is a DomainError.
double draw_normal(RngState& rng, double mean, double sd);

// Unit-scale gamma draw, valid for every shape > 0 (Marsaglia-Tsang rejection,
// with the power boost for shape < 1).
double draw_gamma(RngState& rng, double shape);

double draw_chi2(RngState& rng, double dof);

// Scaled inverse chi-square: dof * scale / chi2_dof. For dof > 2 the mean is
// dof * scale / (dof - 2).
double draw_scaled_inv_chi2(RngState& rng, double dof, double scale);

// Index draw from unnormalized non-negative weights.
std::size_t draw_categorical(RngState& rng, std::span<const double> weights);

}  // namespace longmix
