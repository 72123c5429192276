#include "longmix/numerics/rng.hpp"

#include <cmath>
#include <numbers>

#include "longmix/errors.hpp"

namespace longmix {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngState::RngState(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t RngState::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngState::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double draw_uniform(RngState& rng, double lo, double hi) {
  if (!(lo <= hi)) throw DomainError("draw_uniform: lo > hi");
  return lo + (hi - lo) * rng.next_uniform();
}

double draw_normal(RngState& rng, double mean, double sd) {
  if (sd < 0.0) throw DomainError("draw_normal: sd < 0");
  if (sd == 0.0) return mean;
  // Box-Muller; u1 shifted into (0, 1] so the log is finite.
  const double u1 = 1.0 - rng.next_uniform();
  const double u2 = rng.next_uniform();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + sd * z;
}

double draw_gamma(RngState& rng, double shape) {
  if (!(shape > 0.0)) throw DomainError("draw_gamma: shape <= 0");
  if (shape < 1.0) {
    const double u = 1.0 - rng.next_uniform();
    return draw_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = draw_normal(rng, 0.0, 1.0);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - rng.next_uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double draw_chi2(RngState& rng, double dof) {
  if (!(dof > 0.0)) throw DomainError("draw_chi2: dof <= 0");
  return 2.0 * draw_gamma(rng, dof / 2.0);
}

double draw_scaled_inv_chi2(RngState& rng, double dof, double scale) {
  if (!(dof > 0.0) || !(scale > 0.0))
    throw DomainError("draw_scaled_inv_chi2: nonpositive parameter");
  return dof * scale / draw_chi2(rng, dof);
}

std::size_t draw_categorical(RngState& rng, std::span<const double> weights) {
  if (weights.empty()) throw DomainError("draw_categorical: empty weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("draw_categorical: negative weight");
    total += w;
  }
  if (total <= 0.0) throw DomainError("draw_categorical: zero total weight");
  double u = rng.next_uniform() * total;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  return weights.size() - 1;
}

}  // namespace longmix
