#include "bmr/special_math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bmr {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double v1, v2, s;
  do {
    v1 = 2.0 * uniform() - 1.0;
    v2 = 2.0 * uniform() - 1.0;
    s = v1 * v1 + v2 * v2;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v2 * f;
  has_spare_ = true;
  return v1 * f;
}

double Rng::exponential() {
  double u = uniform();
  if (u == 0.0) u = 0x1.0p-53;  // keep the draw strictly positive
  return -std::log1p(-u);
}

double trigamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("trigamma: x must be > 0");
  double acc = 0.0;
  while (x < 12.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  // Bernoulli-number series at large x.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = inv + 0.5 * inv2;
  double term = inv * inv2;
  series += term * (1.0 / 6.0);
  term *= inv2;
  series -= term * (1.0 / 30.0);
  term *= inv2;
  series += term * (1.0 / 42.0);
  term *= inv2;
  series -= term * (1.0 / 30.0);
  term *= inv2;
  series += term * (5.0 / 66.0);
  term *= inv2;
  series -= term * (691.0 / 2730.0);
  return acc + series;
}

double sample_gamma(Rng& rng, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::domain_error("sample_gamma: shape and scale must be > 0");
  if (shape < 1.0) {
    // Boost trick: G(a) = G(a+1) * U^(1/a).
    double u = 1.0 - rng.uniform();  // (0,1]
    return sample_gamma(rng, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v * scale;
  }
}

double sample_beta(Rng& rng, double a, double b) {
  const double ga = sample_gamma(rng, a, 1.0);
  const double gb = sample_gamma(rng, b, 1.0);
  return ga / (ga + gb);
}

double sample_f22(Rng& rng) {
  return rng.exponential() / rng.exponential();
}

double sample_chisq3_scaled(Rng& rng) {
  return sample_gamma(rng, 1.5, 2.0) / std::sqrt(6.0);
}

double interp_quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("interp_quantile: empty vector");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 1) return v[0];
  const double h = static_cast<double>(n - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= n) return v[n - 1];
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

RobustScales robust_scales(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) throw std::invalid_argument("robust_scales: need length >= 2");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  RobustScales out;
  out.sd = std::sqrt(ss / static_cast<double>(n - 1));
  out.iqr = interp_quantile(v, 0.75) - interp_quantile(v, 0.25);
  const double med = interp_quantile(v, 0.5);
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = std::abs(v[i] - med);
  out.mad = interp_quantile(dev, 0.5);
  return out;
}

}  // namespace bmr
