#pragma once

#include <cstdint>
#include <vector>

namespace bmr {

// Deterministic pseudo-random generator. The algorithm is part of the
// external contract: a fixed seed reproduces the same draw sequence on
// every platform and build, independent of the C++ standard library's
// distribution implementations.
//
//   state     xoshiro256++ (Blackman & Vigna), seeded via splitmix64
//   uniform   53-bit mantissa, (x >> 11) * 2^-53, values in [0,1)
//   normal    Marsaglia polar method, second variate cached
//   gamma     Marsaglia-Tsang squeeze for shape >= 1,
//             shape boost  g(a+1) * u^(1/a)  for shape < 1
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  // [0,1)
  double uniform();
  // [lo,hi)
  double uniform(double lo, double hi);
  // standard normal
  double normal();
  // mean-one exponential, strictly positive
  double exponential();

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// psi'(x), second derivative of log Gamma. Relative error below 1e-10 on
// x > 0 (upward recurrence into the asymptotic regime, then the standard
// Bernoulli series). Throws std::domain_error for x <= 0.
double trigamma(double x);

// One gamma draw with the shape/scale convention: mean = shape * scale.
double sample_gamma(Rng& rng, double shape, double scale);

// One Beta(a, b) draw via the two-gamma ratio.
double sample_beta(Rng& rng, double a, double b);

// One F(2,2) draw as a ratio of two independent mean-one exponentials.
double sample_f22(Rng& rng);

// One draw of chi-square(3) rescaled to unit variance, i.e. chisq3 / sqrt(6).
double sample_chisq3_scaled(Rng& rng);

struct RobustScales {
  double sd;   // sample standard deviation, n-1 denominator
  double iqr;  // interquartile range, type-7 interpolated quantiles
  double mad;  // median absolute deviation from the median, unscaled
};

// Quantile with linear interpolation between order statistics (R type 7):
// h = (n-1)p, q = x_(floor h) + (h - floor h) * (x_(floor h + 1) - x_(floor h)).
double interp_quantile(std::vector<double> v, double p);

// Requires length >= 2. Callers wanting a consistent sigma estimate apply
// the usual factors themselves (iqr/1.349 or 1.4826*mad).
RobustScales robust_scales(const std::vector<double>& v);

}  // namespace bmr
