#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "procsim/rng.hpp"

namespace procsim {

// Candidate families in tie-break order.
enum class Family { Exponential, Gamma, Normal, Uniform, LogNormal, Fixed };

std::string_view family_name(Family f);
Family family_from_name(std::string_view name);

// Parametric duration model, all parameters in seconds (LogNormal: log-seconds).
//   Exponential {mean}
//   Gamma       {shape, scale}
//   Normal      {mean, sd}
//   Uniform     {low, high}
//   LogNormal   {mu, sigma}
//   Fixed       {value}
struct FittedDistribution {
  Family family = Family::Fixed;
  std::array<double, 2> params{0.0, 0.0};
  double fit_error = 0.0;

  static FittedDistribution fixed(double value);
  static FittedDistribution exponential(double mean);
  static FittedDistribution gamma(double shape, double scale);
  static FittedDistribution normal(double mean, double sd);
  static FittedDistribution uniform(double low, double high);
  static FittedDistribution lognormal(double mu, double sigma);

  bool valid() const;
  double mean() const;
  // Unclamped inverse CDF at p in (0, 1).
  double quantile(double p) const;

  bool operator==(const FittedDistribution&) const = default;
};

// 1-Wasserstein distance between two empirical distributions.
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

// Every candidate family fitted by moments, fit_error filled in. The Fixed
// candidate is always present; Gamma is omitted when its moment shape cannot
// be told apart from the Exponential special case (shape 1).
std::vector<FittedDistribution> fit_candidates(std::span<const double> samples);

// Candidate with the smallest fit_error (ties by family order).
FittedDistribution fit_distribution(std::span<const double> samples);

// One draw, clamped at zero. Consumes exactly one uniform from `rng`.
double sample_distribution(const FittedDistribution& dist, Rng& rng);

}  // namespace procsim
