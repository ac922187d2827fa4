#include "procsim/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "procsim/error.hpp"

namespace procsim {
namespace {

using QuantilePolicy = boost::math::policies::policy<
    boost::math::policies::overflow_error<boost::math::policies::ignore_error>,
    boost::math::policies::underflow_error<boost::math::policies::ignore_error>,
    boost::math::policies::promote_double<false>>;

double standard_normal_quantile(double p) {
  static const boost::math::normal_distribution<double, QuantilePolicy> unit(0.0, 1.0);
  return boost::math::quantile(unit, p);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Exponential: return "exponential";
    case Family::Gamma: return "gamma";
    case Family::Normal: return "normal";
    case Family::Uniform: return "uniform";
    case Family::LogNormal: return "lognormal";
    case Family::Fixed: return "fixed";
  }
  return "fixed";
}

Family family_from_name(std::string_view name) {
  for (Family f : {Family::Exponential, Family::Gamma, Family::Normal, Family::Uniform, Family::LogNormal,
                   Family::Fixed}) {
    if (family_name(f) == name) return f;
  }
  throw Error(ErrorCode::Parse, "unknown distribution family '" + std::string(name) + "'");
}

FittedDistribution FittedDistribution::fixed(double value) { return {Family::Fixed, {value, 0.0}, 0.0}; }
FittedDistribution FittedDistribution::exponential(double mean) { return {Family::Exponential, {mean, 0.0}, 0.0}; }
FittedDistribution FittedDistribution::gamma(double shape, double scale) { return {Family::Gamma, {shape, scale}, 0.0}; }
FittedDistribution FittedDistribution::normal(double mean, double sd) { return {Family::Normal, {mean, sd}, 0.0}; }
FittedDistribution FittedDistribution::uniform(double low, double high) { return {Family::Uniform, {low, high}, 0.0}; }
FittedDistribution FittedDistribution::lognormal(double mu, double sigma) { return {Family::LogNormal, {mu, sigma}, 0.0}; }

bool FittedDistribution::valid() const {
  const auto [p0, p1] = params;
  if (!finite(p0) || !finite(p1) || !finite(fit_error) || fit_error < 0.0) return false;
  switch (family) {
    case Family::Exponential: return p0 > 0.0;
    case Family::Gamma: return p0 > 0.0 && p1 > 0.0;
    case Family::Normal: return p1 >= 0.0;
    case Family::Uniform: return p0 <= p1;
    case Family::LogNormal: return p1 >= 0.0;
    case Family::Fixed: return p0 >= 0.0;
  }
  return false;
}

double FittedDistribution::mean() const {
  const auto [p0, p1] = params;
  switch (family) {
    case Family::Exponential: return p0;
    case Family::Gamma: return p0 * p1;
    case Family::Normal: return p0;
    case Family::Uniform: return 0.5 * (p0 + p1);
    case Family::LogNormal: return std::exp(p0 + 0.5 * p1 * p1);
    case Family::Fixed: return p0;
  }
  return p0;
}

double FittedDistribution::quantile(double p) const {
  const auto [p0, p1] = params;
  switch (family) {
    case Family::Exponential: return -p0 * std::log1p(-p);
    case Family::Gamma: {
      const boost::math::gamma_distribution<double, QuantilePolicy> g(p0, p1);
      return boost::math::quantile(g, p);
    }
    case Family::Normal: return p0 + p1 * standard_normal_quantile(p);
    case Family::Uniform: return p0 + p * (p1 - p0);
    case Family::LogNormal: return std::exp(p0 + p1 * standard_normal_quantile(p));
    case Family::Fixed: return p0;
  }
  return p0;
}

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidArgument, "wasserstein_1d: empty sample");
  std::vector<double> xs(a.begin(), a.end());
  std::vector<double> ys(b.begin(), b.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());

  // Integrate |F_a - F_b| over the merged breakpoints. CDF values are kept
  // as integers scaled by n*m to avoid accumulating rounding in the steps.
  const auto n = static_cast<std::int64_t>(xs.size());
  const auto m = static_cast<std::int64_t>(ys.size());
  std::int64_t i = 0;
  std::int64_t j = 0;
  double prev = std::min(xs.front(), ys.front());
  double area = 0.0;
  while (i < n || j < m) {
    const bool take_a = j >= m || (i < n && xs[i] <= ys[j]);
    const double x = take_a ? xs[i] : ys[j];
    const std::int64_t gap = std::llabs(i * m - j * n);
    if (gap != 0) area += static_cast<double>(gap) * (x - prev);
    prev = x;
    if (take_a) ++i; else ++j;
  }
  return area / (static_cast<double>(n) * static_cast<double>(m));
}

std::vector<FittedDistribution> fit_candidates(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "fit_distribution: empty sample");
  for (double x : samples) {
    if (!finite(x) || x < 0.0) throw Error(ErrorCode::InvalidArgument, "fit_distribution: negative or non-finite sample");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double var = 0.0;
  for (double x : sorted) var += (x - mean) * (x - mean);
  var /= n;

  auto fixed = FittedDistribution::fixed(mean);
  double abs_dev = 0.0;
  for (double x : sorted) abs_dev += std::abs(x - mean);
  fixed.fit_error = abs_dev / n;

  const double epsilon_fixed = 1e-9 * mean * mean;
  if (sorted.size() == 1 || var == 0.0 || var < epsilon_fixed) {
    fixed.fit_error = sorted.size() == 1 ? 0.0 : fixed.fit_error;
    return {fixed};
  }

  const double sd = std::sqrt(var);
  std::vector<FittedDistribution> out;
  out.push_back(FittedDistribution::exponential(mean));
  const double shape = mean * mean / var;
  // Gamma nests the Exponential at shape 1; the log of the moment shape has
  // standard error ~2/sqrt(n) under an exponential sample.
  if (std::abs(std::log(shape)) > 3.0 * 2.0 / std::sqrt(n)) {
    out.push_back(FittedDistribution::gamma(shape, var / mean));
  }
  out.push_back(FittedDistribution::normal(mean, sd));
  out.push_back(FittedDistribution::uniform(mean - std::sqrt(3.0) * sd, mean + std::sqrt(3.0) * sd));
  const double sigma2 = std::log1p(var / (mean * mean));
  out.push_back(FittedDistribution::lognormal(std::log(mean) - 0.5 * sigma2, std::sqrt(sigma2)));

  // Reference sample: clamped quantiles at the midpoints (k - 0.5) / n. Both
  // sequences are sorted, so the transport cost is the paired mean distance.
  for (auto& d : out) {
    double cost = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      const double q = std::max(0.0, d.quantile((static_cast<double>(k) + 0.5) / n));
      cost += std::abs(sorted[k] - q);
    }
    d.fit_error = cost / n;
    if (!d.valid()) d.fit_error = std::numeric_limits<double>::infinity();
  }
  out.push_back(fixed);
  return out;
}

FittedDistribution fit_distribution(std::span<const double> samples) {
  const auto candidates = fit_candidates(samples);
  const FittedDistribution* best = &candidates.front();
  for (const auto& c : candidates) {
    if (c.fit_error < best->fit_error ||
        (c.fit_error == best->fit_error && static_cast<int>(c.family) < static_cast<int>(best->family))) {
      best = &c;
    }
  }
  return *best;
}

double sample_distribution(const FittedDistribution& dist, Rng& rng) {
  const double u = rng.uniform();
  if (dist.family == Family::Fixed) return std::max(0.0, dist.params[0]);
  const double x = dist.quantile(u);
  return finite(x) ? std::max(0.0, x) : 0.0;
}

}  // namespace procsim
