#pragma once

// Sample statistics for evaluation campaigns: bootstrap standard errors,
// rescaled moments, Wigner-Dyson surmises and two-sample Kolmogorov-Smirnov.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "aqcrl/errors.hpp"
#include "aqcrl/rng.hpp"

namespace aqcrl {

inline double mean(std::span<const double> v) {
  if (v.empty()) throw ParameterError("mean of an empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Unbiased sample standard deviation.
inline double stddev(std::span<const double> v) {
  if (v.size() < 2) throw ParameterError("standard deviation needs at least two values");
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

// Samples divided by their mean.
inline std::vector<double> rescale_to_unit_mean(std::span<const double> v) {
  const double m = mean(v);
  if (!(m > 0.0)) throw ParameterError("cannot rescale a sample whose mean is not positive");
  std::vector<double> out(v.begin(), v.end());
  for (auto& x : out) x /= m;
  return out;
}

// <x^2> of the sample rescaled to unit mean.
inline double rescaled_second_moment(std::span<const double> v) {
  const double m = mean(v);
  if (!(m > 0.0)) throw ParameterError("cannot rescale a sample whose mean is not positive");
  double acc = 0.0;
  for (double x : v) acc += (x / m) * (x / m);
  return acc / static_cast<double>(v.size());
}

inline constexpr int kDefaultBootstrapResamples = 1000;

// Standard deviation of `statistic` over `resamples` resamples drawn with
// replacement.
template <class Statistic>
double bootstrap_se(std::span<const double> sample, Statistic statistic, int resamples, std::uint64_t seed) {
  if (sample.empty()) throw ParameterError("bootstrap of an empty sample");
  if (resamples < 2) throw ParameterError("bootstrap needs at least two resamples");
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, sample.size() - 1);
  std::vector<double> draw(sample.size());
  std::vector<double> values(static_cast<std::size_t>(resamples));
  for (auto& value : values) {
    for (auto& x : draw) x = sample[pick(rng)];
    value = statistic(std::span<const double>(draw));
  }
  return stddev(values);
}

inline double bootstrap_mean_se(std::span<const double> sample, int resamples, std::uint64_t seed) {
  return bootstrap_se(sample, [](std::span<const double> s) { return mean(s); }, resamples, seed);
}

// --- Wigner-Dyson surmises, unit mean ----------------------------------------
//
// P(x) = A x^k exp(-B x^2).

enum class WignerDysonEnsemble { GOE, GUE };

struct SurmiseForm {
  double prefactor;  // A
  int power;         // k
  double exponent;   // B
  double second_moment;
};

inline SurmiseForm surmise_form(WignerDysonEnsemble e) {
  using std::numbers::pi;
  if (e == WignerDysonEnsemble::GOE) return {pi / 2.0, 1, pi / 4.0, 4.0 / pi};
  return {32.0 / (pi * pi), 2, 4.0 / pi, 3.0 * pi / 8.0};
}

inline const char* to_string(WignerDysonEnsemble e) { return e == WignerDysonEnsemble::GOE ? "goe" : "gue"; }

inline double wigner_dyson_pdf(double x, WignerDysonEnsemble e = WignerDysonEnsemble::GOE) {
  if (x < 0.0) return 0.0;
  const auto f = surmise_form(e);
  return f.prefactor * std::pow(x, f.power) * std::exp(-f.exponent * x * x);
}

inline double wigner_dyson_cdf(double x, WignerDysonEnsemble e = WignerDysonEnsemble::GOE) {
  if (x <= 0.0) return 0.0;
  const auto f = surmise_form(e);
  const double bx2 = f.exponent * x * x;
  if (e == WignerDysonEnsemble::GOE) return 1.0 - std::exp(-bx2);
  // int_0^x A t^2 exp(-B t^2) dt with A = 32/pi^2, B = 4/pi
  const double sb = std::sqrt(f.exponent);
  return f.prefactor * (std::sqrt(std::numbers::pi) * std::erf(sb * x) / (4.0 * f.exponent * sb) -
                        x * std::exp(-bx2) / (2.0 * f.exponent));
}

inline double wigner_dyson_second_moment(WignerDysonEnsemble e = WignerDysonEnsemble::GOE) {
  return surmise_form(e).second_moment;
}

// --- Kolmogorov-Smirnov -------------------------------------------------------

inline double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ParameterError("KS statistic of an empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::ranges::sort(x);
  std::ranges::sort(y);
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

// One-sample statistic against the unit-mean surmise.
inline double ks_statistic_wigner_dyson(std::span<const double> rescaled,
                                        WignerDysonEnsemble e = WignerDysonEnsemble::GOE) {
  if (rescaled.empty()) throw ParameterError("KS statistic of an empty sample");
  std::vector<double> x(rescaled.begin(), rescaled.end());
  std::ranges::sort(x);
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = wigner_dyson_cdf(x[i], e);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
  }
  return d;
}

// --- histograms ---------------------------------------------------------------

struct Histogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<double> density;  // integrates to the fraction of samples inside [lo, lo + bins * width)
};

inline Histogram histogram(std::span<const double> sample, double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) throw ParameterError("histogram needs bins >= 1 and hi > lo");
  if (sample.empty()) throw ParameterError("histogram of an empty sample");
  Histogram h{lo, (hi - lo) / bins, std::vector<double>(static_cast<std::size_t>(bins), 0.0)};
  for (double x : sample) {
    if (x < lo || x >= hi) continue;
    auto k = static_cast<std::size_t>((x - lo) / h.width);
    if (k >= h.density.size()) k = h.density.size() - 1;
    h.density[k] += 1.0;
  }
  for (auto& d : h.density) d /= static_cast<double>(sample.size()) * h.width;
  return h;
}

}  // namespace aqcrl
