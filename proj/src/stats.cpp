#include "sqa/stats.hpp"

#include <cmath>
#include <limits>

#include "sqa/error.hpp"

namespace sqa {

void MeasurementSeries::push(std::uint64_t step, double avg, double min) {
  if (!mcs.empty() && step <= mcs.back()) throw ValidationError("measurement indices must increase");
  mcs.push_back(step);
  eps_avg.push_back(avg);
  eps_min.push_back(min);
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

namespace {

std::vector<double> block_means(std::span<const double> x, std::size_t size) {
  const std::size_t count = x.size() / size;
  std::vector<double> out(count);
  for (std::size_t b = 0; b < count; ++b) out[b] = mean(x.subspan(b * size, size));
  return out;
}

}  // namespace

BatchMeans batch_means(std::span<const double> x) {
  BatchMeans r;
  r.mean = mean(x);
  if (x.size() < 2) {
    r.batches = x.size();
    return r;
  }
  std::size_t size = 1;
  while (x.size() / (2 * size) >= 32) size *= 2;
  // batches cover the whole series only when size divides it; the mean
  // reported is always over every sample
  const auto blocks = block_means(x, size);
  r.batch_size = size;
  r.batches = blocks.size();
  r.sem = std::sqrt(variance(blocks) / static_cast<double>(blocks.size()));
  return r;
}

double mean_variance_spectral(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const auto count = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  if (count < 2) return variance(x) / static_cast<double>(n);
  const std::size_t size = n / count;
  const auto blocks = block_means(x.first(size * count), size);
  return variance(blocks) / static_cast<double>(blocks.size());
}

double geweke_z(std::span<const double> x, double first, double last) {
  const std::size_t n = x.size();
  const auto na = static_cast<std::size_t>(std::floor(first * static_cast<double>(n)));
  const auto nb = static_cast<std::size_t>(std::floor(last * static_cast<double>(n)));
  if (na < 2 || nb < 2) throw ValidationError("series too short for the Geweke diagnostic");
  const auto a = x.first(na);
  const auto b = x.last(nb);
  const double diff = mean(a) - mean(b);
  const double var = mean_variance_spectral(a) + mean_variance_spectral(b);
  if (var <= 0.0) {
    if (std::abs(diff) <= 1e-14 * (std::abs(mean(a)) + std::abs(mean(b)) + 1e-300)) return 0.0;
    return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  }
  return diff / std::sqrt(var);
}

GewekeResult geweke_burn_in(std::span<const double> values, std::span<const std::uint64_t> mcs) {
  const std::size_t n = values.size();
  if (n < 100) throw ValidationError("series too short: Geweke burn-in needs at least 100 samples");
  if (mcs.size() != n) throw ValidationError("series index and values differ in length");
  static constexpr double kCandidates[] = {0.0, 0.01, 0.02, 0.05, 0.10, 0.20, 0.50};
  GewekeResult r;
  for (double frac : kCandidates) {
    const auto cut = static_cast<std::size_t>(std::floor(frac * static_cast<double>(n)));
    const double z = geweke_z(values.subspan(cut));
    r = {cut, mcs[cut] - mcs[0], z, false};
    if (std::abs(z) < 2.0) return r;
  }
  r.capped = true;
  return r;
}

GewekeResult geweke_burn_in(const MeasurementSeries& series) {
  return geweke_burn_in(std::span<const double>(series.eps_avg), std::span<const std::uint64_t>(series.mcs));
}

}  // namespace sqa
