#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sqa {

// Per-MCS observable samples of a Markov chain.
struct MeasurementSeries {
  std::vector<std::uint64_t> mcs;  // strictly increasing
  std::vector<double> eps_avg;
  std::vector<double> eps_min;

  std::size_t size() const noexcept { return mcs.size(); }
  void push(std::uint64_t step, double avg, double min);
};

double mean(std::span<const double> x);

// Sample variance with n-1 normalisation; 0 for fewer than two values.
double variance(std::span<const double> x);

// Standard error of the mean from non-overlapping batch means. Batch size
// is doubled from 1 for as long as at least 32 batches remain.
struct BatchMeans {
  double mean = 0.0;
  double sem = 0.0;
  std::size_t batch_size = 1;
  std::size_t batches = 0;
};

BatchMeans batch_means(std::span<const double> x);

// Variance of the mean of a correlated segment, S(0)/n, with the spectral
// density at frequency zero estimated from ~sqrt(n) batch means.
double mean_variance_spectral(std::span<const double> x);

// Geweke z-score between the first `first` and last `last` fractions.
double geweke_z(std::span<const double> x, double first = 0.1, double last = 0.5);

struct GewekeResult {
  std::size_t burn_in_samples = 0;  // samples discarded from the front
  std::uint64_t burn_in_mcs = 0;    // MCS discarded before the first retained sample
  double z = 0.0;
  bool capped = false;              // no candidate passed; 50% discarded
};

// Scans the candidate cut points {0, 1, 2, 5, 10, 20, 50}% of the series and
// returns the first whose retained remainder has |z| < 2. Throws
// ValidationError for series shorter than 100 samples.
GewekeResult geweke_burn_in(const MeasurementSeries& series);
GewekeResult geweke_burn_in(std::span<const double> values, std::span<const std::uint64_t> mcs);

}  // namespace sqa
