#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sqa/error.hpp"
#include "sqa/exact_fermion.hpp"

namespace sqa::analysis {

struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct FitResult {
  std::vector<std::string> names;   // "T_eff" | "exponent" | "gamma", "xi"
  std::vector<double> parameter;
  std::vector<double> stderr_;
  FitWindow window;
  double residual_rms = 0.0;        // relative
  std::size_t points = 0;

  double value() const { return parameter.at(0); }
  double error() const { return stderr_.at(0); }
};

// A fit that ran out of iterations; carries the best candidate seen.
class FitError : public AccuracyError {
 public:
  FitError(const std::string& what, FitResult best) : AccuracyError(what), best_(std::move(best)) {}
  const FitResult& best() const noexcept { return best_; }

 private:
  FitResult best_;
};

struct GammaSample {
  double gamma = 0.0;
  double eps = 0.0;
};

struct TeffOptions {
  FitWindow window{0.0, 1.5};
  double t_min = 0.0;  // the bath temperature; 0 for coherent evolution
  double t_max = 10.0;
};

// Least-squares T_eff with eps(Gamma_j) ~ eps_c(Gamma_j, T_eff) over the
// Gamma window: coarse log scan of the bracket, then golden-section search.
// residual_rms is rms(residual) / rms(data).
FitResult fit_teff(const std::vector<GammaSample>& trajectory, const exact::EquilibriumTable& table,
                   const TeffOptions& opts = {});

struct PowerPoint {
  double tau = 0.0;
  double eps = 0.0;
};

// The central decade (geometric) of the available tau range.
FitWindow central_decade(const std::vector<PowerPoint>& points);

// Ordinary least squares on (log tau, log eps) inside the window; the
// exponent is the slope. residual_rms is the rms of the log residuals.
FitResult fit_power_law(const std::vector<PowerPoint>& points, FitWindow window);

// eps = [log(gamma tau)]^(-xi) fitted in log space over (log gamma, xi).
FitResult fit_log_law(const std::vector<PowerPoint>& points);

}  // namespace sqa::analysis
