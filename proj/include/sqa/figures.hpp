#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "sqa/analysis.hpp"
#include "sqa/annealing.hpp"
#include "sqa/equilibrium.hpp"
#include "sqa/instance.hpp"
#include "sqa/io.hpp"
#include "sqa/sweep.hpp"

namespace sqa::figures {

// Stable stream id for a parameter point: the same point gets the same
// random stream whatever else is in the sweep and in whatever order.
std::uint64_t point_seed(std::uint64_t master, std::initializer_list<double> key);

// Seed of one annealing curve (all its repetitions).
std::uint64_t curve_seed(std::uint64_t master, std::size_t trotter, pimc::MoveFamily moves, std::uint64_t tau);

// ---- equilibrium PIMC sweeps -------------------------------------------

struct EqPoint {
  std::size_t trotter = 1;
  double gamma = 1.0;
  double temperature = 1.0;
  pimc::MoveFamily moves = pimc::MoveFamily::spacetime_sw;
  std::size_t rep = 0;
};

struct EqRow {
  EqPoint point;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::uint64_t t_burn = 0;
  double geweke_z = 0.0;
  bool capped = false;
  std::uint64_t n_mcs = 0;
};

// Results come back in point order; a failing point does not stop the rest.
SweepOutcome<EqRow> pimc_sweep(const Instance& inst, const std::vector<EqPoint>& points, std::uint64_t t_run,
                               std::uint64_t seed, std::size_t workers);

// Completed rows only.
io::CsvTable pimc_table(const SweepOutcome<EqRow>& outcome);

// AccuracyError naming every failed point.
void require_complete(const SweepOutcome<EqRow>& outcome);

// ---- annealing ---------------------------------------------------------

struct SqaCurve {
  std::size_t trotter = 1;
  pimc::MoveFamily moves = pimc::MoveFamily::time_cluster;
  std::uint64_t tau = 1;
  std::vector<anneal::TrajectoryPoint> points;

  const anneal::TrajectoryPoint& final() const { return points.back(); }
};

struct SqaSettings {
  double temperature = 0.01;
  std::size_t reps = 16;
  std::size_t records = 100;  // per trajectory
  std::size_t t_eq = 0;       // 0: the annealing default
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

SqaCurve sqa_curve(const Instance& inst, std::size_t trotter, pimc::MoveFamily moves, std::uint64_t tau,
                   const SqaSettings& s);

io::CsvTable sqa_trajectory_table(const SqaCurve& c);
io::CsvTable sqa_final_table(const std::vector<SqaCurve>& curves);

struct QaCurve {
  double tau = 1.0;
  std::vector<TrajectoryRecord> records;

  double final() const { return records.back().eps_avg; }
};

QaCurve qa_curve(const Instance& inst, double tau, double gamma0, std::size_t records);

io::CsvTable qa_trajectory_table(const QaCurve& c);
io::CsvTable qa_final_table(const std::vector<QaCurve>& curves);

io::CsvTable exact_table(const Instance& inst, const std::vector<double>& gammas,
                         const std::vector<double>& temperatures);

nlohmann::ordered_json fit_json(const analysis::FitResult& r);

// ---- figure presets ----------------------------------------------------

struct Fig1Spec {
  std::size_t length = 64;
  double temperature = 0.1;
  std::vector<double> gammas;  // panel a, panel b
  std::vector<std::size_t> trotters;
  std::vector<pimc::MoveFamily> families;
  std::uint64_t t_run = 100000;
};

struct AnnealSpec {
  std::size_t length = 256;
  bool ordered = false;
  double temperature = 0.01;
  std::vector<std::size_t> trotters;
  pimc::MoveFamily moves = pimc::MoveFamily::time_cluster;
  std::vector<std::uint64_t> taus;
  std::size_t reps = 16;
  std::size_t records = 100;
  std::size_t t_eq = 0;  // 0: the annealing default
};

struct QaSpec {
  std::vector<double> taus;
  std::size_t records = 100;
};

struct Fig2Spec {
  AnnealSpec sqa;
  analysis::FitWindow window{10, 1000};
};

struct Fig3Spec {
  AnnealSpec time;
  AnnealSpec spacetime;
};

struct Fig4Spec {
  AnnealSpec sqa;  // one P, a few tau
  QaSpec qa;
  analysis::FitWindow window{0.0, 1.5};
};

struct Fig5Spec {
  AnnealSpec sqa;  // one P
  QaSpec qa;
  // empty windows select the central decade
  analysis::FitWindow qa_window;
  analysis::FitWindow sqa_window;
};

Fig1Spec fig1_spec(bool desk);
Fig2Spec fig2_spec(bool desk);
Fig3Spec fig3_spec(bool desk);
Fig4Spec fig4_spec(bool desk);
Fig5Spec fig5_spec(bool desk);

std::uint64_t estimate_mcs(const Fig1Spec& s);
std::uint64_t estimate_mcs(const AnnealSpec& s);
std::uint64_t estimate_mcs(const std::string& figure, bool desk);

// ---- pipelines ---------------------------------------------------------

struct FigureContext {
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool desk = false;
  std::uint64_t max_mcs = 0;  // 0: unlimited
};

struct FigureOutput {
  std::vector<std::string> files;  // relative to out_dir
  std::string instance_checksum;
  nlohmann::ordered_json params;
  std::uint64_t estimated_mcs = 0;
};

const std::vector<std::string>& figure_ids();

// Throws ValidationError for an unknown id or when the estimate exceeds
// max_mcs (the message carries the estimate).
FigureOutput run_figure(const std::string& id, const FigureContext& ctx);

}  // namespace sqa::figures
