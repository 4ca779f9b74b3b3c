#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sqa::io {

// Bumped whenever a column is added, removed or renamed.
inline constexpr int kCsvSchemaVersion = 1;

namespace schema {
inline const std::vector<std::string> exact_eq = {"gamma", "T", "eps_c"};
inline const std::vector<std::string> exact_qa = {"t", "gamma", "eps_res"};
inline const std::vector<std::string> exact_qa_final = {"tau", "eps_res"};
inline const std::vector<std::string> pimc_eq = {"P",      "gamma", "temp",     "moves", "eps_c_est",
                                                 "stderr", "t_burn", "geweke_z", "n_mcs"};
inline const std::vector<std::string> sqa = {"t_mcs",        "gamma",       "eps_avg_mean", "eps_avg_sem",
                                             "eps_min_mean", "eps_min_sem", "n_reps"};
inline const std::vector<std::string> sqa_final = {"tau",          "P",           "moves",  "eps_avg_mean",
                                                   "eps_avg_sem",  "eps_min_mean", "eps_min_sem", "n_reps"};
}  // namespace schema

// Shortest decimal text that reads back to the same double.
std::string format_real(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

  // Throws ValidationError when the row width differs from the header.
  void add_row(std::vector<std::string> row);

  std::size_t column_index(const std::string& name) const;  // throws when absent
  bool has_column(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  std::vector<std::string> text_column(const std::string& name) const;

  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_csv(const CsvTable& table, const std::filesystem::path& path);

// ParseError carries the 1-based line of the offending row.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

// FNV-1a over the file bytes; used to check reproduced outputs.
std::uint64_t file_hash(const std::filesystem::path& path);
std::string hex64(std::uint64_t x);

}  // namespace sqa::io
