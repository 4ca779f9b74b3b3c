#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace sqa {

struct Uniform01 {
  bool operator==(const Uniform01&) const = default;
};

struct Ordered {
  double coupling = 1.0;
  bool operator==(const Ordered&) const = default;
};

using Distribution = std::variant<Uniform01, Ordered>;

// Textual tag: "uniform01" or "ordered(<J>)".
std::string to_string(const Distribution& dist);
Distribution parse_distribution(const std::string& tag);

// Open random Ising chain: L spins, L-1 positive bond couplings.
struct Instance {
  std::size_t length = 0;
  std::vector<double> couplings;
  Distribution distribution = Uniform01{};
  std::uint64_t seed = 0;

  std::size_t bonds() const noexcept { return couplings.size(); }
  bool operator==(const Instance&) const = default;
};

// Throws ValidationError for L < 2.
Instance generate_instance(std::size_t length, const Distribution& dist, std::uint64_t seed);

// Checks the coupling count and positivity; throws ValidationError.
void validate(const Instance& inst);

// -(1/L) sum_i J_i
double classical_ground_energy(const Instance& inst);

std::string format_instance(const Instance& inst);
Instance parse_instance(const std::string& text);

void save_instance(const Instance& inst, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

// FNV-1a over the serialized text; stable across platforms.
std::uint64_t checksum(const Instance& inst);

}  // namespace sqa
