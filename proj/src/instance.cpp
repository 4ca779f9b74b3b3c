#include "sqa/instance.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sqa/error.hpp"
#include "sqa/rng.hpp"

namespace sqa {

namespace {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_real(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("expected a real number, got '" + s + "'", line);
  }
  if (used != s.size()) throw ParseError("trailing characters in '" + s + "'", line);
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string expect_key(const std::string& raw, const std::string& key, std::size_t line) {
  const std::string text = trim(raw);
  const std::string prefix = key + "=";
  if (text.rfind(prefix, 0) != 0) throw ParseError("expected '" + prefix + "...'", line);
  return text.substr(prefix.size());
}

}  // namespace

std::string to_string(const Distribution& dist) {
  if (std::holds_alternative<Uniform01>(dist)) return "uniform01";
  return "ordered(" + format_real(std::get<Ordered>(dist).coupling) + ")";
}

Distribution parse_distribution(const std::string& tag) {
  if (tag == "uniform01") return Uniform01{};
  if (tag.rfind("ordered(", 0) == 0 && tag.size() > 9 && tag.back() == ')') {
    const std::string inner = tag.substr(8, tag.size() - 9);
    std::size_t used = 0;
    double j = 0.0;
    try {
      j = std::stod(inner, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != inner.size() || !(j > 0.0))
      throw ValidationError("ordered coupling must be a positive real, got '" + inner + "'");
    return Ordered{j};
  }
  if (tag == "ordered") return Ordered{1.0};
  throw ValidationError("unknown distribution tag '" + tag + "'");
}

Instance generate_instance(std::size_t length, const Distribution& dist, std::uint64_t seed) {
  if (length < 2) throw ValidationError("invalid size: chain length must be >= 2");
  Instance inst;
  inst.length = length;
  inst.distribution = dist;
  inst.seed = seed;
  inst.couplings.resize(length - 1);
  if (const auto* ord = std::get_if<Ordered>(&dist)) {
    for (auto& j : inst.couplings) j = ord->coupling;
  } else {
    Rng rng(seed);
    // 1 - u maps [0,1) onto (0,1]
    for (auto& j : inst.couplings) j = 1.0 - rng.uniform();
  }
  return inst;
}

void validate(const Instance& inst) {
  if (inst.length < 2) throw ValidationError("invalid size: chain length must be >= 2");
  if (inst.couplings.size() != inst.length - 1)
    throw ValidationError("expected " + std::to_string(inst.length - 1) + " couplings, got " +
                          std::to_string(inst.couplings.size()));
  for (std::size_t i = 0; i < inst.couplings.size(); ++i)
    if (!(inst.couplings[i] > 0.0))
      throw ValidationError("coupling J_" + std::to_string(i + 1) + " must be positive");
}

double classical_ground_energy(const Instance& inst) {
  double sum = 0.0;
  for (double j : inst.couplings) sum += j;
  return -sum / static_cast<double>(inst.length);
}

std::string format_instance(const Instance& inst) {
  std::ostringstream out;
  out << "L=" << inst.length << '\n';
  out << "distribution=" << to_string(inst.distribution) << '\n';
  out << "seed=" << inst.seed << '\n';
  for (double j : inst.couplings) out << format_real(j) << '\n';
  return out.str();
}

Instance parse_instance(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.size() < 3) throw ParseError("truncated header", lines.size() + 1);

  Instance inst;
  const std::string l_text = expect_key(lines[0], "L", 1);
  try {
    std::size_t used = 0;
    const long long l = std::stoll(l_text, &used);
    if (used != l_text.size() || l < 0) throw std::invalid_argument("L");
    inst.length = static_cast<std::size_t>(l);
  } catch (const std::exception&) {
    throw ParseError("invalid chain length '" + l_text + "'", 1);
  }
  if (inst.length < 2) throw ParseError("invalid size: chain length must be >= 2", 1);
  try {
    inst.distribution = parse_distribution(expect_key(lines[1], "distribution", 2));
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), 2);
  }
  const std::string seed_text = expect_key(lines[2], "seed", 3);
  try {
    std::size_t used = 0;
    inst.seed = std::stoull(seed_text, &used);
    if (used != seed_text.size() || seed_text.front() == '-') throw std::invalid_argument("seed");
  } catch (const std::exception&) {
    throw ParseError("invalid seed '" + seed_text + "'", 3);
  }

  const std::size_t expected = inst.length - 1;
  const std::size_t found = lines.size() - 3;
  if (found != expected)
    throw ParseError("expected " + std::to_string(expected) + " couplings, found " +
                         std::to_string(found),
                     lines.size());
  inst.couplings.reserve(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    const double j = parse_real(trim(lines[3 + i]), 4 + i);
    if (!(j > 0.0))
      throw ValidationError("line " + std::to_string(4 + i) + ": coupling J_" +
                            std::to_string(i + 1) + " must be positive");
    inst.couplings.push_back(j);
  }
  return inst;
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  validate(inst);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write instance file " + path.string());
  out << format_instance(inst);
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read instance file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::uint64_t checksum(const Instance& inst) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : format_instance(inst)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace sqa
