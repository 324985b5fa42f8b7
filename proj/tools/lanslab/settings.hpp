#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace lanslab::cli {

enum class ExitCode : int { pass = 0, fail = 1, usage = 2, inconclusive = 3 };

// Thrown for values that parse but cannot run; maps to ExitCode::usage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every run parameter. Config keys use the underscore spelling of each name;
// command-line flags accept both spellings.
struct Settings {
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out = "lanslab_out";
  std::uint64_t seed = 1;

  std::string suite;
  std::string equation = "lans";

  // Lists only for sweep; other commands take exactly one value. Empty picks
  // the command default.
  std::vector<double> alpha;
  std::vector<double> nu;
  std::vector<int> n;
  std::vector<double> dt;
  double t_end = 0.05;
  double box_length = 0.0;  // 0: 2 pi
  double dealias_fraction = 2.0 / 3.0;

  double init_norm = 0.1;  // ||w0||_{B^{3/2}_{2,q}}
  double init_slope = 1.0;
  double v_norm = 0.0;  // mlans: v data norm, 0 means v = 0

  double p = 6.0;
  double p_tilde = 30.0;
  double q = 2.0;
  double epsilon = 1e-3;
  int j_cut = -1;
  int j_cut_max = -1;
  double tolerance_factor = 10.0;
  double picard_tol = 1e-10;
  int picard_max_iters = 60;
  bool monitors = true;

  int members = 100;
  int output_every = 1;
  int jobs = 0;  // 0: hardware concurrency
  bool checkpoints = true;

  double alpha_value(double fallback) const;
  double nu_value(double fallback) const;
  int n_value(int fallback) const;
  double dt_value(double fallback) const;
  double box() const;

  // Resolved parameters in a fixed key order, as recorded in the manifest.
  nlohmann::json to_json() const;
};

// Registers all options on app (subcommands fall through to it).
void add_options(CLI::App& app, Settings& s);

// Builds the parser, parses argv and fills s. Returns an exit code when
// parsing ends the run (help printed: pass, bad input: usage).
std::optional<ExitCode> parse_command_line(int argc, const char* const* argv, Settings& s, std::ostream& out,
                                           std::ostream& err);

std::vector<std::string> split_list(const std::string& text);

}  // namespace lanslab::cli
