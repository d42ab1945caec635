#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "agmon/families.hpp"
#include "agmon/verify.hpp"

namespace agmon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

// Parsed flags. Family parameters stay textual until the subcommand decides
// whether it wants one value or a start:stop:step grid.
struct RunConfig {
  std::string subcommand;
  std::string spec_path;
  std::string family = "regular-tree";
  std::string b = "2", L, kL = "1", depth = "8", V = "0", E = "-1";
  std::string b_seq, L_seq, a_seq, V_seq, positions;
  std::string kL1 = "1", kL2 = "2";
  std::string delta = "0.1", leg_length = "8";
  std::string w = "1", mode = "antisymmetric", rung_potential;

  std::string multiplier = "rho-a";
  double epsilon = 0.1;
  double shift_delta = 0.0;
  std::string shift_sign = "plus";
  double vertex_extra = 0.0;
  std::string depths;
  std::optional<double> exclusion_radius;

  bool cut_points = false;
  int samples = 9;
  std::string out;
  std::string csv;
};

// start:stop:step, inclusive of stop within half a step. A bare number is a one-point grid.
std::vector<double> parse_grid(const std::string& text);
std::vector<double> parse_list(const std::string& text);

// Family spec from single-valued flags (or the --spec file when given).
FamilySpec family_from_config(const RunConfig& config);

// Relative paths are resolved against $AGMON_OUTPUT_DIR when set.
std::filesystem::path resolve_output(const std::string& path);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace agmon::cli
