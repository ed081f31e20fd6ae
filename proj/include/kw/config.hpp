#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "kw/solver.hpp"

namespace kw {

// Rejected configuration text; `line` is 1-based, and one past the last line for keys that
// are missing altogether.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class Command { solve, semigroup_test, norms, oseen_compare, shock_test, scaling_test, decay_fit };
enum class Scenario { equilibrium, smooth, random, shock, oseen, combined };

// One run, parsed from `key = value` lines. Defaults are the member initializers; command, mu
// and kappa have none.
struct RunConfig {
  Command command = Command::solve;
  // grid
  int dim = 2;
  int n = 64;
  double L = 6.283185307179586;
  // physics; P(rho) = pressure_a rho^pressure_gamma
  double mu = 1.0;
  double kappa = 1.0;
  double rho_bar = 1.0;
  double pressure_a = 1.0;
  double pressure_gamma = 1.0;
  // solver; nodes = J in the graded breaks t_j = T (j / J)^2
  double T = 0.1;
  double T_split = 0.0;
  int nodes = 16;
  int slabs = 1;
  double tol = 1e-8;
  int max_iter = 50;
  MapKind map = MapKind::local;
  Psi2Pairing psi2_pairing = Psi2Pairing::eq381;
  double s1 = 0.9;
  // scenario
  Scenario scenario = Scenario::smooth;
  double amplitude = 0.05;
  double alpha = 1.0;
  double alpha1 = 0.0;
  bool radial_component = true;
  double t0 = 0.01;
  double rho_left = 1.0;
  double rho_right = 1.5;
  double shock_width = 2.0;
  double lambda = 2.0;
  // decay-fit: data in B^{decay_s}, measured in B^{decay_s1}
  double decay_s = 0.0;
  double decay_s1 = 1.0;
  // output
  std::string output = "out";
  std::uint64_t seed = 1;

  std::vector<std::string> warnings;  // duplicate keys and similar notices

  KortewegParams params() const;
  TorusGrid grid() const;
  // Start of the time axis: t0 for vortex scenarios, 0 otherwise.
  double start_time() const;
};

// Full parse and validation; throws ConfigError carrying a line number.
RunConfig parse_config(const std::string& text);
// Effective configuration as parseable text, one key per line in a fixed order.
std::string to_text(const RunConfig& cfg);

std::string command_name(Command c);
std::string scenario_name(Scenario s);

}  // namespace kw
