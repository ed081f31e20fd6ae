#include "kw/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "kw/errors.hpp"
#include "kw/scenarios.hpp"

namespace kw {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const Entry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  if (!e.value.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last)
    throw ConfigError(e.line, "key '" + key + "' expects a number, got '" + e.value + "'");
  if (!std::isfinite(v)) throw ConfigError(e.line, "key '" + key + "' must be finite");
  return v;
}

template <class Int>
Int parse_int(const std::string& key, const Entry& e) {
  Int v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  if (!e.value.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec == std::errc::result_out_of_range)
    throw ConfigError(e.line, "key '" + key + "' is out of range: '" + e.value + "'");
  if (ec != std::errc() || ptr != last || first == last)
    throw ConfigError(e.line, "key '" + key + "' expects an integer, got '" + e.value + "'");
  return v;
}

bool parse_bool(const std::string& key, const Entry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw ConfigError(e.line, "key '" + key + "' expects true or false, got '" + e.value + "'");
}

template <class Enum>
Enum parse_enum(const std::string& key, const Entry& e, const std::vector<std::pair<std::string, Enum>>& names) {
  std::string allowed;
  for (const auto& [name, v] : names) {
    if (name == e.value) return v;
    allowed += (allowed.empty() ? "" : "|") + name;
  }
  throw ConfigError(e.line, "key '" + key + "' expects one of " + allowed + ", got '" + e.value + "'");
}

const std::vector<std::pair<std::string, Command>> kCommands = {
    {"solve", Command::solve},         {"semigroup-test", Command::semigroup_test},
    {"norms", Command::norms},         {"oseen-compare", Command::oseen_compare},
    {"shock-test", Command::shock_test}, {"scaling-test", Command::scaling_test},
    {"decay-fit", Command::decay_fit}};
const std::vector<std::pair<std::string, Scenario>> kScenarios = {
    {"equilibrium", Scenario::equilibrium}, {"smooth", Scenario::smooth}, {"random", Scenario::random},
    {"shock", Scenario::shock},             {"oseen", Scenario::oseen},   {"combined", Scenario::combined}};
const std::vector<std::pair<std::string, MapKind>> kMaps = {
    {"local", MapKind::local}, {"global", MapKind::global}, {"hybrid", MapKind::hybrid}};
const std::vector<std::pair<std::string, Psi2Pairing>> kPairings = {{"eq381", Psi2Pairing::eq381},
                                                                    {"eq386", Psi2Pairing::eq386}};

template <class Enum>
std::string name_of(Enum v, const std::vector<std::pair<std::string, Enum>>& names) {
  for (const auto& [name, e] : names)
    if (e == v) return name;
  return "?";
}

using Setter = std::function<void(RunConfig&, const std::string&, const Entry&)>;

Setter real(double RunConfig::*f) {
  return [f](RunConfig& c, const std::string& k, const Entry& e) { c.*f = parse_double(k, e); };
}
Setter integer(int RunConfig::*f) {
  return [f](RunConfig& c, const std::string& k, const Entry& e) { c.*f = parse_int<int>(k, e); };
}

// Key table in echo order.
const std::vector<std::pair<std::string, Setter>>& keys() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"command", [](RunConfig& c, const std::string& k, const Entry& e) { c.command = parse_enum(k, e, kCommands); }},
      {"dim", integer(&RunConfig::dim)},
      {"n", integer(&RunConfig::n)},
      {"L", real(&RunConfig::L)},
      {"mu", real(&RunConfig::mu)},
      {"kappa", real(&RunConfig::kappa)},
      {"rho_bar", real(&RunConfig::rho_bar)},
      {"pressure_a", real(&RunConfig::pressure_a)},
      {"pressure_gamma", real(&RunConfig::pressure_gamma)},
      {"T", real(&RunConfig::T)},
      {"T_split", real(&RunConfig::T_split)},
      {"nodes", integer(&RunConfig::nodes)},
      {"slabs", integer(&RunConfig::slabs)},
      {"tol", real(&RunConfig::tol)},
      {"max_iter", integer(&RunConfig::max_iter)},
      {"map", [](RunConfig& c, const std::string& k, const Entry& e) { c.map = parse_enum(k, e, kMaps); }},
      {"psi2_pairing",
       [](RunConfig& c, const std::string& k, const Entry& e) { c.psi2_pairing = parse_enum(k, e, kPairings); }},
      {"s1", real(&RunConfig::s1)},
      {"scenario",
       [](RunConfig& c, const std::string& k, const Entry& e) { c.scenario = parse_enum(k, e, kScenarios); }},
      {"amplitude", real(&RunConfig::amplitude)},
      {"alpha", real(&RunConfig::alpha)},
      {"alpha1", real(&RunConfig::alpha1)},
      {"radial_component",
       [](RunConfig& c, const std::string& k, const Entry& e) { c.radial_component = parse_bool(k, e); }},
      {"t0", real(&RunConfig::t0)},
      {"rho_left", real(&RunConfig::rho_left)},
      {"rho_right", real(&RunConfig::rho_right)},
      {"shock_width", real(&RunConfig::shock_width)},
      {"lambda", real(&RunConfig::lambda)},
      {"decay_s", real(&RunConfig::decay_s)},
      {"decay_s1", real(&RunConfig::decay_s1)},
      {"output",
       [](RunConfig& c, const std::string& k, const Entry& e) {
         if (e.value.empty()) throw ConfigError(e.line, "key '" + k + "' must not be empty");
         c.output = e.value;
       }},
      {"seed", [](RunConfig& c, const std::string& k, const Entry& e) { c.seed = parse_int<std::uint64_t>(k, e); }},
  };
  return table;
}

const std::vector<std::string> kRequired = {"command", "dim", "n", "L", "mu", "kappa"};

// Invariant checks, reported at the line of the key that completes the violation.
void validate(const RunConfig& c, const std::map<std::string, Entry>& seen, int end_line) {
  auto line_of = [&](std::initializer_list<const char*> ks) {
    int line = 0;
    for (const char* k : ks) {
      const auto it = seen.find(k);
      if (it != seen.end()) line = std::max(line, it->second.line);
    }
    return line > 0 ? line : end_line;
  };
  auto require = [&](bool ok, std::initializer_list<const char*> ks, const std::string& msg) {
    if (!ok) throw ConfigError(line_of(ks), msg);
  };

  require(c.dim >= 1 && c.dim <= 3, {"dim"}, "dim must be 1, 2 or 3");
  require(c.n >= 4 && c.n % 2 == 0, {"n"}, "n must be even and at least 4");
  require(std::pow(static_cast<double>(c.n), c.dim) <= 16777216.0, {"n", "dim"}, "n^dim exceeds 2^24 grid points");
  require(c.L > 0.0, {"L"}, "L must be positive");
  require(c.mu > 0.0, {"mu"}, "mu must be positive (hypothesis 0 < kappa^2 <= mu^2)");
  require(c.kappa != 0.0 && c.kappa * c.kappa <= c.mu * c.mu, {"mu", "kappa"},
          "kappa violates the hypothesis 0 < kappa^2 <= mu^2");
  require(c.rho_bar > 0.0, {"rho_bar"}, "rho_bar must be positive");
  require(c.pressure_a > 0.0, {"pressure_a"}, "pressure_a must be positive");
  require(c.pressure_gamma >= 1.0, {"pressure_gamma"}, "pressure_gamma must be at least 1");
  require(c.T > 0.0, {"T"}, "T must be positive");
  require(c.T_split >= 0.0 && c.T_split <= c.T, {"T_split", "T"}, "T_split must lie in [0, T]");
  require(c.nodes >= 1 && c.nodes <= 4096, {"nodes"}, "nodes must lie in [1, 4096]");
  require(c.slabs >= 1 && c.slabs <= c.nodes, {"slabs", "nodes"}, "slabs must lie in [1, nodes]");
  require(c.map != MapKind::hybrid || c.slabs == 1, {"slabs", "map"}, "the hybrid map runs on a single slab");
  require(c.tol > 0.0, {"tol"}, "tol must be positive");
  require(c.max_iter >= 1 && c.max_iter <= 100000, {"max_iter"}, "max_iter must lie in [1, 100000]");
  require(c.s1 > 0.0 && c.s1 < 1.0, {"s1"}, "s1 must lie in (0, 1)");
  require(c.lambda > 0.0, {"lambda"}, "lambda must be positive");
  require(c.decay_s1 > c.decay_s, {"decay_s", "decay_s1"}, "decay-fit needs decay_s1 > decay_s");
  require(c.rho_left > 0.0 && c.rho_right > 0.0, {"rho_left", "rho_right"}, "shock densities must be positive");
  require(c.shock_width >= 2.0, {"shock_width"}, "shock_width must be at least 2 grid cells");
  if (c.scenario == Scenario::equilibrium)
    require(c.rho_bar + c.amplitude > 0.0, {"amplitude", "rho_bar"}, "equilibrium density rho_bar + amplitude must be positive");
  // Positive initial density: the smooth profile peaks at 1.5 amplitude, random data at amplitude.
  if (c.scenario == Scenario::smooth)
    require(1.5 * std::abs(c.amplitude) < c.rho_bar, {"amplitude", "rho_bar"}, "1.5 amplitude must stay below rho_bar");
  if (c.scenario == Scenario::random)
    require(std::abs(c.amplitude) < c.rho_bar, {"amplitude", "rho_bar"}, "amplitude must stay below rho_bar");

  try {
    c.params();
  } catch (const std::exception& e) {
    throw ConfigError(line_of({"mu", "kappa", "rho_bar", "pressure_a", "pressure_gamma"}), e.what());
  }

  const bool vortex = c.scenario == Scenario::oseen || c.scenario == Scenario::combined ||
                      c.command == Command::oseen_compare;
  if (vortex) {
    require(c.dim == 2, {"dim", "scenario", "command"}, "vortex runs need dim = 2");
    require(c.t0 > 0.0, {"t0"}, "t0 must be positive");
    require(c.T > c.t0, {"T", "t0"}, "vortex runs need T > t0");
    require(4.0 * std::sqrt(c.T) < c.L / 8.0, {"T", "L"}, "vortex core 4 sqrt(T) must fit inside L/8");
  }
  if (c.scenario == Scenario::shock || c.command == Command::shock_test)
    require(c.dim == 1, {"dim", "scenario", "command"}, "shock runs need dim = 1");
  if (c.command == Command::scaling_test)
    require(c.kappa * c.kappa == c.mu * c.mu, {"kappa", "mu", "command"},
            "scaling-test needs the degenerate case kappa^2 = mu^2");
}

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string command_name(Command c) { return name_of(c, kCommands); }
std::string scenario_name(Scenario s) { return name_of(s, kScenarios); }

KortewegParams RunConfig::params() const {
  return KortewegParams::make(mu, kappa, rho_bar, pressure_a, pressure_gamma);
}

TorusGrid RunConfig::grid() const { return TorusGrid(dim, L, n); }

double RunConfig::start_time() const {
  const bool vortex = scenario == Scenario::oseen || scenario == Scenario::combined || command == Command::oseen_compare;
  return vortex ? t0 : 0.0;
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, Entry> seen;
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value', got '" + body + "'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "missing key before '='");
    bool known = false;
    for (const auto& [k, set] : keys()) known = known || k == key;
    if (!known) throw ConfigError(line, "unknown key '" + key + "'");
    const auto it = seen.find(key);
    if (it != seen.end())
      cfg.warnings.push_back("line " + std::to_string(line) + ": duplicate key '" + key + "' overrides line " +
                             std::to_string(it->second.line));
    seen[key] = {value, line};
  }
  const int end_line = line + 1;

  for (const auto& k : kRequired)
    if (!seen.count(k)) throw ConfigError(end_line, "missing required key '" + k + "'");
  for (const auto& [k, set] : keys()) {
    const auto it = seen.find(k);
    if (it != seen.end()) set(cfg, k, it->second);
  }
  validate(cfg, seen, end_line);
  return cfg;
}

std::string to_text(const RunConfig& c) {
  std::ostringstream os;
  os << "command = " << command_name(c.command) << "\n"
     << "dim = " << c.dim << "\n"
     << "n = " << c.n << "\n"
     << "L = " << format_double(c.L) << "\n"
     << "mu = " << format_double(c.mu) << "\n"
     << "kappa = " << format_double(c.kappa) << "\n"
     << "rho_bar = " << format_double(c.rho_bar) << "\n"
     << "pressure_a = " << format_double(c.pressure_a) << "\n"
     << "pressure_gamma = " << format_double(c.pressure_gamma) << "\n"
     << "T = " << format_double(c.T) << "\n"
     << "T_split = " << format_double(c.T_split) << "\n"
     << "nodes = " << c.nodes << "\n"
     << "slabs = " << c.slabs << "\n"
     << "tol = " << format_double(c.tol) << "\n"
     << "max_iter = " << c.max_iter << "\n"
     << "map = " << name_of(c.map, kMaps) << "\n"
     << "psi2_pairing = " << name_of(c.psi2_pairing, kPairings) << "\n"
     << "s1 = " << format_double(c.s1) << "\n"
     << "scenario = " << scenario_name(c.scenario) << "\n"
     << "amplitude = " << format_double(c.amplitude) << "\n"
     << "alpha = " << format_double(c.alpha) << "\n"
     << "alpha1 = " << format_double(c.alpha1) << "\n"
     << "radial_component = " << (c.radial_component ? "true" : "false") << "\n"
     << "t0 = " << format_double(c.t0) << "\n"
     << "rho_left = " << format_double(c.rho_left) << "\n"
     << "rho_right = " << format_double(c.rho_right) << "\n"
     << "shock_width = " << format_double(c.shock_width) << "\n"
     << "lambda = " << format_double(c.lambda) << "\n"
     << "decay_s = " << format_double(c.decay_s) << "\n"
     << "decay_s1 = " << format_double(c.decay_s1) << "\n"
     << "output = " << c.output << "\n"
     << "seed = " << c.seed << "\n";
  return os.str();
}

}  // namespace kw
