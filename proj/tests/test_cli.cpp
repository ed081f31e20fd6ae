#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "kw/config.hpp"
#include "kw/runner.hpp"
#include "kw/snapshot.hpp"

using namespace kw;
namespace fs = std::filesystem;

namespace {

const std::string kMinimal =
    "command = solve\n"
    "dim = 2\n"
    "n = 16\n"
    "L = 6.283185307179586\n"
    "mu = 1\n"
    "kappa = 0.6\n";

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kw_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

int line_count(const std::string& text) {
  int n = 0;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) ++n;
  return n;
}

// Column `name` of the first data row.
double csv_value(const fs::path& p, const std::string& name) {
  std::istringstream in(slurp(p));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::istringstream h(header), r(row);
  std::string col, val;
  while (std::getline(h, col, ',') && std::getline(r, val, ','))
    if (col == name) return std::stod(val);
  FAIL("column " << name << " missing in " << p);
  return 0.0;
}

}  // namespace

TEST_CASE("minimal config fills documented defaults") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.command == Command::solve);
  CHECK(c.rho_bar == 1.0);
  CHECK(c.pressure_a == 1.0);
  CHECK(c.pressure_gamma == 1.0);
  CHECK(c.params().pressure(1.7) == doctest::Approx(1.7));
  CHECK(c.map == MapKind::local);
  CHECK(c.psi2_pairing == Psi2Pairing::eq381);
  CHECK(c.seed == 1);
  CHECK(c.warnings.empty());
}

TEST_CASE("comments, blank lines and spacing") {
  const RunConfig c = parse_config("# header\n\n" + kMinimal + "  T=0.25   # trailing\n\tmap =\tglobal\n");
  CHECK(c.T == 0.25);
  CHECK(c.map == MapKind::global);
}

TEST_CASE("effective config text parses back to itself") {
  RunConfig c = parse_config(kMinimal + "scenario = random\namplitude = 0.125\nseed = 18446744073709551615\n");
  const std::string once = to_text(c);
  CHECK(to_text(parse_config(once)) == once);
  CHECK(to_text(parse_config(manifest_text(c))) == once);
  CHECK(parse_config(once).seed == 18446744073709551615ull);
}

TEST_CASE("rejections carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of(kMinimal + "bogus = 1\n") == 7);
  CHECK(line_of(kMinimal + "T = fast\n") == 7);
  CHECK(line_of(kMinimal + "nodes = 2.5\n") == 7);
  CHECK(line_of(kMinimal + "no equals sign\n") == 7);
  CHECK(line_of(kMinimal + "tol = -1\n") == 7);
  CHECK(line_of(kMinimal + "map = sideways\n") == 7);
  CHECK(line_of(kMinimal + "T = nan\n") == 7);
  // Missing required keys point one past the last line.
  CHECK(line_of("command = solve\ndim = 2\n") == 3);

  try {
    parse_config("command = solve\ndim = 2\nn = 16\nL = 1\nkappa = 2\nmu = 1\n");
    FAIL("accepted kappa^2 > mu^2");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 6);
    CHECK(std::string(e.what()).find("0 < kappa^2 <= mu^2") != std::string::npos);
  }
}

TEST_CASE("duplicate keys: last wins with a warning") {
  const RunConfig c = parse_config(kMinimal + "T = 0.3\nT = 0.4\n");
  CHECK(c.T == 0.4);
  REQUIRE(c.warnings.size() == 1);
  CHECK(c.warnings[0].find("line 8") != std::string::npos);
  CHECK(c.warnings[0].find("line 7") != std::string::npos);
}

TEST_CASE("fuzzed configs never crash and every rejection has a line") {
  const std::string base = kMinimal +
                           "T = 0.1\nnodes = 8\nmap = global\nscenario = smooth\namplitude = 0.1\n"
                           "# comment\nseed = 7\n";
  const std::string alphabet = "=#\n \t.-+eE0123456789abcdefghijklmnopqrstuvwxyz_\xc3\xa9";
  std::mt19937_64 rng(2024);
  int accepted = 0, rejected = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::string text = base;
    const int edits = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edits; ++e) {
      const std::size_t pos = text.empty() ? 0 : rng() % text.size();
      const char ch = alphabet[rng() % alphabet.size()];
      switch (rng() % 5) {
        case 0: text.insert(text.begin() + pos, ch); break;
        case 1: if (!text.empty()) text.erase(pos, 1); break;
        case 2: if (!text.empty()) text[pos] = ch; break;
        case 3: {  // duplicate a line
          const auto b = text.rfind('\n', pos), end = text.find('\n', pos);
          const std::size_t from = b == std::string::npos ? 0 : b + 1;
          text += text.substr(from, (end == std::string::npos ? text.size() : end + 1) - from);
          break;
        }
        default: text.insert(pos, std::to_string(static_cast<long long>(rng() % 2000000) - 1000000)); break;
      }
    }
    try {
      parse_config(text);
      ++accepted;
    } catch (const ConfigError& e) {
      ++rejected;
      CHECK(e.line() >= 1);
      CHECK(e.line() <= line_count(text) + 1);
    }
  }
  CHECK(accepted > 0);
  CHECK(rejected > 0);
}

TEST_CASE("solve on equilibrium data converges in one iteration") {
  RunConfig c = parse_config(kMinimal + "scenario = equilibrium\namplitude = 0.2\nnodes = 4\n");
  c.output = scratch("equilibrium").string();
  std::ostringstream log;
  REQUIRE(run(c, log) == kExitOk);
  const fs::path dir(c.output);
  CHECK(csv_value(dir / "summary.csv", "iterations") == 1);
  CHECK(csv_value(dir / "summary.csv", "converged") == 1);
  CHECK(csv_value(dir / "summary.csv", "residual") <= 1e-12);
  CHECK(read_snapshot((dir / "q_final.kwf").string()).at(0, 0).real() == doctest::Approx(0.2));
  CHECK(parse_config(slurp(dir / "manifest.txt")).output == c.output);
  CHECK(slurp(dir / "manifest.txt").find(std::string("# code_version ") + code_version()) == 0);
}

TEST_CASE("identical config and seed give byte-identical CSVs") {
  for (const char* extra : {"scenario = random\namplitude = 0.1\nnodes = 6\n",
                            "command = semigroup-test\nn = 32\n"}) {
    RunConfig a = parse_config(kMinimal + extra), b = a;
    a.output = scratch("det_a").string();
    b.output = scratch("det_b").string();
    std::ostringstream log;
    REQUIRE(run(a, log) == kExitOk);
    REQUIRE(run(b, log) == kExitOk);
    int files = 0;
    for (const auto& e : fs::directory_iterator(a.output)) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      CHECK(slurp(e.path()) == slurp(fs::path(b.output) / e.path().filename()));
    }
    CHECK(files >= 1);
  }
  // A different seed changes random data.
  RunConfig a = parse_config(kMinimal + "scenario = random\nnodes = 4\n"), b = a;
  b.seed = 2;
  a.output = scratch("seed_a").string();
  b.output = scratch("seed_b").string();
  std::ostringstream log;
  REQUIRE(run(a, log) == kExitOk);
  REQUIRE(run(b, log) == kExitOk);
  CHECK(slurp(fs::path(a.output) / "iterations.csv") != slurp(fs::path(b.output) / "iterations.csv"));
}

TEST_CASE("semigroup-test on defaults fits positive rates") {
  RunConfig c = parse_config("command = semigroup-test\ndim = 2\nn = 64\nL = 6.283185307179586\nmu = 1\nkappa = 1\n");
  c.output = scratch("semigroup").string();
  std::ostringstream log;
  REQUIRE(run(c, log) == kExitOk);
  std::istringstream in(slurp(fs::path(c.output) / "semigroup.csv"));
  std::string row;
  std::getline(in, row);
  int rows = 0;
  while (std::getline(in, row)) {
    ++rows;
    const double kappa = std::stod(row.substr(row.rfind(',') + 1));
    CHECK(kappa > 0.0);
  }
  CHECK(rows >= 12);
}

TEST_CASE("divergence exits 3 and still writes the iteration report") {
  RunConfig c = parse_config(kMinimal +
                             "scenario = smooth\namplitude = 0.6\npressure_gamma = 2\nT = 4\nnodes = 8\nn = 32\n");
  c.output = scratch("divergence").string();
  std::ostringstream log;
  CHECK(run(c, log) == kExitDivergence);
  CHECK(fs::exists(fs::path(c.output) / "iterations.csv"));
  CHECK(csv_value(fs::path(c.output) / "summary.csv", "converged") == 0);
  CHECK(log.str().find("divergence") != std::string::npos);

  // Running out of iterations is reported the same way.
  c = parse_config(kMinimal + "scenario = smooth\namplitude = 0.2\nmax_iter = 2\ntol = 1e-14\nnodes = 4\n");
  c.output = scratch("max_iter").string();
  CHECK(run(c, log) == kExitDivergence);
  CHECK(csv_value(fs::path(c.output) / "summary.csv", "iterations") == 2);
}

TEST_CASE("unwritable output exits 4") {
  const fs::path blocker = scratch("blocker");
  std::ofstream(blocker) << "a file, not a directory";
  RunConfig c = parse_config(kMinimal);
  c.output = (blocker / "sub").string();
  std::ostringstream log;
  CHECK(run(c, log) == kExitIo);
}

TEST_CASE("command-line front-end") {
  const fs::path dir = scratch("binary");
  fs::create_directories(dir);
  const fs::path good = dir / "good.cfg", bad = dir / "bad.cfg";
  std::ofstream(good) << kMinimal << "scenario = equilibrium\nnodes = 2\n";
  std::ofstream(bad) << kMinimal << "kappa = 3\n";
  const std::string exe = KW_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " 2>/dev/null").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(status(exe + " --config " + good.string() + " --out " + (dir / "out").string() + " --seed 5 --threads 2") == 0);
  CHECK(parse_config(slurp(dir / "out" / "manifest.txt")).seed == 5);
  CHECK(status(exe + " --config " + bad.string()) == 2);
  CHECK(status(exe + " --config " + (dir / "missing.cfg").string()) == 4);
  CHECK(status(exe + " --bogus-flag") == 2);
  CHECK(status(exe + " --config " + good.string() + " --threads 0") == 2);
}
