#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "kw/config.hpp"
#include "kw/parallel.hpp"
#include "kw/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral mild-solution solver for the compressible Korteweg system"};
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--config", config_path, "key = value run configuration")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides the output key)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the seed key)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 1024));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kw::kExitOk : kw::kExitConfig;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read config " << config_path << '\n';
    return kw::kExitIo;
  }
  std::ostringstream text;
  text << in.rdbuf();

  kw::RunConfig cfg;
  try {
    cfg = kw::parse_config(text.str());
  } catch (const kw::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return kw::kExitConfig;
  }
  for (const auto& w : cfg.warnings) std::cerr << config_path << ": warning: " << w << '\n';
  if (*out_opt) cfg.output = out_dir;
  if (*seed_opt) cfg.seed = seed;

  kw::set_thread_count(threads);
  return kw::run(cfg, std::cerr);
}
