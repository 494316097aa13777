#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "gbm/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Boundary random walk and general Brownian motion experiments"};
  std::string config_path, mode, out;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  app.add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  auto* mode_opt = app.add_option("--mode", mode, "override the configured mode");
  auto* seed_opt = app.add_option("--seed", seed, "override sim.seed");
  app.add_option("--workers", workers, "worker threads for path simulation")->check(CLI::Range(1u, 1024u));
  auto* out_opt = app.add_option("--out", out, "override output.dir");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : gbm::kExitConfig;
  }

  std::ifstream in(config_path);
  std::stringstream text;
  text << in.rdbuf();
  gbm::Overrides ov;
  if (*mode_opt) ov.mode = mode;
  if (*seed_opt) ov.seed = seed;
  gbm::RunConfig cfg;
  try {
    cfg = gbm::parse_config(text.str(), ov);
  } catch (const gbm::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return gbm::kExitConfig;
  }
  if (*out_opt) cfg.output.dir = out;
  return gbm::run(cfg, gbm::RunOptions{workers}, std::cout);
}
