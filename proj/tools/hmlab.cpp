#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "hmlab/cli/run.hpp"
#include "hmlab/core/errors.hpp"
#include "hmlab/io/csv.hpp"

namespace {

int run_mode(hmlab::cli::Mode mode, const std::string& config_path, const std::string& out) {
  using namespace hmlab;
  auto j = nlohmann::json::parse(io::read_text(config_path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("(document)", "malformed JSON in " + config_path);
  if (!j.is_object()) throw ConfigError("(root)", "expected an object");
  j["mode"] = cli::to_string(mode);
  auto cfg = cli::config_from_json(j);
  // --out wins over OUTPUT_DIR, which wins over the config file.
  if (!out.empty()) cfg.output_dir = out;
  else if (const char* env = std::getenv("OUTPUT_DIR"); env && *env) cfg.output_dir = env;
  const auto m = cli::execute(cfg);
  for (const auto& c : m.checks)
    std::cout << c.name << ": " << cli::to_string(c.status) << " (" << c.value << " vs " << c.threshold << ")"
              << (c.detail.empty() ? "" : " " + c.detail) << "\n";
  std::cout << "manifest: " << cfg.output_dir << "/manifest.json (" << (m.all_pass() ? "all checks pass" : "some checks fail")
            << ")\n";
  return m.all_pass() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  using hmlab::cli::Mode;
  CLI::App app{"Corotational harmonic map flow lab"};
  app.require_subcommand(0, 1);
  bool list = false;
  app.add_flag("--list-checks", list, "print the check registry and exit");

  std::string config, out;
  const std::pair<const char*, Mode> modes[] = {{"simulate", Mode::simulate},
                                                {"analyze", Mode::analyze},
                                                {"kernel-verify", Mode::kernel_verify},
                                                {"barrier-verify", Mode::barrier_verify},
                                                {"sweep", Mode::sweep}};
  const char* help[] = {"integrate the flow and export snapshots", "simulate, then run the neck measurements",
                        "verify the radial heat kernels", "verify the supersolution barriers",
                        "run a cross product of configs"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < 5; ++i) {
    auto* s = app.add_subcommand(modes[i].first, help[i]);
    s->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    s->add_option("--out", out, "output directory (overrides OUTPUT_DIR and the config)");
    subs.push_back(s);
  }
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& c : hmlab::cli::check_registry())
      std::cout << c.name << "\t" << hmlab::cli::to_string(c.mode) << "\t" << c.description << "\n";
    return 0;
  }
  try {
    for (std::size_t i = 0; i < 5; ++i)
      if (subs[i]->parsed()) return run_mode(modes[i].second, config, out);
    std::cerr << app.help();
    return 2;
  } catch (const hmlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
