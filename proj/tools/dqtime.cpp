// dqtime: command-line runner for the gadget experiments.
//
//   dqtime timer --N 256 --gamma 1 --x-grid -3:3:0.25
//   dqtime transfer --n 3 --seeds 20 --threads 4
//   dqtime run --config experiment.json --check
//   dqtime build timer --N 3
//
// Output goes to --out-dir, else $DQT_OUT_DIR, else the current directory.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dqt/acceptance.hpp"
#include "dqt/experiment.hpp"

namespace {

using dqt::experiment::json;

// Parameter keys exposed as --flags per experiment.
const std::map<std::string, std::vector<std::string>>& flag_table() {
  static const std::map<std::string, std::vector<std::string>> t{
      {"initializer", {"M", "omega", "Gamma", "t-grid", "delta", "c", "k-max"}},
      {"timer", {"N", "gamma", "x-grid"}},
      {"cutoff-profile", {"N-list", "gamma", "x-grid"}},
      {"sharp-threshold", {"c-list", "N-list", "gamma"}},
      {"concat-error", {"L", "N-list", "gamma", "total-N"}},
      {"trunc-normal", {"alpha-list", "beta-list", "N-list", "omega", "Gamma"}},
      {"imperfect-init", {"N", "eps-list", "t-gamma", "gamma"}},
      {"transfer", {"n", "omega", "input", "seeds", "eq-tol", "layout"}},
      {"oracle-suite", {"max-qubits"}},
  };
  return t;
}

int run_acceptance() {
  int failed = 0;
  for (const auto& c : dqt::acceptance::criteria()) {
    const auto r = c();
    std::printf("%s criterion %d: %s -- %s\n", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.detail.c_str());
    std::fflush(stdout);
    failed += r.passed ? 0 : 1;
  }
  return failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissipative gadget simulations and bound checks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir;
  bool check = false;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  app.add_option("--out-dir", out_dir, "Directory for CSV/JSON artifacts");
  app.add_flag("--check", check, "Run the acceptance suite afterwards; nonzero exit if any criterion fails");
  app.add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::Range(1U, 256U));
  app.add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { seed = s, seed_given = true; }, "Random seed");

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, keys] : flag_table()) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " experiment");
    for (const auto& k : keys) sub->add_option("--" + k, values[name][k]);
    subs[name] = sub;
  }

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("--config", config_path, "Config file")->required();

  std::string build_name;
  std::vector<std::string> build_params;
  auto* build = app.add_subcommand("build", "Print a named generator as JSON");
  build->add_option("name", build_name, "initializer, timer, transfer-3, transfer-n, transfer-compressed")->required();
  build->add_option("--param,-p", build_params, "key=value parameter");

  auto* check_cmd = app.add_subcommand("check", "Run the acceptance suite only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors share the config-error exit code
  }

  try {
    if (*check_cmd) return run_acceptance() == 0 ? 0 : 1;

    if (*build) {
      json p = json::object();
      for (const auto& kv : build_params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw dqt::experiment::config_error("build parameter must be key=value: " + kv);
        p[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      std::cout << dqt::experiment::build_named(build_name, dqt::experiment::Params(p)).dump(2) << "\n";
      return 0;
    }

    std::string name;
    json params = json::object();
    dqt::experiment::Context ctx;
    if (*run) {
      const auto cfg = dqt::experiment::load_config(config_path);
      name = cfg.experiment;
      params = cfg.params;
      ctx.seed = cfg.seed;
      if (!cfg.out_dir.empty()) ctx.out_dir = cfg.out_dir;
    } else {
      for (const auto& [n, sub] : subs)
        if (*sub) {
          name = n;
          for (const auto& [k, v] : values[n])
            if (sub->count("--" + k)) params[k] = v;
        }
    }
    if (seed_given) ctx.seed = seed;
    if (!out_dir.empty())
      ctx.out_dir = out_dir;
    else if (ctx.out_dir == ".")
      if (const char* env = std::getenv("DQT_OUT_DIR"); env && *env) ctx.out_dir = env;
    ctx.threads = threads;

    auto outcome = dqt::experiment::run_experiment(name, params, ctx);
    dqt::experiment::detail::write_file(ctx, outcome, name + ".summary.json", outcome.summary.dump(2) + "\n");
    json report = {{"experiment", name}, {"summary", outcome.summary}, {"files", outcome.files}, {"ok", outcome.ok}};
    std::cout << report.dump(2) << "\n";
    int code = outcome.ok ? 0 : 3;
    if (check && run_acceptance() != 0) code = 1;
    return code;
  } catch (const dqt::experiment::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
