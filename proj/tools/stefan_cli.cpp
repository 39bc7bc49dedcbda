// Command-line front end. Exit codes: 0 success, 1 configuration error, 2 validity breach.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stefan/stefan.hpp"

namespace {

using namespace stefan;

constexpr int kExitConfig = 1;
constexpr int kExitBreach = 2;

ScenarioConfig load_or_default(const std::optional<std::string>& path) {
  return path ? load_config(*path) : default_config();
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", *v);
  return buf;
}

std::string cell(double v) { return std::isfinite(v) ? cell(std::optional<double>(v)) : "-"; }

void print_table(const std::vector<std::string>& labels, const std::vector<ScenarioResult>& results) {
  std::printf("%-24s %-16s %8s %8s %10s %10s %10s %12s %10s %s\n", "label", "kind", "updates", "thresh", "min_dwell",
              "mean_dwell", "max_dwell", "t_converge", "final|X|", "status");
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto row = comparison_row(results[i]);
    std::printf("%-24s %-16s %8zu %8zu %10s %10s %10s %12s %10s %s\n", labels[i].c_str(), row.kind.c_str(),
                row.updates, row.threshold_events, cell(row.min_dwell).c_str(), cell(row.mean_dwell).c_str(),
                cell(row.max_dwell).c_str(), cell(row.convergence_time).c_str(), cell(row.final_abs_X).c_str(),
                row.completed ? "ok" : ("breach: " + results[i].breach->condition).c_str());
  }
}

int report_results(const std::vector<std::string>& labels, const std::vector<ScenarioResult>& results) {
  print_table(labels, results);
  int code = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto dir = output_directory(results[i].config) / labels[i];
    emit_outputs(results[i], dir);
    if (!results[i].completed()) code = kExitBreach;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Observer-based event-triggered boundary control of the one-phase Stefan problem"};
  app.require_subcommand(1);

  std::optional<std::string> derive_cfg, validate_cfg, run_cfg, sweep_cfg;
  std::vector<std::string> compare_cfgs;
  std::string sweep_param;
  std::vector<std::string> sweep_values;

  auto* derive = app.add_subcommand("derive", "print every derived constant");
  derive->add_option("config", derive_cfg, "configuration file (default: built-in paraffin setup)");
  auto* validate = app.add_subcommand("validate", "check the initial data conditions");
  validate->add_option("config", validate_cfg, "configuration file");
  auto* run = app.add_subcommand("run", "run one scenario and write its outputs");
  run->add_option("config", run_cfg, "configuration file");
  auto* compare = app.add_subcommand("compare", "run scenarios side by side");
  compare->add_option("configs", compare_cfgs,
                      "configuration files (default: event-triggered, sampled-data and continuous runs)");
  auto* sweep = app.add_subcommand("sweep", "rerun a configuration over values of one parameter");
  sweep->add_option("config", sweep_cfg, "configuration file");
  sweep->add_option("--param", sweep_param, "section.key to vary")->required();
  sweep->add_option("--values", sweep_values, "values to substitute")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (derive->parsed()) {
      const auto cfg = load_or_default(derive_cfg);
      const auto phys = derive_physical(cfg.physical);
      std::cout << derivation_report(phys, cfg.controller, cfg.trigger,
                                     derive_trigger(phys, cfg.controller, cfg.trigger));
      return 0;
    }
    if (validate->parsed()) {
      const auto cfg = load_or_default(validate_cfg);
      const auto phys = derive_physical(cfg.physical);
      const auto rep = validate_initial_data(cfg.initial_data(phys), cfg.controller, phys);
      std::printf("H = %.6g  H_hat_l = %.6g  H_hat_u = %.6g\n", rep.H, rep.H_hat_l, rep.H_hat_u);
      for (const auto& c : rep.checks)
        std::printf("%-4s %-32s margin %-14.6g %s\n", c.passed ? "pass" : "FAIL", c.name.c_str(), c.margin,
                    c.detail.c_str());
      return rep.passed() ? 0 : kExitBreach;
    }
    if (run->parsed()) {
      const auto cfg = load_or_default(run_cfg);
      const auto result = run_scenario(cfg);
      return report_results({to_string(cfg.scenario.kind)}, {result});
    }
    if (compare->parsed()) {
      std::vector<ScenarioConfig> cfgs;
      std::vector<std::string> labels;
      if (compare_cfgs.empty()) {
        cfgs = reference_comparison(default_config());
      } else {
        for (const auto& p : compare_cfgs) cfgs.push_back(load_config(p));
      }
      for (std::size_t i = 0; i < cfgs.size(); ++i)
        labels.push_back(std::to_string(i) + "_" + to_string(cfgs[i].scenario.kind));
      return report_results(labels, compare_scenarios(cfgs));
    }
    if (sweep->parsed()) {
      const auto base = load_or_default(sweep_cfg);
      std::vector<ScenarioConfig> cfgs;
      std::vector<std::string> labels;
      for (const auto& v : sweep_values) {
        cfgs.push_back(with_override(base, sweep_param, v));
        labels.push_back(sweep_param + "=" + v);
      }
      std::vector<ScenarioResult> results;
      for (const auto& c : cfgs) results.push_back(run_scenario(c));
      return report_results(labels, results);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InternalConsistency& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ValidityBreach& e) {
    std::cerr << "validity breach (" << to_string(e.condition()) << "): " << e.what() << '\n';
    return kExitBreach;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
