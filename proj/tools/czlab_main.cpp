#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "czlab/config.hpp"
#include "czlab/report.hpp"
#include "czlab/suite.hpp"

namespace {

struct CliArgs {
  std::string config;
  std::string out;
  int threads = 0;
  std::uint64_t seed = 0;
  bool strict = false;
  std::string which = "quick";
};

const char* describe(const std::string& op) {
  if (op == "measure-gen") return "generate a measure and its growth statistics";
  if (op == "apply") return "evaluate the truncated transform on targets";
  if (op == "norm") return "matrix-free operator norm via power iteration";
  if (op == "defect") return "reflectionless defect over the standard test family";
  if (op == "ttilde") return "normalized potential on a truncation grid";
  if (op == "riesz-system") return "dyadic cubes, Riesz family scaling, Carleson packing";
  if (op == "collapse-schedule") return "iterate the threshold decay schedule";
  if (op == "porosity") return "dichotomy scan for interior holes";
  if (op == "riesz-checks") return "grid experiments: divergence, principal value, Fourier density";
  return "run the quick or acceptance battery";
}

int run_cli(const std::string& op, const CliArgs& a, const CLI::App& sub) {
  czlab::ExperimentConfig cfg;
  try {
    if (!a.config.empty()) {
      cfg = czlab::load_config_file(a.config);
      if (cfg.operation != op) {
        std::fprintf(stderr, "config operation '%s' does not match subcommand '%s'\n",
                     cfg.operation.c_str(), op.c_str());
        return 2;
      }
    } else {
      if (op != "suite") {
        std::fprintf(stderr, "%s: --config required\n", op.c_str());
        return 2;
      }
      cfg.operation = "suite";
      cfg.seed = a.seed;
      cfg.params = {{"which", a.which}};
      cfg.raw = {{"operation", "suite"}, {"seed", a.seed}, {"params", cfg.params}};
    }
    if (sub.count("--seed") > 0) {
      cfg.seed = a.seed;
      cfg.raw["seed"] = a.seed;
    }
    if (sub.count("--threads") > 0) {
      cfg.threads = a.threads;
      cfg.raw["threads"] = a.threads;
    }
    if (op == "suite" && sub.count("--which") > 0) {
      cfg.params["which"] = a.which;
      cfg.raw["params"] = cfg.params;
    }
    // Relative save paths land next to the report.
    if (!a.out.empty() && cfg.params.contains("save") && cfg.params["save"].is_string()) {
      std::filesystem::path p = cfg.params["save"].get<std::string>();
      if (p.is_relative()) {
        p = std::filesystem::path(a.out) / p;
        std::filesystem::create_directories(p.parent_path());
        cfg.params["save"] = p.string();
        cfg.raw["params"] = cfg.params;
      }
    }

    czlab::Report rep = czlab::run_experiment(cfg);

    std::size_t passed = 0;
    for (const czlab::CheckLine& c : rep.checks) {
      const char* tag = c.status == "pass" ? "PASS" : c.status == "fail" ? "FAIL" : "INCONCLUSIVE";
      if (c.status == "pass") ++passed;
      std::printf("[%s] %s%s%s\n", tag, c.name.c_str(), c.detail.empty() ? "" : "  ",
                  c.detail.c_str());
    }
    if (!a.out.empty()) {
      czlab::write_report_files(rep, a.out, op);
      std::printf("report written to %s/%s.json\n", a.out.c_str(), op.c_str());
    }
    std::printf("%s: %zu/%zu checks passed (%.1f s)\n", op.c_str(), passed, rep.checks.size(),
                rep.wall_ms / 1000.0);
    return rep.ok(a.strict) ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: %s\n", op.c_str(), e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for s-dimensional Calderon-Zygmund transforms of measures"};
  app.require_subcommand(1);

  CliArgs a;
  int code = 0;
  for (const std::string& op : czlab::known_operations()) {
    CLI::App* sub = app.add_subcommand(op, describe(op));
    sub->add_option("--config", a.config, "experiment config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--out", a.out, "directory for the JSON report and CSV tables");
    sub->add_option("--threads", a.threads, "worker threads (0 = hardware)");
    sub->add_option("--seed", a.seed, "override the config seed");
    sub->add_flag("--strict", a.strict, "count inconclusive checks as failures");
    if (op == "suite") sub->add_option("--which", a.which, "quick | acceptance");
    sub->callback([&a, sub, op, &code]() { code = run_cli(op, a, *sub); });
  }

  CLI11_PARSE(app, argc, argv);
  return code;
}
