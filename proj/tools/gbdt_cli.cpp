#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gbdt/cli/runner.hpp"

namespace {

using namespace gbdt;
using namespace gbdt::cli;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitError = 2;

int report_error(const Error& e, const std::filesystem::path& out_dir) {
  const std::string record = error_record(e).dump(2) + "\n";
  std::cerr << record;
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream(out_dir / "error.json", std::ios::binary) << record;
  }
  return kExitError;
}

void print_summary(const VerifyOutcome& v) {
  for (const auto& r : v.reports)
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " max_residual=" << format_double(r.max_residual)
              << (r.convergence_order ? " order=" + format_double(*r.convergence_order) : std::string())
              << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"N-wave generalized Backlund-Darboux transformation solver"};
  app.require_subcommand(1);
  bool allow_negative = false;
  app.add_flag("--allow-negative-domain", allow_negative, "permit x < 0 or t < 0");

  std::string config_path, out_dir, demo_name;
  double h = 0.0;
  bool refine = false;

  auto* solve = app.add_subcommand("solve", "evaluate rho~ on the configured grid");
  solve->add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out_dir, "output directory");

  auto* verify = app.add_subcommand("verify", "run every residual oracle");
  verify->set_help_flag("--help", "print this help and exit");
  verify->add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  verify->add_option("--h", h, "finite-difference step")->check(CLI::PositiveNumber);
  verify->add_flag("--refine", refine, "also run at h/2 and report convergence orders");
  verify->add_option("--out", out_dir, "output directory");

  auto* demo = app.add_subcommand("demo", "run a built-in construction");
  demo->add_option("name", demo_name, "rational2x2 | sech_soliton | threewave_real | bispectral_n2")->required();
  demo->add_option("--out", out_dir, "output directory")->required();

  auto* show = app.add_subcommand("config", "print a built-in configuration as JSON");
  show->add_option("name", demo_name, "demo name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*show) {
      std::cout << to_json(demo_config(demo_name)).dump(2) << "\n";
      return kExitOk;
    }
    if (*demo) {
      const bool ok = run_demo(demo_name, out_dir);
      std::cout << "demo " << demo_name << (ok ? ": all checks pass" : ": some checks fail") << "\n";
      return ok ? kExitOk : kExitVerifyFailed;
    }

    const RunConfig cfg = load_config(config_path);
    const std::filesystem::path dir = std::filesystem::path(out_dir.empty() ? cfg.output.directory : out_dir);
    try {
      const Context ctx = make_context(cfg, allow_negative);
      if (*solve) {
        const auto solved = run_solve(ctx, dir);
        for (const auto& p : solved.eval.poles)
          std::cerr << "warning: pole near x=" << format_double(p.x) << ", t=" << format_double(p.t) << "\n";
        return kExitOk;
      }
      const Evaluation ev = evaluate_grid(ctx);
      VerifyOptions vo;
      if (h > 0.0) vo.h = h;
      vo.refine = refine;
      const auto outcome = run_verify(ctx, ev, vo);
      write_verify(outcome, dir);
      print_summary(outcome);
      return outcome.all_pass ? kExitOk : kExitVerifyFailed;
    } catch (const Error& e) {
      return report_error(e, dir);
    }
  } catch (const Error& e) {
    return report_error(e, out_dir);
  }
}
