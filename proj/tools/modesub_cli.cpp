// Command-line front end: convergence sweeps over the built-in cases,
// the mode-derivative validation suite, and the dense-vs-sparse recovery
// cross-check.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "modesub/assembly.hpp"
#include "modesub/dense_oracle.hpp"
#include "modesub/derivative_check.hpp"
#include "modesub/errors.hpp"
#include "modesub/harness.hpp"
#include "modesub/solver.hpp"

namespace {

struct RunOptions {
  std::string case_name = "poisson1d-single";
  int order = 2;
  std::string method = "schur";
  std::vector<int> n_list;  // empty: defaults by dimension
  std::string out_path;     // empty: stdout
  std::string format = "csv";
  std::string config_path;
  std::string field_out;
  std::string field_kind = "error";
  std::string dump_system;
};

/// Fill any option the user did not pass on the command line from the JSON
/// config file; explicit flags always win.
void merge_config(const CLI::App& cmd, RunOptions& opt) {
  std::ifstream in(opt.config_path);
  if (!in)
    throw modesub::IoFailure("cannot open config file: " + opt.config_path);
  nlohmann::json cfg;
  try {
    in >> cfg;
  } catch (const nlohmann::json::exception& e) {
    throw modesub::ValidationError(std::string("bad config JSON: ") +
                                   e.what());
  }
  if (!cfg.is_object())
    throw modesub::ValidationError("config must be a JSON object");

  auto unused = [&](const std::string& flag) {
    return cmd.count("--" + flag) == 0;
  };
  try {
    if (cfg.contains("case") && unused("case"))
      opt.case_name = cfg["case"].get<std::string>();
    if (cfg.contains("order") && unused("order"))
      opt.order = cfg["order"].get<int>();
    if (cfg.contains("method") && unused("method"))
      opt.method = cfg["method"].get<std::string>();
    if (cfg.contains("n") && unused("n"))
      opt.n_list = cfg["n"].get<std::vector<int>>();
    if (cfg.contains("out") && unused("out"))
      opt.out_path = cfg["out"].get<std::string>();
    if (cfg.contains("format") && unused("format"))
      opt.format = cfg["format"].get<std::string>();
    if (cfg.contains("field-out") && unused("field-out"))
      opt.field_out = cfg["field-out"].get<std::string>();
    if (cfg.contains("field-kind") && unused("field-kind"))
      opt.field_kind = cfg["field-kind"].get<std::string>();
    if (cfg.contains("dump-system") && unused("dump-system"))
      opt.dump_system = cfg["dump-system"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw modesub::ValidationError(
        std::string("config value has the wrong type: ") + e.what());
  }
  for (const auto& [key, _] : cfg.items()) {
    static const std::vector<std::string> known = {
        "case", "order",     "method",     "n",
        "out",  "format",    "field-out",  "field-kind",
        "dump-system"};
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw modesub::ValidationError("unknown config key: " + key);
  }
}

int do_run(const CLI::App& cmd, RunOptions opt) {
  if (!opt.config_path.empty()) merge_config(cmd, opt);

  modesub::ExperimentConfig config;
  config.case_id = modesub::parse_case_id(opt.case_name);
  config.order = opt.order;
  config.method = modesub::parse_run_method(opt.method);
  config.output_format = modesub::parse_report_format(opt.format);
  const bool two_d = config.case_id == modesub::CaseId::Poisson2DRadial;
  if (!opt.n_list.empty())
    config.n_list = opt.n_list;
  else if (two_d)
    config.n_list = {20, 40, 80, 160, 320};  // 640 only on explicit request

  const modesub::ConvergenceReport report = modesub::run_experiment(config);
  if (opt.out_path.empty())
    std::cout << (config.output_format == modesub::ReportFormat::Csv
                      ? modesub::to_csv(report)
                      : modesub::to_markdown(report));
  else
    modesub::emit_report(report, config.output_format, opt.out_path);

  if (!opt.field_out.empty() || !opt.dump_system.empty()) {
    const int n = config.n_list.back();
    const modesub::CaseSpec spec =
        modesub::builtin_case(config.case_id, n, config.order);
    if (!opt.dump_system.empty()) {
      std::ofstream out(opt.dump_system);
      if (!out)
        throw modesub::IoFailure("cannot open " + opt.dump_system);
      modesub::dump_block_system(modesub::assemble(spec), out);
    }
    if (!opt.field_out.empty()) {
      if (opt.field_kind != "solution" && opt.field_kind != "error")
        throw modesub::ValidationError("field kind must be solution or error");
      modesub::GridFunction field{spec.grid, {}};
      if (config.method == modesub::RunMethod::BaselineFd2) {
        field = modesub::baseline_fd2(spec, n);
      } else {
        const auto sol = modesub::solve_case(
            spec, config.method == modesub::RunMethod::Schur
                      ? modesub::Method::Schur
                      : modesub::Method::FixedPoint);
        field.values = sol.u_full;
      }
      if (opt.field_kind == "error")
        for (std::int64_t lin = 0; lin < field.grid.node_count(); ++lin)
          field.values[lin] -= spec.exact_solution(
              field.grid.coord(field.grid.node_at(lin)));
      modesub::emit_field(field, opt.field_out);
    }
  }
  return 0;
}

int do_modes_check(int samples, double tolerance) {
  const modesub::DerivativeCheckReport report =
      modesub::run_derivative_checks(samples, tolerance);
  std::printf("%-22s %8s %14s %14s  %s\n", "mode", "samples", "grad rel",
              "lap rel", "status");
  for (const auto& e : report.entries)
    std::printf("%-22s %8d %14.3e %14.3e  %s\n", e.label.c_str(), e.samples,
                e.worst_gradient_rel, e.worst_laplacian_rel,
                e.ok ? "ok" : "FAIL");
  std::printf("tolerance %.1e: %s\n", report.tolerance,
              report.all_ok ? "all passed" : "FAILURES");
  return report.all_ok ? 0 : 1;
}

int do_oracle(const std::string& case_name, int order, int n, double tol) {
  const modesub::CaseSpec spec = modesub::builtin_case(case_name, n, order);
  const modesub::BlockSystem blocks = modesub::assemble(spec);

  auto sparse = modesub::schur_recover_k(blocks);
  const auto sparse_u2 =
      modesub::exterior_solve(blocks, sparse.k, &sparse.d_factor);
  const auto dense = modesub::oracle::dense_schur_recover(blocks);

  double k_diff = 0.0;
  for (std::size_t i = 0; i < sparse.k.size(); ++i)
    k_diff = std::max(k_diff, std::abs(sparse.k[i] - dense.k[i]));
  double u_diff = 0.0;
  for (std::size_t i = 0; i < sparse_u2.size(); ++i)
    u_diff = std::max(u_diff, std::abs(sparse_u2[i] - dense.u_exterior[i]));

  std::printf("case %s order %d N %d\n", case_name.c_str(), order, n);
  for (std::size_t i = 0; i < sparse.k.size(); ++i)
    std::printf("k_%zu sparse %.17g dense %.17g\n", i + 1, sparse.k[i],
                dense.k[i]);
  std::printf("max |k_sparse - k_dense|   %.3e\n", k_diff);
  std::printf("max |u2_sparse - u2_dense| %.3e\n", u_diff);
  const bool ok = k_diff <= tol && u_diff <= tol;
  std::printf("tolerance %.1e: %s\n", tol, ok ? "agree" : "DISAGREE");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-difference solver for Poisson problems with known "
               "low-regularity modes, recovering mode coefficients via an "
               "interface formulation"};
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "Run a convergence sweep");
  run->add_option("--case", run_opt.case_name,
                  "poisson1d-single | poisson1d-two | poisson2d-radial");
  run->add_option("--order", run_opt.order, "stencil order (2 or 4)")
      ->check(CLI::IsMember({2, 4}));
  run->add_option("--method", run_opt.method,
                  "schur | fixed-point | baseline-fd2");
  run->add_option("--n", run_opt.n_list,
                  "comma-separated resolutions (default 20,...,640; 2-D "
                  "sweeps stop at 320 unless given explicitly)")
      ->delimiter(',');
  run->add_option("--out", run_opt.out_path,
                  "report file (default: stdout)");
  run->add_option("--format", run_opt.format, "csv | md");
  run->add_option("--config", run_opt.config_path,
                  "JSON config file; explicit flags win");
  run->add_option("--field-out", run_opt.field_out,
                  "write the finest-level field here");
  run->add_option("--field-kind", run_opt.field_kind, "solution | error");
  run->add_option("--dump-system", run_opt.dump_system,
                  "write the finest-level assembled system here");

  CLI::App* modes = app.add_subcommand("modes", "Mode library utilities");
  modes->require_subcommand(1);
  int samples = 200;
  double mode_tol = 1e-6;
  CLI::App* check =
      modes->add_subcommand("check", "Validate analytic derivatives against "
                                     "finite differences");
  check->add_option("--samples", samples, "sample points per mode");
  check->add_option("--tol", mode_tol, "relative tolerance");

  std::string oracle_case = "poisson1d-single";
  int oracle_order = 2, oracle_n = 20;
  double oracle_tol = 1e-10;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "Cross-check sparse recovery against a dense elimination");
  oracle->add_option("--case", oracle_case, "built-in case id");
  oracle->add_option("--order", oracle_order, "stencil order (2 or 4)")
      ->check(CLI::IsMember({2, 4}));
  oracle->add_option("--n", oracle_n, "grid resolution");
  oracle->add_option("--tol", oracle_tol, "agreement tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return do_run(*run, run_opt);
    if (check->parsed()) return do_modes_check(samples, mode_tol);
    if (oracle->parsed())
      return do_oracle(oracle_case, oracle_order, oracle_n, oracle_tol);
    return 2;
  } catch (const modesub::IoFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const modesub::SingularMatrix& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const modesub::RankDeficient& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const modesub::SingularVandermonde& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const modesub::Error& e) {
    std::cerr << "invalid request: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
