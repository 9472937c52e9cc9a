#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "martwalk/montecarlo.hpp"
#include "martwalk/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolated = 2;
constexpr int kExitConfigError = 3;

// Relative output paths honor MARTWALK_OUT_DIR.
std::filesystem::path resolve_out(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("MARTWALK_OUT_DIR")) {
      p = std::filesystem::path(dir) / p;
    }
  }
  return p;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_constants(double K, double r, double h, double a, double b, double c) {
  const auto params = martwalk::EllipticityParams::make(K, r, h);
  const auto base = martwalk::base_constants(params);
  const auto exit = martwalk::exit_constants(a, b, c, params);
  const auto req = martwalk::thin_rect_requirements(b, params);
  const auto prime = martwalk::transformed_ellipticity(params);
  std::cout << "a0           = " << fmt17(base.a0) << "\n"
            << "alpha0       = " << fmt17(base.alpha0) << "\n"
            << "m0           = " << base.m0 << "\n"
            << "log2_s0      = " << fmt17(base.log2_s0) << "\n"
            << "log2_lambda0 = " << fmt17(exit.log2_lambda0) << "\n"
            << "ln_rho       = " << fmt17(exit.log_rho)
            << (exit.approx ? "  (APPROX: ceiling beyond exact integer range)" : "")
            << "\n"
            << "a_min        = " << fmt17(req.a_min) << "\n"
            << "lambda_min   = " << fmt17(req.lambda_min) << "\n"
            << "K'           = " << fmt17(prime.K) << "\n"
            << "r'           = " << fmt17(prime.r) << "\n"
            << "h'           = " << fmt17(prime.h) << "\n";
  return kExitOk;
}

int cmd_list_walks() {
  for (const auto& name : martwalk::walk_registry()) std::cout << name << "\n";
  std::cout << "parameters: excited <beta> [ell_x ell_y], radial-sector "
               "<reach> <p>\n";
  return kExitOk;
}

int cmd_simulate(const std::string& walk_name,
                 const std::vector<double>& walk_params, long n,
                 std::int64_t n_traj, std::uint64_t seed, int threads,
                 const std::string& out, const std::string& dump) {
  const martwalk::Walk walk = martwalk::make_walk(walk_name, walk_params);
  martwalk::RunConfig cfg;
  cfg.n_traj = n_traj;
  cfg.seed = seed;
  cfg.threads = threads;
  const auto batch = martwalk::simulate_batch(walk, martwalk::Vector2::Zero(), n, cfg);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty()) {
    file.open(resolve_out(out));
    if (!file) throw std::runtime_error("cannot open output file: " + out);
    os = &file;
  }
  *os << "traj_index,n,range,L_at_start,max_norm,seed\n";
  for (const auto& s : batch.summaries) {
    *os << s.trajectory_index << ',' << s.n << ',' << s.range << ','
        << s.local_time_at_start << ',' << fmt17(s.max_norm) << ',' << seed
        << "\n";
  }
  if (!dump.empty()) {
    std::ofstream df(resolve_out(dump));
    if (!df) throw std::runtime_error("cannot open trajectory dump: " + dump);
    df << "step,x,y\n";
    martwalk::ProcessState state =
        martwalk::make_state(walk, martwalk::Vector2::Zero(), seed, 0);
    martwalk::StepDistribution scratch;
    df << "0," << fmt17(state.position[0]) << ',' << fmt17(state.position[1])
       << "\n";
    for (long k = 1; k <= n; ++k) {
      martwalk::advance(walk, state, scratch);
      df << k << ',' << fmt17(state.position[0]) << ','
         << fmt17(state.position[1]) << "\n";
    }
  }
  return kExitOk;
}

int cmd_verify(const std::string& suite, const std::string& walk_name,
               const std::vector<double>& walk_params,
               const martwalk::VerifyOptions& opt, const std::string& out,
               bool print_json, bool no_timing) {
  const auto report = martwalk::run_suite(suite, walk_name, walk_params, opt);
  const auto j = martwalk::report_to_json(report, !no_timing);
  if (print_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << martwalk::report_table(report);
  }
  if (!out.empty()) {
    std::ofstream file(resolve_out(out));
    if (!file) throw std::runtime_error("cannot open report file: " + out);
    file << j.dump(2) << "\n";
  }
  return report.overall == martwalk::Verdict::Violated ? kExitViolated : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice walk simulation and bound verification"};
  app.require_subcommand(1);

  // constants
  double K = 1.0, r = 0.5, h = 0.25;
  double ca = 1.0, cb = 1.0, cc = 1.0;
  auto* constants = app.add_subcommand("constants", "Evaluate explicit constants");
  constants->set_help_flag("--help", "print help");  // frees -h for the h parameter
  constants->add_option("--K", K);
  constants->add_option("--r", r);
  constants->add_option("--h", h);
  constants->add_option("--a", ca);
  constants->add_option("--b", cb);
  constants->add_option("--c", cc);

  // simulate
  std::string walk_name = "srw2d";
  std::vector<double> walk_params;
  long sim_n = 1000;
  std::int64_t n_traj = 100;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out, dump;
  auto* simulate = app.add_subcommand("simulate", "Batch simulation to CSV");
  simulate->add_option("--walk", walk_name);
  simulate->add_option("--walk-params", walk_params);
  simulate->add_option("--n", sim_n);
  simulate->add_option("--traj", n_traj);
  simulate->add_option("--seed", seed)->required();
  simulate->add_option("--threads", threads);
  simulate->add_option("--out", out);
  simulate->add_option("--dump-traj", dump);

  // verify
  std::string suite;
  martwalk::VerifyOptions opt;
  std::string vwalk = "srw2d";
  std::vector<double> vwalk_params;
  std::string vout;
  bool print_json = false, no_timing = false;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", suite, "exit|thin-rect|tails|transform|lyapunov|all")
      ->required();
  verify->add_option("--walk", vwalk);
  verify->add_option("--walk-params", vwalk_params);
  verify->add_option("--seed", opt.run.seed)->required();
  verify->add_option("--traj", opt.run.n_traj);
  verify->add_option("--n", opt.tail_n);
  verify->add_option("--gamma", opt.gamma);
  verify->add_option("--lambda", opt.lambda);
  verify->add_option("--a", opt.a);
  verify->add_option("--b", opt.b);
  verify->add_option("--c", opt.c);
  verify->add_option("--beta", opt.excited_beta);
  verify->add_option("--threads", opt.run.threads);
  verify->add_option("--step-cap", opt.run.step_cap);
  verify->add_option("--out", vout);
  verify->add_flag("--json", print_json);
  verify->add_flag("--no-timing", no_timing);

  auto* list = app.add_subcommand("list-walks", "List the walk registry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*constants) return cmd_constants(K, r, h, ca, cb, cc);
    if (*list) return cmd_list_walks();
    if (*simulate)
      return cmd_simulate(walk_name, walk_params, sim_n, n_traj, seed, threads,
                          out, dump);
    if (*verify)
      return cmd_verify(suite, vwalk, vwalk_params, opt, vout, print_json,
                        no_timing);
  } catch (const martwalk::GateError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
