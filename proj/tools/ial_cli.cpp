// Command-line front end: generate instances, run IAL solves and sweeps,
// build reference solutions, and verify the convergence bounds on a recorded
// run bundle. Exit codes: 0 ok, 1 bound violation, 2 inner budget abort,
// 3 reference failure, 4 I/O or usage error.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ial/ial.hpp"

namespace {

struct GenerateArgs {
  std::string family;
  long n = 0;
  long m = 0;
  std::uint64_t seed = 0;
  std::string out_path;
};

int cmd_generate(const GenerateArgs& args) {
  try {
    ial::Family family = ial::family_from_string(args.family);
    ial::ProblemInstance p = ial::generate_instance(family, args.n, args.m, args.seed);
    ial::save_instance(p, args.out_path);
    std::cout << p.name << " -> " << args.out_path << " hash=" << ial::hash_file(args.out_path)
              << "\n";
    return ial::exit_code::ok;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ial::exit_code::io_usage;
  }
}

struct SourceArgs {
  std::string instance_path;
  std::string family;
  long n = 0;
  long m = 0;
  std::uint64_t seed = 0;

  ial::InstanceSource to_source() const {
    ial::InstanceSource src;
    src.path = instance_path;
    if (!family.empty()) {
      src.family = ial::family_from_string(family);
      src.n = n;
      src.m = m;
      src.seed = seed;
    }
    return src;
  }
};

void add_source_flags(CLI::App* cmd, SourceArgs& args) {
  auto* inst = cmd->add_option("--instance", args.instance_path, "instance JSON file");
  auto* fam = cmd->add_option("--family", args.family,
                              "generate instead: simplex_ls, box_qp, l1_basis_pursuit");
  cmd->add_option("--n", args.n, "generated instance dimension")->needs(fam);
  cmd->add_option("--m", args.m, "generated constraint count")->needs(fam);
  cmd->add_option("--seed", args.seed, "generator seed")->needs(fam);
  inst->excludes(fam);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inexact augmented Lagrangian solver and bound verifier"};
  app.require_subcommand(1);

  // generate
  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "write a deterministic instance file");
  generate->add_option("family", gen.family, "simplex_ls | box_qp | l1_basis_pursuit")
      ->required();
  generate->add_option("n", gen.n, "dimension")->required();
  generate->add_option("m", gen.m, "constraint count")->required();
  generate->add_option("seed", gen.seed, "seed")->required();
  generate->add_option("out", gen.out_path, "output path")->required();

  // solve
  SourceArgs solve_src;
  ial::RunDescriptor solve_desc;
  double solve_sigma = 1.0;
  double solve_alpha = 1.0;
  std::string solve_method = "apg";
  std::string solve_step_rule = "adaptive";
  std::string solve_policy = "abort";
  int solve_check_every = -1;
  bool solve_cold = false;
  std::string solve_out;
  CLI::App* solve = app.add_subcommand("solve", "run the IAL loop and record the trace");
  add_source_flags(solve, solve_src);
  solve->add_option("--beta", solve_desc.beta, "penalty parameter");
  solve->add_option("--sigma", solve_sigma, "schedule eta_k = sigma/k^(2 alpha)");
  solve->add_option("--alpha", solve_alpha, "schedule exponent, in (1/2, 1]");
  solve->add_option("--outer-iters", solve_desc.outer_iters, "outer iteration count");
  solve->add_option("--inner", solve_method, "inner method: fw or apg");
  solve->add_option("--inner-budget", solve_desc.inner_budget, "inner iteration budget");
  solve->add_option("--check-every", solve_check_every, "certificate check period");
  solve->add_option("--step-rule", solve_step_rule, "fw step rule: adaptive or open_loop");
  solve->add_option("--on-budget", solve_policy, "budget policy: abort or accept_best");
  solve->add_flag("--cold-start", solve_cold, "restart each subproblem from the default point");
  solve->add_option("--gap-floor", solve_desc.gap_floor, "early-stop gap floor");
  solve->add_option("--feas-floor", solve_desc.feas_floor, "early-stop feasibility floor");
  solve->add_option("--out", solve_out, "bundle output directory")->required();

  // reference
  SourceArgs ref_src;
  double ref_tol = 1e-10;
  double ref_beta = 1.0;
  std::string ref_out;
  CLI::App* reference = app.add_subcommand("reference", "compute a high-accuracy solution");
  add_source_flags(reference, ref_src);
  reference->add_option("--tol", ref_tol, "target gap and feasibility tolerance");
  reference->add_option("--beta", ref_beta, "penalty used for the reference run");
  reference->add_option("--out", ref_out, "output JSON path")->required();

  // verify
  ial::VerifySettings verify_settings;
  std::string verify_run;
  CLI::App* verify = app.add_subcommand("verify", "check the bounds on a recorded run");
  verify->add_option("--run", verify_run, "run bundle directory")->required();
  verify->add_option("--reference-tol", verify_settings.reference_tol,
                     "tolerance for the computed reference");
  verify->add_option("--reference", verify_settings.reference_path,
                     "precomputed reference JSON (skips the reference solve)");

  // sweep
  SourceArgs sweep_src;
  ial::SweepSettings sweep_settings;
  std::vector<std::string> sweep_methods;
  std::string sweep_out;
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep and summarize");
  add_source_flags(sweep, sweep_src);
  sweep->add_option("--betas", sweep_settings.betas, "penalty values")->delimiter(',');
  sweep->add_option("--sigmas", sweep_settings.sigmas, "schedule sigma values")->delimiter(',');
  sweep->add_option("--alphas", sweep_settings.alphas, "schedule alpha values")->delimiter(',');
  sweep->add_option("--inners", sweep_methods, "inner methods (fw, apg)")->delimiter(',');
  sweep->add_option("--outer-iters", sweep_settings.outer_iters, "outer iteration count");
  sweep->add_option("--inner-budget", sweep_settings.inner_budget, "inner iteration budget");
  sweep->add_option("--reference-tol", sweep_settings.reference_tol, "reference tolerance");
  sweep->add_option("--out", sweep_out, "sweep output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ial::exit_code::io_usage;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*solve) {
      solve_desc.schedule = ial::ToleranceSchedule::power_law(solve_sigma, solve_alpha);
      solve_desc.method = ial::method_from_string(solve_method);
      solve_desc.step_rule = ial::step_rule_from_string(solve_step_rule);
      solve_desc.policy = ial::policy_from_string(solve_policy);
      solve_desc.warm_start = !solve_cold;
      if (solve_check_every > 0) solve_desc.check_every = solve_check_every;
      return ial::run_solve(solve_src.to_source(), solve_desc, solve_out, std::cout);
    }
    if (*reference) {
      return ial::run_reference(ref_src.to_source(), ref_tol, ref_beta, ref_out, std::cout);
    }
    if (*verify) {
      verify_settings.run_dir = verify_run;
      return ial::run_verify(verify_settings, std::cout);
    }
    if (*sweep) {
      sweep_settings.source = sweep_src.to_source();
      sweep_settings.out_dir = sweep_out;
      for (const std::string& m : sweep_methods) {
        sweep_settings.methods.push_back(ial::method_from_string(m));
      }
      return ial::run_sweep(sweep_settings, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ial::exit_code::io_usage;
  }
  return ial::exit_code::io_usage;
}
