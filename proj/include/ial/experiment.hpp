#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ial/io.hpp"
#include "ial/theory.hpp"

namespace ial {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int bound_violation = 1;
inline constexpr int budget_abort = 2;
inline constexpr int reference_failure = 3;
inline constexpr int io_usage = 4;
}  // namespace exit_code

inline std::string method_to_string(InnerMethod m) {
  return m == InnerMethod::frank_wolfe ? "fw" : "apg";
}

inline InnerMethod method_from_string(const std::string& s) {
  if (s == "fw") return InnerMethod::frank_wolfe;
  if (s == "apg") return InnerMethod::accel_prox_grad;
  throw std::invalid_argument("unknown inner method '" + s + "'; valid methods: fw, apg");
}

inline std::string step_rule_to_string(StepRule r) {
  return r == StepRule::adaptive ? "adaptive" : "open_loop";
}

inline StepRule step_rule_from_string(const std::string& s) {
  if (s == "adaptive") return StepRule::adaptive;
  if (s == "open_loop") return StepRule::open_loop;
  throw std::invalid_argument("unknown step rule '" + s + "'; valid: adaptive, open_loop");
}

inline std::string policy_to_string(BudgetPolicy p) {
  return p == BudgetPolicy::abort ? "abort" : "accept_best";
}

inline BudgetPolicy policy_from_string(const std::string& s) {
  if (s == "abort") return BudgetPolicy::abort;
  if (s == "accept_best") return BudgetPolicy::accept_best;
  throw std::invalid_argument("unknown budget policy '" + s + "'; valid: abort, accept_best");
}

// Instance by file path or generator spec.
struct InstanceSource {
  std::string path;  // load this file when nonempty
  std::optional<Family> family;
  Index n = 0;
  Index m = 0;
  std::uint64_t seed = 0;
};

struct ResolvedInstance {
  ProblemInstance instance;
  std::filesystem::path path;  // empty when generated without persisting
  std::string hash;
};

// Loads or generates the instance. Generated instances are persisted (and
// hashed) under persist_dir/instance.json when a directory is given;
// otherwise the hash covers the canonical serialization.
inline ResolvedInstance resolve_instance(const InstanceSource& src,
                                         const std::filesystem::path& persist_dir) {
  if (!src.path.empty()) {
    ProblemInstance p = load_instance(src.path);
    std::filesystem::path abs = std::filesystem::absolute(src.path);
    return ResolvedInstance{std::move(p), abs, hash_file(abs)};
  }
  if (!src.family) {
    throw IoError("no instance given: pass --instance or --family with --n/--m/--seed");
  }
  ProblemInstance p = generate_instance(*src.family, src.n, src.m, src.seed);
  if (!persist_dir.empty()) {
    std::filesystem::path path = std::filesystem::absolute(persist_dir / "instance.json");
    save_instance(p, path);
    return ResolvedInstance{std::move(p), path, hash_file(path)};
  }
  std::string hash = to_hex16(fnv1a64(dump_canonical(instance_to_json(p))));
  return ResolvedInstance{std::move(p), {}, std::move(hash)};
}

// Everything needed to reproduce a run bit-for-bit from the instance file.
struct RunDescriptor {
  double beta = 1.0;
  ToleranceSchedule schedule;
  long outer_iters = 500;
  InnerMethod method = InnerMethod::accel_prox_grad;
  long inner_budget = 100000;
  std::optional<int> check_every;
  StepRule step_rule = StepRule::adaptive;
  bool warm_start = true;
  BudgetPolicy policy = BudgetPolicy::abort;
  double gap_floor = 1e-10;
  double feas_floor = 1e-8;

  OuterConfig to_outer_config() const {
    OuterConfig cfg;
    cfg.beta = beta;
    cfg.max_outer = outer_iters;
    cfg.schedule = schedule;
    cfg.inner.method = method;
    cfg.inner.budget = inner_budget;
    cfg.inner.check_every = check_every;
    cfg.inner.step_rule = step_rule;
    cfg.warm_start = warm_start;
    cfg.on_budget_exceeded = policy;
    cfg.gap_floor = gap_floor;
    cfg.feas_floor = feas_floor;
    return cfg;
  }
};

inline json run_sidecar_json(const RunDescriptor& desc, const OuterTrace& trace,
                             const std::filesystem::path& instance_path,
                             const std::string& instance_hash) {
  json j;
  j["aborted"] = trace.aborted;
  j["beta"] = desc.beta;
  j["check_every"] = static_cast<std::int64_t>(
      InnerConfig{desc.method, desc.inner_budget, desc.check_every, desc.step_rule}
          .resolved_check_every());
  j["early_stopped"] = trace.early_stopped;
  j["feas_floor"] = desc.feas_floor;
  j["gap_floor"] = desc.gap_floor;
  j["inner_budget"] = static_cast<std::int64_t>(desc.inner_budget);
  j["inner_method"] = method_to_string(desc.method);
  j["instance_hash"] = instance_hash;
  j["instance_name"] = trace.instance_name;
  j["instance_path"] = instance_path.string();
  j["k_completed"] = static_cast<std::int64_t>(trace.completed());
  j["lambda_final"] = detail::vector_to_json(trace.lambda_final);
  j["on_budget_exceeded"] = policy_to_string(desc.policy);
  j["outer_iters"] = static_cast<std::int64_t>(desc.outer_iters);
  j["schedule"] = schedule_to_json(desc.schedule);
  j["step_rule"] = step_rule_to_string(desc.step_rule);
  j["warm_start"] = desc.warm_start;
  j["x_final"] = detail::vector_to_json(trace.x_final());
  return j;
}

inline RunDescriptor run_descriptor_from_json(const json& j) {
  RunDescriptor desc;
  desc.beta = j.at("beta").get<double>();
  desc.schedule = schedule_from_json(j.at("schedule"));
  desc.outer_iters = j.at("outer_iters").get<long>();
  desc.method = method_from_string(j.at("inner_method").get<std::string>());
  desc.inner_budget = j.at("inner_budget").get<long>();
  desc.check_every = j.at("check_every").get<int>();
  desc.step_rule = step_rule_from_string(j.at("step_rule").get<std::string>());
  desc.warm_start = j.at("warm_start").get<bool>();
  desc.policy = policy_from_string(j.at("on_budget_exceeded").get<std::string>());
  desc.gap_floor = j.at("gap_floor").get<double>();
  desc.feas_floor = j.at("feas_floor").get<double>();
  return desc;
}

// Runs the outer loop and writes the bundle (trace.csv + run.json). Returns
// the trace through the out-parameter when requested.
inline int run_solve(const InstanceSource& src, const RunDescriptor& desc,
                     const std::filesystem::path& out_dir, std::ostream& log,
                     OuterTrace* trace_out = nullptr) {
  try {
    std::filesystem::create_directories(out_dir);
    ResolvedInstance resolved = resolve_instance(src, out_dir);
    OuterTrace trace = run_ial(resolved.instance, desc.to_outer_config());
    write_trace_csv(trace, out_dir / "trace.csv");
    write_file(out_dir / "run.json",
               dump_canonical(run_sidecar_json(desc, trace, resolved.path, resolved.hash)));
    const OuterRow& last = trace.rows.back();
    log << "solve " << trace.instance_name << ": k=" << trace.completed()
        << (trace.aborted ? " (aborted: inner budget)" : "") << " gap=" << last.gap
        << " feas=" << last.feas << " F=" << last.objective << "\n";
    int code = trace.aborted ? exit_code::budget_abort : exit_code::ok;
    if (trace_out != nullptr) *trace_out = std::move(trace);
    return code;
  } catch (const BudgetError& e) {
    log << "error: " << e.what() << " (no completed iteration to record)\n";
    return exit_code::budget_abort;
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return exit_code::io_usage;
  }
}

inline int run_reference(const InstanceSource& src, double tol, double beta,
                         const std::filesystem::path& out_path, std::ostream& log) {
  try {
    ResolvedInstance resolved = resolve_instance(src, {});
    ReferenceSolution ref = compute_reference(resolved.instance, tol, beta);
    save_reference(ref, out_path);
    log << "reference " << resolved.instance.name << ": F*=" << ref.f_star
        << " feas=" << ref.feas << " tol=" << ref.tol << " -> " << out_path.string() << "\n";
    return exit_code::ok;
  } catch (const ReferenceError& e) {
    log << "reference failure: " << e.what() << "\n";
    return exit_code::reference_failure;
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return exit_code::io_usage;
  }
}

namespace detail {

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// CSV rows must match the deterministic re-run to round-trip precision.
inline BoundReport audit_csv_against_rerun(const std::vector<TraceRowScalars>& csv,
                                           const OuterTrace& rerun, double tol = 1e-12) {
  BoundReport rep;
  rep.check = "audit_csv_consistency";
  std::size_t n = std::min(csv.size(), rerun.rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    const TraceRowScalars& c = csv[i];
    const OuterRow& r = rerun.rows[i];
    double err = 0.0;
    if (c.k != r.k || c.inner_iters != r.inner_iters) err = 1.0;
    err = std::max({err, rel_diff(c.eta, r.eta), rel_diff(c.gap, r.gap),
                    rel_diff(c.feas, r.feas), rel_diff(c.objective, r.objective),
                    rel_diff(c.al_bar, r.al_bar)});
    rep.add(r.k, tol - err);
  }
  if (csv.size() != rerun.rows.size()) {
    rep.add(static_cast<long>(n) + 1, -1.0);
    rep.note = "row count mismatch: csv=" + std::to_string(csv.size()) +
               " rerun=" + std::to_string(rerun.rows.size());
  }
  rep.finish();
  return rep;
}

// Recomputes every stored gap from (x^{k+1}, lambda^k) and the dual update
// recursion; certification gap_k <= eta_k must hold on unflagged rows.
inline BoundReport audit_certificates(const ProblemInstance& p, const OuterTrace& trace,
                                      double gap_tol = 1e-12, double lambda_tol = 1e-14) {
  BoundReport rep;
  rep.check = "audit_certificates";
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const OuterRow& row = trace.rows[i];
    DualState s{row.lambda, trace.beta};
    double gap = gap_certificate(p, row.x_next, s).gap;
    double gap_err = std::abs(gap - row.gap) / std::max({1.0, std::abs(gap), std::abs(row.gap)});

    const Vector& next_lambda =
        i + 1 < trace.rows.size() ? trace.rows[i + 1].lambda : trace.lambda_final;
    Vector expect = row.lambda + trace.beta * p.constraint.residual(row.x_next);
    double lam_err = (next_lambda - expect).norm() / std::max(1.0, expect.norm());

    double margin = std::min(gap_tol - gap_err, lambda_tol - lam_err);
    if (!row.budget_flag && row.gap > row.eta) margin = std::min(margin, row.eta - row.gap);
    rep.add(row.k, margin);
  }
  rep.finish();
  return rep;
}

inline BoundReport schedule_report(const ScheduleCheckReport& sched) {
  BoundReport rep;
  rep.check = "schedule_conditions";
  rep.add(1, sched.nonincreasing ? 0.0 : -1.0);
  rep.add(2, sched.summable ? 0.0 : -1.0);
  rep.add(3, sched.ratio_ok ? 0.0 : -1.0);
  rep.note = sched.summability_note;
  if (sched.analytic_power_law) rep.note += "; ratio condition holds analytically (alpha <= 1)";
  if (!sched.nonincreasing && sched.first_increase_k) {
    rep.note += "; first increase at k=" + std::to_string(*sched.first_increase_k);
  }
  if (!sched.ratio_ok && sched.first_ratio_violation_k) {
    rep.note += "; first ratio violation at k=" + std::to_string(*sched.first_ratio_violation_k);
  }
  rep.finish();
  return rep;
}

}  // namespace detail

struct VerifySettings {
  std::filesystem::path run_dir;
  double reference_tol = 1e-10;
  std::string reference_path;  // optional precomputed reference
};

// Rebuilds the run deterministically, audits the persisted trace against it,
// then evaluates every convergence bound with the reference solution.
inline int run_verify(const VerifySettings& vs, std::ostream& log) {
  json sidecar;
  RunDescriptor desc;
  ProblemInstance* instance = nullptr;
  std::optional<ProblemInstance> instance_storage;
  std::vector<TraceRowScalars> csv;
  try {
    std::filesystem::path run_json = vs.run_dir / "run.json";
    std::filesystem::path trace_csv = vs.run_dir / "trace.csv";
    if (!std::filesystem::exists(run_json)) throw IoError("missing " + run_json.string());
    if (!std::filesystem::exists(trace_csv)) throw IoError("missing " + trace_csv.string());
    sidecar = json::parse(read_file(run_json));
    desc = run_descriptor_from_json(sidecar);

    std::string instance_path = sidecar.at("instance_path").get<std::string>();
    std::filesystem::path ipath = instance_path;
    if (!std::filesystem::exists(ipath)) {
      ipath = vs.run_dir / std::filesystem::path(instance_path).filename();
    }
    if (!std::filesystem::exists(ipath)) throw IoError("missing instance file " + instance_path);
    std::string hash = hash_file(ipath);
    if (hash != sidecar.at("instance_hash").get<std::string>()) {
      throw IoError("instance hash mismatch for " + ipath.string() +
                    ": bundle was built from a different file");
    }
    instance_storage = load_instance(ipath);
    instance = &*instance_storage;
    csv = read_trace_csv(trace_csv);
  } catch (const json::exception& e) {
    log << "error: malformed run bundle: " << e.what() << "\n";
    return exit_code::io_usage;
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return exit_code::io_usage;
  }

  std::vector<BoundReport> reports;
  try {
    OuterTrace rerun = run_ial(*instance, desc.to_outer_config());
    reports.push_back(detail::audit_csv_against_rerun(csv, rerun));
    reports.push_back(detail::audit_certificates(*instance, rerun));

    ReferenceSolution ref;
    if (!vs.reference_path.empty()) {
      ref = load_reference(vs.reference_path);
    } else {
      ref = compute_reference(*instance, vs.reference_tol, desc.beta);
    }

    DualPath path = compute_dual_path(*instance, rerun, ref.tol);
    std::vector<double> deltas = delta_series(rerun, ref, path);
    TheoryConstants tc = compute_constants(rerun, deltas, ref, rerun.completed());

    reports.push_back(detail::schedule_report(
        check_schedule_conditions(desc.schedule, tc.k0.value_or(4),
                                  std::max<long>(rerun.completed(), tc.k0.value_or(4)))));
    reports.push_back(check_gap_square_summability(deltas));
    reports.push_back(check_gap_tail_bound(deltas, tc, desc.schedule));
    for (BoundReport& rep : check_rate_bounds(rerun, deltas, tc, ref)) {
      reports.push_back(std::move(rep));
    }
    for (BoundReport& rep :
         check_trace_inequalities(*instance, rerun, ref, deltas, tc, path)) {
      reports.push_back(std::move(rep));
    }
    reports.push_back(check_dual_linearization_bound(*instance, rerun, tc, path));
    reports.push_back(
        check_scalar_recursion(tc.delta1, tc.theta, std::max<long>(10000, rerun.completed())));
  } catch (const ReferenceError& e) {
    log << "reference failure: " << e.what() << "\n";
    return exit_code::reference_failure;
  } catch (const std::domain_error& e) {
    log << "reference failure: " << e.what() << "\n";
    return exit_code::reference_failure;
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return exit_code::io_usage;
  }

  std::filesystem::path report_dir = vs.run_dir / "reports";
  bool all_passed = true;
  std::optional<long> first_violation;
  for (const BoundReport& rep : reports) {
    save_bound_report(rep, report_dir);
    std::string status = rep.skipped ? "SKIP" : (rep.passed ? "PASS" : "FAIL");
    log << "[" << status << "] " << rep.check;
    if (!rep.margins.empty()) log << " (min margin " << rep.min_margin << ")";
    if (rep.first_violation_k) log << " first violation at k=" << *rep.first_violation_k;
    if (!rep.note.empty()) log << " -- " << rep.note;
    log << "\n";
    if (!rep.skipped && !rep.passed) {
      all_passed = false;
      if (!first_violation && rep.first_violation_k) first_violation = rep.first_violation_k;
    }
  }
  if (!all_passed) {
    log << "verification FAILED";
    if (first_violation) log << " (first violation k=" << *first_violation << ")";
    log << "\n";
    return exit_code::bound_violation;
  }
  log << "verification passed: " << reports.size() << " checks\n";
  return exit_code::ok;
}

struct SweepSettings {
  InstanceSource source;
  std::vector<double> betas;
  std::vector<double> sigmas;
  std::vector<double> alphas;
  std::vector<InnerMethod> methods;
  long outer_iters = 500;
  long inner_budget = 100000;
  double reference_tol = 1e-8;
  std::filesystem::path out_dir;
  unsigned threads = 0;  // 0 => hardware concurrency
};

struct SweepRow {
  double alpha = 0.0;
  double sigma = 0.0;
  double beta = 0.0;
  InnerMethod method = InnerMethod::accel_prox_grad;
  double final_delta = 0.0;
  double delta_slope = 0.0;
  std::string status;  // "ok" or an error note
};

// Cartesian sweep over (beta, sigma, alpha, method); runs are independent and
// execute in parallel (capped at the logical core count), each writing its
// own bundle directory. Failures are recorded per row and the sweep continues.
inline int run_sweep(const SweepSettings& ss, std::ostream& log) {
  if (ss.betas.empty() || ss.sigmas.empty() || ss.alphas.empty() || ss.methods.empty()) {
    log << "error: sweep lists must be nonempty (--betas, --sigmas, --alphas, --inners)\n";
    return exit_code::io_usage;
  }
  std::optional<ResolvedInstance> resolved;
  ReferenceSolution ref;
  try {
    std::filesystem::create_directories(ss.out_dir);
    resolved = resolve_instance(ss.source, ss.out_dir);
    ref = compute_reference(resolved->instance, ss.reference_tol, ss.betas.front());
  } catch (const ReferenceError& e) {
    log << "reference failure: " << e.what() << "\n";
    return exit_code::reference_failure;
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return exit_code::io_usage;
  }

  std::vector<SweepRow> rows;
  for (double beta : ss.betas) {
    for (double sigma : ss.sigmas) {
      for (double alpha : ss.alphas) {
        for (InnerMethod method : ss.methods) {
          SweepRow row;
          row.beta = beta;
          row.sigma = sigma;
          row.alpha = alpha;
          row.method = method;
          rows.push_back(row);
        }
      }
    }
  }

  const ProblemInstance& instance = resolved->instance;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      SweepRow& row = rows[i];
      char dirname[64];
      std::snprintf(dirname, sizeof(dirname), "run_%03zu", i);
      std::filesystem::path dir = ss.out_dir / dirname;
      try {
        RunDescriptor desc;
        desc.beta = row.beta;
        desc.schedule = ToleranceSchedule::power_law(row.sigma, row.alpha);
        desc.outer_iters = ss.outer_iters;
        desc.method = row.method;
        desc.inner_budget = ss.inner_budget;
        desc.gap_floor = 0.0;  // sweeps compare full-length traces
        desc.feas_floor = 0.0;
        OuterTrace trace = run_ial(instance, desc.to_outer_config());
        write_trace_csv(trace, dir / "trace.csv");
        write_file(dir / "run.json",
                   dump_canonical(run_sidecar_json(desc, trace, resolved->path, resolved->hash)));
        if (trace.aborted) {
          row.status = "abort";
          continue;
        }
        DualPath path = compute_dual_path(instance, trace, ss.reference_tol);
        std::vector<double> deltas = delta_series(trace, ref, path);
        row.final_delta = deltas.back();
        long k_lo = std::max<long>(2, trace.completed() / 10);
        std::vector<double> ks, ds;
        for (long k = k_lo; k <= trace.completed(); ++k) {
          ks.push_back(static_cast<double>(k));
          ds.push_back(std::max(deltas[static_cast<std::size_t>(k - 1)], 1e-16));
        }
        row.delta_slope = fit_loglog_slope(ks, ds);
        row.status = "ok";
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
    }
  };

  unsigned n_threads = ss.threads != 0 ? ss.threads : std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(rows.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  std::string csv = "alpha,sigma,beta,method,final_delta,delta_slope,status\n";
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    csv += buf;
  };
  for (const SweepRow& row : rows) {
    put(row.alpha);
    csv += ',';
    put(row.sigma);
    csv += ',';
    put(row.beta);
    csv += ',';
    csv += method_to_string(row.method);
    csv += ',';
    put(row.final_delta);
    csv += ',';
    put(row.delta_slope);
    csv += ',';
    csv += row.status;
    csv += '\n';
  }
  try {
    write_file(ss.out_dir / "summary.csv", csv);
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return exit_code::io_usage;
  }
  log << "sweep: " << rows.size() << " runs -> " << (ss.out_dir / "summary.csv").string() << "\n";
  for (const SweepRow& row : rows) {
    log << "  alpha=" << row.alpha << " sigma=" << row.sigma << " beta=" << row.beta << " "
        << method_to_string(row.method) << ": delta_K=" << row.final_delta
        << " slope=" << row.delta_slope << " [" << row.status << "]\n";
  }
  return exit_code::ok;
}

}  // namespace ial
