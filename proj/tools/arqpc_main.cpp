#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arqpc/problems.hpp"
#include "arqpc/sweep.hpp"
#include "arqpc/trace_io.hpp"

namespace fs = std::filesystem;
using namespace arqpc;

namespace {

enum Exit { kOk = 0, kOther = 1, kBudget = 2, kUnknownProblem = 3 };

struct Common {
  int p = 2;
  int q = 1;
  std::string eps = "0.01";
  double theta = 0.5;
  double sigma0 = 1.0;
  double sigma_min = 1e-8;
  double eta1 = 0.1;
  double eta2 = 0.9;
  double gamma1 = 0.5;
  double gamma2 = 2.0;
  double gamma3 = 10.0;
  std::string delta_policy = "auto";
  std::uint64_t seed = 1;
  long long max_iters = 1'000'000;
  std::string out;
  std::string mode;  // empty: per-command default
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double x = std::stod(cell, &used);
    if (used != cell.size()) throw InvalidArgument("not a number: " + cell);
    v.push_back(x);
  }
  if (v.empty()) throw InvalidArgument("empty list");
  return v;
}

DeltaPolicy parse_policy(const std::string& s) {
  if (s == "unit") return DeltaPolicy::unit;
  if (s == "scaled") return DeltaPolicy::scaled;
  if (s == "auto") return DeltaPolicy::auto_;
  throw InvalidArgument("unknown delta policy: " + s);
}

ReplayMode parse_mode(const std::string& s, ReplayMode fallback) {
  if (s.empty()) return fallback;
  if (s == "node") return ReplayMode::node;
  if (s == "interpolant") return ReplayMode::interpolant;
  throw InvalidArgument("unknown mode: " + s);
}

// One ε for every order, or exactly q values.
Vector eps_for_orders(const std::vector<double>& eps, int q) {
  if (eps.size() == 1) return Vector(q, eps[0]);
  if (static_cast<int>(eps.size()) != q) throw InvalidArgument("--eps needs one value or q values");
  return Vector(eps.begin(), eps.end());
}

AlgoParams params_from(const Common& c) {
  AlgoParams ap;
  ap.q = c.q;
  ap.eps = eps_for_orders(parse_list(c.eps), c.q);
  ap.theta = c.theta;
  ap.sigma0 = c.sigma0;
  ap.sigma_min = std::min(c.sigma_min, c.sigma0);
  ap.eta1 = c.eta1;
  ap.eta2 = c.eta2;
  ap.gamma1 = c.gamma1;
  ap.gamma2 = c.gamma2;
  ap.gamma3 = c.gamma3;
  ap.delta_policy = parse_policy(c.delta_policy);
  ap.seed = c.seed;
  ap.max_iters = c.max_iters;
  return ap;
}

ProblemOptions problem_options(const Common& c) {
  ProblemOptions po;
  po.p = c.p;
  po.q = c.q;
  po.eps = parse_list(c.eps).front();
  // Node mode needs a scripted step, so plain solves default to the interpolant.
  po.mode = parse_mode(c.mode, ReplayMode::interpolant);
  return po;
}

fs::path out_dir(const Common& c) {
  fs::path dir(c.out);
  fs::create_directories(dir);
  return dir;
}

int cmd_solve(const Common& c, const std::string& name) {
  Problem prob = make_problem(name, problem_options(c));
  AlgoParams ap = params_from(c);
  RunOptions ro;
  ro.keep_trace = !c.out.empty();
  RunResult res = run(prob, ap, ro);
  nlohmann::json summary = run_json(res);
  if (!c.out.empty()) {
    fs::path dir = out_dir(c);
    std::ofstream trace(dir / "trace.csv");
    write_trace_csv(trace, res.trace, ap.q);
    std::ofstream cert(dir / "certificate.json");
    cert << certificate_json(res.certificate).dump(2) << '\n';
  }
  std::cout << summary.dump(2) << '\n';
  return res.termination == Termination::budget ? kBudget : kOk;
}

int cmd_phi(const Common& c, const std::string& name, const std::string& x_text, int j, double delta) {
  Problem prob = make_problem(name, problem_options(c));
  std::vector<double> xv = parse_list(x_text);
  std::vector<double> eps = parse_list(c.eps);
  const double eps_j = eps.size() == 1 ? eps[0] : eps.at(j - 1);
  PhiValue ph = phi_w(prob, Vector(xv.begin(), xv.end()), j, delta);
  const double thr = strong_threshold(eps_j, delta, j);
  std::cout << "j,delta,phi,threshold,gap,verdict\n"
            << j << ',' << format_real(delta) << ',' << format_real(ph.value) << ',' << format_real(thr) << ','
            << format_real(ph.gap) << ',' << (ph.value <= thr + ph.gap ? "pass" : "fail") << '\n';
  return kOk;
}

int cmd_worstcase(const Common& c, const std::string& kind) {
  WorstCaseInstance inst = build_worstcase(worstcase_kind_from_name(kind), c.p, c.q, parse_list(c.eps).front());
  ReplayOptions ro;
  ro.mode = parse_mode(c.mode, ReplayMode::node);
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!c.out.empty()) {
    file.open(out_dir(c) / "trace.csv");
    os = &file;
  }
  const int q = inst.q();
  write_trace_header(*os, q);
  ro.on_iteration = [os, q](const IterationRecord& r) { write_trace_row(*os, r, q); };
  ReplayResult rr = replay(inst, ro);
  std::cout << "k_eps," << rr.k_eps << ",iters," << rr.run.iterations << ",match," << (rr.match ? "true" : "false")
            << '\n';
  return rr.match ? kOk : kOther;
}

int cmd_sweep(const Common& c, const std::string& target, int threads) {
  SweepSpec spec;
  spec.target = target;
  spec.p = c.p;
  spec.q = c.q;
  spec.eps = parse_list(c.eps);
  Common one = c;
  one.eps = format_real(spec.eps.front());
  spec.base = params_from(one);
  spec.mode = parse_mode(c.mode, ReplayMode::node);
  spec.threads = threads;
  SweepResult res = sweep(spec);
  if (!c.out.empty()) {
    std::ofstream f(out_dir(c) / "sweep.csv");
    write_sweep_csv(f, res);
  } else {
    write_sweep_csv(std::cout, res);
  }
  std::cout << "slope," << format_real(res.slope) << ",target," << format_real(res.target) << ",fitted," << res.fitted
            << '\n';
  for (const auto& r : res.rows)
    if (r.flagged) std::cerr << "flagged eps=" << format_real(r.eps) << ": " << r.message << '\n';
  return res.any_flagged ? kBudget : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive regularization for composite problems: solve, phi, worst-case replays and sweeps"};
  app.set_config("--config", "", "TOML file with option values; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  Common c;
  app.add_option("--p", c.p, "Model degree p")->check(CLI::Range(1, 6));
  app.add_option("--q", c.q, "Optimality order q")->check(CLI::Range(1, 6));
  app.add_option("--eps", c.eps, "Tolerance, or a comma list (per order for solve, ε grid for sweep)");
  app.add_option("--theta", c.theta, "Step-termination constant θ");
  app.add_option("--sigma0", c.sigma0, "Initial regularization weight");
  app.add_option("--sigma-min", c.sigma_min, "Lower bound on the regularization weight");
  app.add_option("--eta1", c.eta1, "Success threshold η1");
  app.add_option("--eta2", c.eta2, "Very-successful threshold η2");
  app.add_option("--gamma1", c.gamma1, "σ decrease factor");
  app.add_option("--gamma2", c.gamma2, "σ increase factor");
  app.add_option("--gamma3", c.gamma3, "Largest σ increase factor");
  app.add_option("--delta-policy", c.delta_policy, "unit | scaled | auto");
  app.add_option("--seed", c.seed, "Seed for randomized subproblem starts");
  app.add_option("--max-iters", c.max_iters, "Iteration budget");
  app.add_option("--out", c.out, "Output directory");
  app.add_option("--mode", c.mode, "Worst-case realization: node | interpolant (solve defaults to interpolant, others to node)");

  std::string name, x_text = "0", kind, target;
  int j = 1, threads = 0;
  double delta = 1.0;

  auto* solve = app.add_subcommand("solve", "Run the algorithm on a named problem");
  solve->add_option("problem", name, "Problem name")->required();
  auto* phi = app.add_subcommand("phi", "Evaluate the optimality measure at a point");
  phi->add_option("problem", name, "Problem name")->required();
  phi->add_option("--x", x_text, "Point, comma separated");
  phi->add_option("--j", j, "Order")->check(CLI::PositiveNumber);
  phi->add_option("--delta", delta, "Radius in (0,1]");
  auto* wc = app.add_subcommand("worstcase", "Replay a worst-case sequence");
  wc->add_option("--kind", kind, "thm61 | thm63 | cor64")->required();
  auto* sw = app.add_subcommand("sweep", "Iteration counts over an ε grid and the fitted exponent");
  sw->add_option("target", target, "Problem name or wc-thm61 | wc-thm63 | wc-cor64")->required();
  sw->add_option("--threads", threads, "Worker count (0: automatic)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kOther;
  }

  try {
    if (*solve) return cmd_solve(c, name);
    if (*phi) return cmd_phi(c, name, x_text, j, delta);
    if (*wc) return cmd_worstcase(c, kind);
    if (*sw) return cmd_sweep(c, target, threads);
  } catch (const UnknownProblem& e) {
    std::cerr << e.what() << "; known problems:";
    for (const auto& n : problem_names()) std::cerr << ' ' << n;
    std::cerr << '\n';
    return kUnknownProblem;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOther;
}
