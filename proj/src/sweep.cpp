#include "arqpc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "arqpc/trace_io.hpp"

namespace arqpc {

void SweepSpec::validate() const {
  if (eps.size() < 4) throw InvalidArgument("a sweep needs at least four tolerances");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && eps[i] < 1.0)) throw InvalidArgument("sweep tolerances must lie in (0,1)");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw InvalidArgument("sweep tolerances must be strictly decreasing");
  }
  if (p < 1 || q < 1 || q > p) throw InvalidArgument("sweep needs 1 <= q <= p");
}

double target_exponent(int p, int q, bool h_zero, bool h_convex, bool f_convex) {
  const double P = p, Q = q;
  if (h_zero) {
    if (f_convex && q <= 2) return (P + 1) / (P - Q + 1);
    return Q * (P + 1) / P;
  }
  if (h_convex && q == 1 && f_convex) return (P + 1) / P;
  return Q + 1;
}

double target_exponent(const Problem& prob, int q) {
  const PolicyInputs pi = policy_for(prob, q);
  return target_exponent(prob.p, q, pi.h_zero, pi.h_convex, pi.f_convex);
}

double fit_slope(const std::vector<double>& eps, const std::vector<double>& counts) {
  const std::size_t n = std::min(eps.size(), counts.size());
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(1.0 / eps[i]);
    const double y = std::log(std::max(1.0, counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

int sweep_threads(int requested) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int n = requested > 0 ? requested : hw;
  if (const char* env = std::getenv("ARQPC_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, n);
}

namespace {

bool is_worstcase(const std::string& name) { return name.rfind("wc-", 0) == 0; }

SweepRow run_row(const SweepSpec& spec, double eps) {
  SweepRow row;
  row.eps = eps;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    RunResult run;
    if (is_worstcase(spec.target)) {
      const auto inst = build_worstcase(worstcase_kind_from_name(spec.target), spec.p, spec.q, eps);
      ReplayOptions ro;
      ro.mode = spec.mode;
      ReplayResult rr = replay(inst, ro);
      run = std::move(rr.run);
      if (spec.mode == ReplayMode::interpolant && !rr.match) {
        row.flagged = true;
        row.message = "interpolant run did not match the node sequence";
      }
    } else {
      ProblemOptions po;
      po.p = spec.p;
      po.q = spec.q;
      po.eps = eps;
      const Problem prob = make_problem(spec.target, po);
      AlgoParams params = spec.base;
      params.q = spec.q;
      params.eps.assign(spec.q, eps);
      RunOptions ro;
      ro.keep_trace = false;
      run = arqpc::run(prob, params, ro);
    }
    row.iterations = run.iterations;
    row.successes = run.successes;
    row.w_evals = run.counters.w_evals;
    row.deriv_evals = run.counters.deriv_evals;
    row.termination = run.termination;
    if (run.termination == Termination::budget) {
      row.flagged = true;
      row.message = run.message.empty() ? "budget" : run.message;
    }
  } catch (const ReplayMismatch& e) {
    row.flagged = true;
    row.message = e.what();
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

}  // namespace

SweepResult sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult res;
  res.rows.resize(spec.eps.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < spec.eps.size();) {
      try {
        res.rows[i] = run_row(spec, spec.eps[i]);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int nthreads = std::min<int>(sweep_threads(spec.threads), static_cast<int>(spec.eps.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<double> xs, ys;
  for (const auto& r : res.rows) {
    if (r.flagged) {
      res.any_flagged = true;
      continue;
    }
    xs.push_back(r.eps);
    ys.push_back(static_cast<double>(r.iterations));
  }
  res.fitted = static_cast<int>(xs.size());
  res.slope = fit_slope(xs, ys);

  if (is_worstcase(spec.target)) {
    const auto kind = worstcase_kind_from_name(spec.target);
    const int q = kind == WorstCaseKind::cor64 ? 1 : spec.q;
    res.target = kind == WorstCaseKind::cor64 ? target_exponent(spec.p, 1, false, true, true)
                                              : target_exponent(spec.p, q, true, true, true);
  } else {
    ProblemOptions po;
    po.p = spec.p;
    po.q = spec.q;
    res.target = target_exponent(make_problem(spec.target, po), spec.q);
  }
  return res;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  os << "eps,iterations,successes,w_evals,deriv_evals,termination,wall_seconds,flagged\n";
  for (const auto& r : result.rows)
    os << format_real(r.eps) << ',' << r.iterations << ',' << r.successes << ',' << r.w_evals << ',' << r.deriv_evals
       << ',' << to_string(r.termination) << ',' << format_real(r.wall_seconds) << ',' << (r.flagged ? 1 : 0) << '\n';
  os << "# slope," << format_real(result.slope) << ",target," << format_real(result.target) << ",fitted,"
     << result.fitted << '\n';
}

}  // namespace arqpc
