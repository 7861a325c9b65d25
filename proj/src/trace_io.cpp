#include "arqpc/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace arqpc {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TraceRow TraceRow::from(const IterationRecord& r) {
  TraceRow t;
  t.k = r.k;
  t.w = r.w;
  t.sigma = r.sigma;
  t.step_norm = r.step_norm;
  t.rho = r.rho;
  t.success = r.success;
  t.delta = r.delta;
  return t;
}

bool TraceRow::operator==(const TraceRow& o) const {
  auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
  if (k != o.k || success != o.success || delta.size() != o.delta.size()) return false;
  if (!same(w, o.w) || !same(sigma, o.sigma) || !same(step_norm, o.step_norm) || !same(rho, o.rho)) return false;
  for (std::size_t i = 0; i < delta.size(); ++i)
    if (!same(delta[i], o.delta[i])) return false;
  return true;
}

void write_trace_header(std::ostream& os, int q) {
  os << kTraceSchema << '\n' << "k,w,sigma,step_norm,rho,success";
  for (int j = 1; j <= q; ++j) os << ",delta_" << j;
  os << '\n';
}

void write_trace_row(std::ostream& os, const IterationRecord& r, int q) {
  os << r.k << ',' << format_real(r.w) << ',' << format_real(r.sigma) << ',' << format_real(r.step_norm) << ','
     << format_real(r.rho) << ',' << (r.success ? 1 : 0);
  for (int j = 0; j < q; ++j) os << ',' << format_real(j < static_cast<int>(r.delta.size()) ? r.delta[j] : 0.0);
  os << '\n';
}

void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace, int q) {
  write_trace_header(os, q);
  for (const auto& r : trace) write_trace_row(os, r, q);
}

std::vector<TraceRow> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTraceSchema) throw InvalidArgument("missing trace schema line");
  if (!std::getline(is, line) || line.rfind("k,w,sigma,step_norm,rho,success", 0) != 0)
    throw InvalidArgument("unexpected trace column line");
  std::vector<TraceRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 6) throw InvalidArgument("short trace row: " + line);
    TraceRow r;
    r.k = std::stoll(cells[0]);
    r.w = std::strtod(cells[1].c_str(), nullptr);
    r.sigma = std::strtod(cells[2].c_str(), nullptr);
    r.step_norm = std::strtod(cells[3].c_str(), nullptr);
    r.rho = std::strtod(cells[4].c_str(), nullptr);
    r.success = cells[5] == "1";
    for (std::size_t i = 6; i < cells.size(); ++i) r.delta.push_back(std::strtod(cells[i].c_str(), nullptr));
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json certificate_json(const Certificate& cert) {
  nlohmann::json j;
  j["x"] = std::vector<double>(cert.x.begin(), cert.x.end());
  j["pass"] = cert.pass;
  j["source"] = cert.source;
  auto& orders = j["orders"] = nlohmann::json::array();
  for (const auto& oc : cert.orders)
    orders.push_back({{"j", oc.j},
                      {"delta", oc.delta},
                      {"phi", oc.phi},
                      {"threshold", oc.threshold},
                      {"gap", oc.gap},
                      {"pass", oc.pass}});
  return j;
}

nlohmann::json run_json(const RunResult& run) {
  nlohmann::json j;
  j["termination"] = to_string(run.termination);
  j["iterations"] = run.iterations;
  j["successes"] = run.successes;
  j["w_evals"] = run.counters.w_evals;
  j["deriv_evals"] = run.counters.deriv_evals;
  j["x_final"] = std::vector<double>(run.x_final.begin(), run.x_final.end());
  j["w_final"] = run.w_final;
  j["certificate"] = certificate_json(run.certificate);
  if (!run.message.empty()) j["message"] = run.message;
  return j;
}

}  // namespace arqpc
