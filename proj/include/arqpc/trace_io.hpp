#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "arqpc/arqpc.hpp"

namespace arqpc {

inline constexpr const char* kTraceSchema = "# arqpc-trace-v1";

/// The CSV columns of one iteration.
struct TraceRow {
  long long k = 0;
  double w = 0.0;
  double sigma = 0.0;
  double step_norm = 0.0;
  double rho = 0.0;
  bool success = false;
  Vector delta;

  static TraceRow from(const IterationRecord& r);
  bool operator==(const TraceRow& o) const;
};

/// Header comment, column line, one row per iteration; reals with 17 significant digits.
void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace, int q);
/// Streaming pieces of write_trace_csv, for runs too long to keep in memory.
void write_trace_header(std::ostream& os, int q);
void write_trace_row(std::ostream& os, const IterationRecord& r, int q);
std::vector<TraceRow> read_trace_csv(std::istream& is);

std::string format_real(double v);

nlohmann::json certificate_json(const Certificate& cert);
nlohmann::json run_json(const RunResult& run);

}  // namespace arqpc
