#include "pinch/check_record.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace pinch {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

// Values are whitespace-free so a line splits on spaces.
std::string token(std::string s) {
  for (char& c : s) {
    if (c == ' ' || c == '\t' || c == '\n') c = '_';
  }
  return s.empty() ? "-" : s;
}

}  // namespace

std::string CheckRecord::line() const {
  std::string out = "id=" + token(id) + " n=" + std::to_string(n) + " grid=" + token(grid);
  out += " lhs=" + num(lhs) + " rhs=" + num(rhs) + " margin=" + num(margin) + " tol=" + num(tol);
  out += std::string(" pass=") + (skipped ? "skip" : pass ? "1" : "0");
  out += " prov=" + token(provenance);
  return out;
}

CheckRecord make_record(std::string id, int n, std::string grid, double lhs, double rhs,
                        double margin, double tol, std::string provenance) {
  CheckRecord r;
  r.id = std::move(id);
  r.n = n;
  r.grid = std::move(grid);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = margin;
  r.tol = tol;
  r.pass = std::isfinite(margin) && margin > -tol;
  r.provenance = std::move(provenance);
  return r;
}

CheckRecord skipped_record(std::string id, int n, std::string grid, std::string reason) {
  CheckRecord r;
  r.id = std::move(id);
  r.n = n;
  r.grid = std::move(grid);
  r.lhs = r.rhs = r.margin = std::numeric_limits<double>::quiet_NaN();
  r.skipped = true;
  r.provenance = std::move(reason);
  return r;
}

RecordSummary summarize(const std::vector<CheckRecord>& records) {
  RecordSummary s;
  s.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    ++s.total;
    if (r.skipped) {
      ++s.skipped;
      continue;
    }
    r.pass ? ++s.passed : ++s.failed;
    if (r.margin < s.min_margin) {
      s.min_margin = r.margin;
      s.min_margin_id = r.id;
    }
  }
  return s;
}

}  // namespace pinch
