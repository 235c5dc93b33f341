#pragma once
// One verified inequality, serialized as a single line with fixed key order:
//   id=<id> n=<n> grid=<grid> lhs=<x> rhs=<x> margin=<x> tol=<x> pass=<1|0|skip> prov=<text>
// margin is oriented so that the inequality holds iff margin >= 0; a record
// passes iff margin > -tol. With tol = 0 this is a strict inequality.

#include <string>
#include <vector>

namespace pinch {

struct CheckRecord {
  std::string id;
  int n = 0;
  std::string grid;
  double lhs = 0, rhs = 0, margin = 0, tol = 0;
  bool pass = false;
  bool skipped = false;
  std::string provenance;

  std::string line() const;
};

CheckRecord make_record(std::string id, int n, std::string grid, double lhs, double rhs,
                        double margin, double tol, std::string provenance);
CheckRecord skipped_record(std::string id, int n, std::string grid, std::string reason);

struct RecordSummary {
  int total = 0, passed = 0, failed = 0, skipped = 0;
  double min_margin = 0;
  std::string min_margin_id;
};
RecordSummary summarize(const std::vector<CheckRecord>& records);

}  // namespace pinch
