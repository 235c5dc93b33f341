#pragma once
// Text formats.
//
// Tensor files: a header `curvature n=<n> bianchi=<0|1>`, then one
// `i j k l value` line per generator with 1-based indices, i < j, k < l and
// (i, j) <= (k, l) lexicographically. The other components follow from the
// pair symmetries; generators that are not listed are zero. Blank lines and
// lines starting with '#' are ignored.
//
// Trajectory dumps: one trajectory_line() per point.

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinch/curvature.hpp"
#include "pinch/transversality.hpp"

namespace pinch {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

// Throws ParseError on malformed input, duplicate or non-canonical
// generators, and (when the header says bianchi=1) on a Bianchi defect above
// 1e-9 |R|.
CurvatureTensor read_tensor(std::istream& in);
CurvatureTensor read_tensor_file(const std::string& path);
// Nonzero generators only, 17 significant digits.
void write_tensor(std::ostream& out, const CurvatureTensor& r);

std::vector<TrajectoryPoint> read_trajectory(std::istream& in);

}  // namespace pinch
