#include "pinch/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace pinch {

ParseError::ParseError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

bool skippable(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

// Parses "key=<int>" into value.
bool key_int(const std::string& token, const std::string& key, int& value) {
  if (token.rfind(key + "=", 0) != 0) return false;
  std::size_t used = 0;
  try {
    value = std::stoi(token.substr(key.size() + 1), &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == token.size() - key.size() - 1;
}

double parse_double(const std::string& s, int line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "not a number: '" + s + "'");
  }
  if (used != s.size()) throw ParseError(line, "not a number: '" + s + "'");
  return v;
}

}  // namespace

CurvatureTensor read_tensor(std::istream& in) {
  std::string line;
  int lineno = 0;
  int n = 0, bianchi = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    std::istringstream ss(line);
    std::string tag, tn, tb, extra;
    ss >> tag >> tn >> tb;
    if (tag != "curvature" || !key_int(tn, "n", n) || !key_int(tb, "bianchi", bianchi) ||
        (ss >> extra)) {
      throw ParseError(lineno, "expected header 'curvature n=<n> bianchi=<0|1>'");
    }
    break;
  }
  if (bianchi < 0) throw ParseError(lineno, "missing header");
  if (bianchi > 1) throw ParseError(lineno, "bianchi must be 0 or 1");
  if (n < 2 || n > kMaxDimension) {
    throw ParseError(lineno, "dimension n=" + std::to_string(n) + " out of range");
  }

  const int np = n * (n - 1) / 2;
  Eigen::MatrixXd pair = Eigen::MatrixXd::Zero(np, np);
  std::map<std::tuple<int, int, int, int>, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    std::istringstream ss(line);
    std::string f[5], extra;
    if (!(ss >> f[0] >> f[1] >> f[2] >> f[3] >> f[4]) || (ss >> extra)) {
      throw ParseError(lineno, "expected 'i j k l value'");
    }
    int idx[4];
    for (int m = 0; m < 4; ++m) {
      const double v = parse_double(f[m], lineno);
      if (v != std::floor(v) || v < 1 || v > n) {
        throw ParseError(lineno, "index '" + f[m] + "' outside 1.." + std::to_string(n));
      }
      idx[m] = static_cast<int>(v) - 1;
    }
    const auto [i, j, k, l] = std::tie(idx[0], idx[1], idx[2], idx[3]);
    if (!(i < j) || !(k < l) || std::make_pair(i, j) > std::make_pair(k, l)) {
      throw ParseError(lineno, "generator must have i < j, k < l and (i,j) <= (k,l)");
    }
    const auto key = std::make_tuple(i, j, k, l);
    if (auto it = seen.find(key); it != seen.end()) {
      throw ParseError(lineno, "duplicate generator (first on line " +
                                   std::to_string(it->second) + ")");
    }
    seen.emplace(key, lineno);
    const double value = parse_double(f[4], lineno);
    if (!std::isfinite(value)) throw ParseError(lineno, "non-finite value");
    const int p = pair_index(n, i, j), q = pair_index(n, k, l);
    pair(p, q) = value;
    pair(q, p) = value;
  }
  CurvatureTensor r = CurvatureTensor::from_pair_matrix(pair, bianchi == 1);
  if (bianchi == 1 && !r.satisfies_bianchi(1e-9)) {
    throw ParseError(lineno, "header says bianchi=1 but the Bianchi defect is " +
                                 std::to_string(r.bianchi_defect()));
  }
  return r;
}

CurvatureTensor read_tensor_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return read_tensor(in);
}

void write_tensor(std::ostream& out, const CurvatureTensor& r) {
  const int n = r.dim();
  out << "curvature n=" << n << " bianchi=" << (r.bianchi_expected() ? 1 : 0) << "\n";
  const Eigen::MatrixXd& m = r.pair_matrix();
  char buf[96];
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = i; k < n; ++k) {
        for (int l = (k == i ? j : k + 1); l < n; ++l) {
          const double v = m(pair_index(n, i, j), pair_index(n, k, l));
          if (v == 0) continue;
          std::snprintf(buf, sizeof buf, "%d %d %d %d %.17g\n", i + 1, j + 1, k + 1, l + 1, v);
          out << buf;
        }
      }
    }
  }
}

std::vector<TrajectoryPoint> read_trajectory(std::istream& in) {
  std::vector<TrajectoryPoint> out;
  std::string line;
  int lineno = 0;
  static const char* keys[] = {"t", "scal", "m1", "m2", "m3", "m4", "norm"};
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    std::istringstream ss(line);
    double v[7];
    for (int k = 0; k < 7; ++k) {
      std::string tok;
      const std::string key = keys[k];
      if (!(ss >> tok) || tok.rfind(key + "=", 0) != 0) {
        throw ParseError(lineno, "expected '" + key + "=<value>'");
      }
      const std::string s = tok.substr(key.size() + 1);
      // NaN margins are written without cone parameters.
      v[k] = (s == "nan" || s == "-nan") ? std::nan("") : parse_double(s, lineno);
    }
    std::string extra;
    if (ss >> extra) throw ParseError(lineno, "trailing text '" + extra + "'");
    TrajectoryPoint p;
    p.t = v[0];
    p.scal = v[1];
    for (int k = 0; k < 4; ++k) p.margin[k] = v[2 + k];
    p.norm = v[6];
    out.push_back(p);
  }
  return out;
}

}  // namespace pinch
