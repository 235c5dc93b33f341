#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "pinch/io.hpp"
#include "pinch/samples.hpp"

using namespace pinch;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "pinch");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / ("pinch_test_" + name);
  std::ofstream(p) << content;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_prefix(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  int k = 0;
  while (std::getline(in, line)) k += line.rfind(prefix, 0) == 0;
  return k;
}

}  // namespace

TEST_CASE("tensor files round-trip") {
  Rng rng(12);
  for (int n : {4, 9}) {
    const CurvatureTensor r = random_bianchi(n, rng);
    std::stringstream ss;
    write_tensor(ss, r);
    const CurvatureTensor back = read_tensor(ss);
    CHECK(back.dim() == n);
    CHECK(back.bianchi_expected());
    CHECK((back - r).norm() <= 1e-15 * r.norm());
  }
  std::stringstream ss("# comment\ncurvature n=4 bianchi=0\n\n1 2 3 4 0.5\n");
  const CurvatureTensor r = read_tensor(ss);
  CHECK(r(0, 1, 2, 3) == 0.5);
  CHECK(r(2, 3, 0, 1) == 0.5);
  CHECK(r(1, 0, 2, 3) == -0.5);
  CHECK(r(0, 1, 0, 1) == 0.0);
}

TEST_CASE("tensor file errors") {
  auto fails = [](const std::string& text) {
    std::stringstream ss(text);
    try {
      read_tensor(ss);
    } catch (const ParseError&) {
      return true;
    }
    return false;
  };
  CHECK(fails(""));
  CHECK(fails("curvature n=4\n"));
  CHECK(fails("curvature n=4 bianchi=2\n"));
  CHECK(fails("tensor n=4 bianchi=0\n"));
  CHECK(fails("curvature n=4 bianchi=0\n1 2 3\n"));
  CHECK(fails("curvature n=4 bianchi=0\n2 1 3 4 1\n"));       // i > j
  CHECK(fails("curvature n=4 bianchi=0\n3 4 1 2 1\n"));       // (i,j) > (k,l)
  CHECK(fails("curvature n=4 bianchi=0\n1 2 3 5 1\n"));       // index range
  CHECK(fails("curvature n=4 bianchi=0\n1 2 3 4 x\n"));
  CHECK(fails("curvature n=4 bianchi=0\n1 2 3 4 1\n1 2 3 4 2\n"));  // duplicate
  // R_1234 alone violates the Bianchi identity.
  CHECK(fails("curvature n=4 bianchi=1\n1 2 3 4 1\n"));
  CHECK(!fails("curvature n=4 bianchi=0\n1 2 3 4 1\n"));
}

TEST_CASE("trajectory dumps read back") {
  TrajectoryPoint p;
  p.t = 0.5;
  p.scal = 3;
  p.norm = 2;
  p.margin = {1, 2, 3, std::nan("")};
  std::stringstream ss;
  ss << "# header\n" << trajectory_line(p) << "\n";
  const auto pts = read_trajectory(ss);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].t == 0.5);
  CHECK(pts[0].margin[2] == 3);
  CHECK(std::isnan(pts[0].margin[3]));
  std::stringstream bad("t=1 scal=2\n");
  CHECK_THROWS_AS(read_trajectory(bad), ParseError);
}

TEST_CASE("argument parsing helpers") {
  CHECK(cli::parse_n_list("9,10,11") == std::vector<int>{9, 10, 11});
  CHECK(cli::parse_n_list("9..11") == std::vector<int>{9, 10, 11});
  CHECK(cli::parse_n_list(" ").empty());
  CHECK_THROWS_AS(cli::parse_n_list("9,x"), cli::UsageError);
  CHECK(cli::parse_beta_grid("3", 9).size() == 3);
  CHECK(cli::parse_beta_grid("0.01,0.06", 9).size() == 2);
  CHECK_THROWS_AS(cli::parse_beta_grid("0.5", 9), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_gamma_factor("maybe"), cli::UsageError);
}

TEST_CASE("params") {
  const Run r = run({"params", "--n", "9", "--b", "0.05"});
  CHECK(r.code == 0);
  CHECK(r.out.find("a = 6.0027173913043") != std::string::npos);
  CHECK(run({"params", "--n", "9", "--b", "0.9"}).code == 2);
  const Run both = run({"params", "--n", "9", "--b", "0.022222"});
  CHECK(both.code == 0);
  CHECK(both.out.find("gamma_factor = on") != std::string::npos);
  CHECK(both.out.find("gamma_factor = off") != std::string::npos);
  CHECK(run({"params", "--n", "9"}).code == 2);
}

TEST_CASE("verify exit codes and report") {
  const Run ok = run({"verify", "--n", "9", "--samples", "2"});
  CHECK(ok.code == 0);
  CHECK(count_prefix(ok.out, "id=") >= 20);
  CHECK(count_prefix(ok.out, "# records=") == 1);
  CHECK(ok.err.find("wall_time") != std::string::npos);

  CHECK(run({"verify", "--n", "9", "--samples", "2", "--rho-threshold", "1.0"}).code == 1);
  CHECK(run({"verify", "--n", ""}).code == 2);
  CHECK(run({"verify", "--n", "8"}).code == 2);
  CHECK(run({"verify", "--gamma-factor", "sometimes"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
}

TEST_CASE("config file, flags and seed precedence") {
  const fs::path cfg = temp_file("cfg", "n = 9\nsamples = 2\nrho-threshold = 1.0\nseed = 11\n");
  const Run forced = run({"verify", "--config", cfg.string()});
  CHECK(forced.code == 1);
  CHECK(forced.out.find("# seed=11 ") != std::string::npos);
  const Run flag_wins = run({"verify", "--config", cfg.string(), "--rho-threshold", "0.4", "--seed", "5"});
  CHECK(flag_wins.code == 0);
  CHECK(flag_wins.out.find("# seed=5 ") != std::string::npos);
  CHECK(run({"verify", "--config", "/nonexistent/pinch.cfg"}).code == 2);
}

TEST_CASE("verify reports are byte-identical") {
  const fs::path a = fs::temp_directory_path() / "pinch_test_report_a";
  const fs::path b = fs::temp_directory_path() / "pinch_test_report_b";
  CHECK(run({"verify", "--n", "10", "--samples", "2", "--workers", "1", "--out", a.string()}).code == 0);
  CHECK(run({"verify", "--n", "10", "--samples", "2", "--workers", "3", "--out", b.string()}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(!slurp(a).empty());
}

TEST_CASE("sweep") {
  const Run r = run({"sweep", "--n", "9", "--beta-grid", "20"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> families;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string beta, fam;
    ls >> beta >> fam;
    families.push_back(fam);
  }
  REQUIRE(families.size() == 20);
  // One switch from the first to the second family.
  int switches = 0;
  for (std::size_t i = 1; i < families.size(); ++i) switches += families[i] != families[i - 1];
  CHECK(switches == 1);
  CHECK(families.front() == "first");
  CHECK(families.back() == "second");
  const Run one = run({"sweep", "--n", "9", "--beta-grid", "0.03"});
  CHECK(count_prefix(one.out, "0.0") == 1);
}

TEST_CASE("evolve, member, trajectory and model") {
  const fs::path round = fs::temp_directory_path() / "pinch_test_round";
  const fs::path zero = fs::temp_directory_path() / "pinch_test_zero";
  const fs::path cyl = fs::temp_directory_path() / "pinch_test_cyl";
  CHECK(run({"model", "--n", "9", "--kind", "round", "--out", round.string()}).code == 0);
  CHECK(run({"model", "--n", "9", "--kind", "zero", "--out", zero.string()}).code == 0);
  CHECK(run({"model", "--n", "9", "--kind", "cylinder", "--out", cyl.string()}).code == 0);
  CHECK(run({"model", "--n", "9", "--kind", "torus"}).code == 2);

  const fs::path dump = fs::temp_directory_path() / "pinch_test_dump";
  const Run ev = run({"evolve", "--in", round.string(), "--dt", "1e-4", "--steps", "20",
                      "--record-every", "5", "--epsilon", "1e-4", "--out", dump.string()});
  CHECK(ev.code == 0);
  std::ifstream in(dump);
  const auto pts = read_trajectory(in);
  REQUIRE(pts.size() == 5);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].scal > pts[i - 1].scal);
  for (const auto& p : pts) {
    for (double m : p.margin) CHECK(m >= -1e-8 * p.scal);
  }
  const Run tr = run({"trajectory", "--in", dump.string()});
  CHECK(tr.code == 0);
  CHECK(count_prefix(tr.out, "#") == 1);

  const Run z = run({"evolve", "--in", zero.string(), "--dt", "0.1", "--steps", "3", "--epsilon", "0"});
  CHECK(z.code == 0);
  CHECK(z.out.find("scal=0.0000000000000000e+00 m1=0.0000000000000000e+00") != std::string::npos);

  const Run blow = run({"evolve", "--in", round.string(), "--dt", "0.01", "--steps", "100",
                        "--epsilon", "0"});
  CHECK(blow.code == 0);
  CHECK(blow.out.find("truncated=1") != std::string::npos);

  const fs::path bad = temp_file("bad", "curvature n=9 bianchi=1\n1 2 3\n");
  CHECK(run({"evolve", "--in", bad.string()}).code == 2);
  CHECK(run({"evolve"}).code == 2);

  CHECK(run({"member", "--in", cyl.string(), "--mode", "PIC2"}).code == 0);
  CHECK(run({"member", "--in", cyl.string(), "--mode", "PIC"}).out.find("min=1.99999") !=
        std::string::npos);
  const fs::path neg = temp_file("neg", "curvature n=4 bianchi=1\n1 2 1 2 -1\n");
  CHECK(run({"member", "--in", neg.string(), "--mode", "PIC"}).code == 1);
  CHECK(run({"member", "--in", cyl.string(), "--mode", "PIC3"}).code == 2);
}
