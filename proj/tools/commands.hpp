#pragma once
// Subcommands of the `pinch` front end. Each returns the process exit status:
// 0 success, 1 a check failed (or a tensor is outside the queried cone),
// 2 usage or input error.

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinch/check_record.hpp"
#include "pinch/membership.hpp"

namespace pinch::cli {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class GammaFactor { on, off, both };

struct RunConfig {
  std::vector<int> ns{9, 10, 11};
  std::optional<double> b;
  // "<count>" for count equally spaced interior points of (0, B), or an
  // explicit comma-separated list of betas.
  std::string beta_grid = "200";
  int samples = 20;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-8;
  GammaFactor gamma_factor = GammaFactor::both;
  std::string out = "-";
  int workers = 1;
  double rho_threshold = 4.0 / 9.0;

  // evolve / member / trajectory
  std::string input;
  std::string cert;  // optional T for evolve; zero when empty
  double dt = 1e-4;
  int steps = 100;
  int record_every = 1;
  std::optional<double> epsilon;
  std::string mode = "PIC";
  std::string kind = "round";  // model: round, cylinder or zero
};

// Parses "9,10,11", "9..11" or "" (empty list). Throws UsageError.
std::vector<int> parse_n_list(const std::string& s);
std::vector<double> parse_beta_grid(const std::string& spec, int n);
GammaFactor parse_gamma_factor(const std::string& s);

int cmd_params(const RunConfig& cfg, std::ostream& out);
// Records of every suite in cfg, in a fixed order.
std::vector<CheckRecord> verify_records(const RunConfig& cfg);
// Records plus `#` summary lines; the wall time goes to `log` so reports stay
// byte-identical across runs.
int cmd_verify(const RunConfig& cfg, std::ostream& report, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_evolve(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_member(const RunConfig& cfg, std::ostream& out);
int cmd_trajectory(const RunConfig& cfg, std::ostream& out);
// Writes a model tensor file (one dimension from --n).
int cmd_model(const RunConfig& cfg, std::ostream& out);

// Full command line handling, including config file and PINCH_SEED.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pinch::cli
