#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "pinch/bohm_wilking.hpp"
#include "pinch/io.hpp"
#include "pinch/parallel.hpp"
#include "pinch/pinching.hpp"
#include "pinch/samples.hpp"
#include "pinch/transversality.hpp"
#include "pinch/verifier.hpp"

namespace pinch::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

int parse_int(const std::string& s, const char* what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw UsageError(std::string("bad ") + what + ": '" + s + "'");
  }
  if (used != s.size()) throw UsageError(std::string("bad ") + what + ": '" + s + "'");
  return v;
}

double parse_real(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError(std::string("bad ") + what + ": '" + s + "'");
  }
  if (used != s.size()) throw UsageError(std::string("bad ") + what + ": '" + s + "'");
  return v;
}

void require_ns(const RunConfig& cfg, int lo, int hi) {
  if (cfg.ns.empty()) throw UsageError("empty dimension list");
  for (int n : cfg.ns) {
    if (n < lo || n > hi) {
      throw UsageError("dimension " + std::to_string(n) + " outside " + std::to_string(lo) +
                       ".." + std::to_string(hi));
    }
  }
}

void require_positive(int v, const char* what) {
  if (v < 1) throw UsageError(std::string(what) + " must be >= 1");
}

// Opens --out, or returns `fallback` for "-".
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path != "-" && !path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot write '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

CurvatureTensor load_tensor(const std::string& path) {
  if (path.empty()) throw UsageError("--in is required");
  try {
    return read_tensor_file(path);
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

OptimizerBudget budget_for(const RunConfig& cfg, int starts, int iterations) {
  OptimizerBudget b;
  b.starts = starts;
  b.iterations = iterations;
  b.seed = cfg.seed;
  b.workers = cfg.workers;
  return b;
}

std::vector<bool> gamma_variants(GammaFactor g) {
  switch (g) {
    case GammaFactor::on: return {true};
    case GammaFactor::off: return {false};
    case GammaFactor::both: return {false, true};
  }
  return {true};
}

}  // namespace

std::vector<int> parse_n_list(const std::string& text) {
  const std::string s = trim(text);
  std::vector<int> out;
  if (s.empty()) return out;
  if (const auto dots = s.find(".."); dots != std::string::npos) {
    const int lo = parse_int(trim(s.substr(0, dots)), "dimension range");
    const int hi = parse_int(trim(s.substr(dots + 2)), "dimension range");
    if (hi < lo) throw UsageError("empty dimension range '" + s + "'");
    for (int n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int(trim(item), "dimension"));
  return out;
}

std::vector<double> parse_beta_grid(const std::string& spec, int n) {
  const std::string s = trim(spec);
  const double len = glue_length(n);
  std::vector<double> out;
  if (s.find_first_of(".,eE") == std::string::npos) {
    const int count = parse_int(s, "beta grid");
    require_positive(count, "beta grid");
    for (int i = 1; i <= count; ++i) out.push_back(len * i / (count + 1));
    return out;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const double beta = parse_real(trim(item), "beta");
    if (!(beta > 0) || !(beta < len)) {
      throw UsageError("beta " + trim(item) + " outside (0, " + fmt("%.17g", len) + ")");
    }
    out.push_back(beta);
  }
  if (out.empty()) throw UsageError("empty beta grid");
  return out;
}

GammaFactor parse_gamma_factor(const std::string& s) {
  if (s == "on") return GammaFactor::on;
  if (s == "off") return GammaFactor::off;
  if (s == "both") return GammaFactor::both;
  throw UsageError("gamma-factor must be on, off or both");
}

// params ---------------------------------------------------------------------

int cmd_params(const RunConfig& cfg, std::ostream& out) {
  require_ns(cfg, 5, kMaxDimension);
  if (!cfg.b) throw UsageError("params needs --b");
  const double b = *cfg.b;
  for (std::size_t k = 0; k < cfg.ns.size(); ++k) {
    const int n = cfg.ns[k];
    const bool first = b > 0 && b <= first_b_max(n);
    const bool second = b > 0 && b <= second_b_max(n);
    if (!first && !second) {
      throw UsageError("b = " + fmt("%.17g", b) + " outside (0, " +
                       fmt("%.17g", std::max(first_b_max(n), second_b_max(n))) + "] for n = " +
                       std::to_string(n));
    }
    if (k > 0) out << "\n";
    if (first) out << parameter_report(first_cone_params(n, b));
    if (second) {
      for (bool g : {false, true}) {
        if (first || g) out << "\n";
        out << parameter_report(second_cone_params(n, b, g));
      }
    }
  }
  return 0;
}

// verify ---------------------------------------------------------------------

std::vector<CheckRecord> verify_records(const RunConfig& cfg) {
  require_ns(cfg, 9, 11);
  require_positive(cfg.samples, "--samples");
  std::vector<CheckRecord> rs;
  auto add = [&rs](std::vector<CheckRecord> more) {
    rs.insert(rs.end(), more.begin(), more.end());
  };
  const OptimizerBudget budget = budget_for(cfg, 16, 120);
  for (int n : cfg.ns) {
    add(verify_monotonicity(n, 10000));
    rs.push_back(verify_rho_slope(n, 10000, cfg.rho_threshold));
    add(verify_lemma34(n, 10000));
    add(verify_d_interior(n, 2000));
    add(verify_ric0_gap(n, 1000 * cfg.samples, cfg.seed));
    add(verify_lemma42(n));
    for (bool g : gamma_variants(cfg.gamma_factor)) {
      // The two polynomial bounds do not depend on the toggle; keep one copy.
      for (auto& r : verify_lemma44(n, g)) {
        if (g && cfg.gamma_factor == GammaFactor::both && r.id.rfind("second_poly", 0) == 0) continue;
        rs.push_back(std::move(r));
      }
    }

    for (double b : {first_b_max(n) / 2, first_b_max(n)}) {
      const auto p = first_cone_params(n, b);
      rs.push_back(check_cond3_identity(p));
      rs.push_back(sweep_cond3_derivative(p, cfg.samples, cfg.seed, cfg.workers));
      const EpsilonEstimate eps = estimate_epsilon(p, 4, cfg.seed, budget);
      rs.push_back(sweep_cond4_derivative(p, cfg.samples, cfg.seed, eps.epsilon, cfg.workers));
    }
    rs.push_back(sweep_sharp_tangent(n, std::max(cfg.samples / 4, 1), cfg.seed, budget));
    for (bool g : gamma_variants(cfg.gamma_factor)) {
      const auto p2 = second_cone_params(n, second_b_max(n), g);
      rs.push_back(verify_lemmaA1_sampled(n, p2.zeta, p2.b / p2.a, 100 * cfg.samples, cfg.seed));
      rs.back().id += g ? "_on" : "_off";
      auto dz = check_secondcone_dZ(p2, std::max(cfg.samples / 4, 1), cfg.seed, budget);
      for (auto& r : dz) r.id += g ? "_on" : "_off";
      add(dz);
    }
    rs.push_back(check_glue_membership(n, std::max(cfg.samples / 4, 1), cfg.seed, budget));
  }
  return rs;
}

int cmd_verify(const RunConfig& cfg, std::ostream& report, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<CheckRecord> rs = verify_records(cfg);
  Output out(cfg.out, report);
  for (const auto& r : rs) *out << r.line() << "\n";
  const RecordSummary s = summarize(rs);
  *out << "# records=" << s.total << " passed=" << s.passed << " failed=" << s.failed
       << " skipped=" << s.skipped << "\n";
  *out << "# min_margin=" << fmt("%.16e", s.min_margin) << " id=" << s.min_margin_id << "\n";
  *out << "# seed=" << cfg.seed << " samples=" << cfg.samples << "\n";
  for (const auto& r : rs) {
    if (!r.skipped && !r.pass) *out << "# FAILED " << r.id << " n=" << r.n << "\n";
  }
  *out << std::flush;
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << "# wall_time_s=" << fmt("%.3f", wall) << "\n";
  return s.failed == 0 ? 0 : 1;
}

// sweep ----------------------------------------------------------------------

namespace {

struct SweepRow {
  double beta = 0;
  GluePoint at{Family::first, 0};
  double a = 0;
  std::array<double, 3> gaps{kNaN, kNaN, kNaN};
  double zeta_off = kNaN, zeta_on = kNaN;
  double zmin_probe = kNaN;
  double pic1_shift = kNaN;
};

// Smallest eps >= 0 with R + eps scal(R) id^id weakly PIC1.
double pic1_shift(const CurvatureTensor& r, const OptimizerBudget& budget) {
  const CurvatureTensor round = round_tensor(r.dim());
  const IsotropicFunctional g(round, ConeMode::PIC1);
  auto family = [&](double c) { return IsotropicFunctional(r + c * round, ConeMode::PIC1); };
  auto slope = [&](const IsotropicProbe& p) { return g.value(p); };
  const ShiftResult sr = boundary_shift(family, slope, 0.0, budget, 1e-12 * r.norm());
  if (!sr.converged) return kNaN;
  return std::max(sr.shift, 0.0) / scalar(r);
}

SweepRow sweep_row(int n, double beta, bool gamma_on, const OptimizerBudget& budget) {
  SweepRow row;
  row.beta = beta;
  row.at = glue_family(n, beta);
  const double b = row.at.local_b;
  const CurvatureTensor cyl = cylinder_tensor(n);
  const CurvatureTensor round = round_tensor(n);
  if (row.at.family == Family::first) {
    const auto p = first_cone_params(n, b);
    row.a = p.a;
    row.gaps = first_family_gaps(n, b);
    // Neck probe: the cylinder moved along id^id onto condition 3.
    const CurvatureTensor s = cyl + cond3_activation_shift(cyl, p.gamma) * round;
    row.pic1_shift = pic1_shift(l_ab(s, p.lab()), budget);
  } else {
    const auto p = second_cone_params(n, b, gamma_on);
    row.a = p.a;
    row.zeta_off = second_cone_params(n, b, false).zeta;
    row.zeta_on = second_cone_params(n, b, true).zeta;
    const CurvatureTensor pulled = l_ab_inverse(cyl, p.lab());
    row.zmin_probe = second_cone_z_min(pulled, p, budget).min_value / scalar(pulled);
    // Neck probe: the cylinder moved along id^id onto min Z = 0.
    const IsotropicFunctional z_round = second_cone_functional(round, p);
    auto family = [&](double c) { return second_cone_functional(cyl + c * round, p); };
    auto slope = [&](const IsotropicProbe& pr) { return z_round.value(pr); };
    const ShiftResult sr = boundary_shift(family, slope, 0.0, budget, 1e-12 * cyl.norm());
    if (sr.converged) row.pic1_shift = pic1_shift(l_ab(cyl + sr.shift * round, p.lab()), budget);
  }
  return row;
}

}  // namespace

int cmd_sweep(const RunConfig& cfg, std::ostream& report) {
  require_ns(cfg, 9, 11);
  Output out(cfg.out, report);
  const bool gamma_on = cfg.gamma_factor != GammaFactor::off;
  OptimizerBudget budget = budget_for(cfg, 16, 120);
  budget.workers = 1;
  *out << "# beta family local_b a gap_k gap_k2 gap_kp zeta_off zeta_on zmin_probe pic1_shift\n";
  for (int n : cfg.ns) {
    const std::vector<double> betas = parse_beta_grid(cfg.beta_grid, n);
    const auto rows = parallel_map<SweepRow>(betas.size(), cfg.workers, [&](std::size_t i) {
      return sweep_row(n, betas[i], gamma_on, budget);
    });
    *out << "# n=" << n << " B=" << fmt("%.17g", glue_length(n))
         << " gamma_factor=" << (gamma_on ? "on" : "off") << " rows=" << rows.size() << "\n";
    for (const SweepRow& r : rows) {
      *out << fmt("%.17g", r.beta) << " " << to_string(r.at.family) << " "
           << fmt("%.17g", r.at.local_b) << " " << fmt("%.17g", r.a);
      for (double g : r.gaps) *out << " " << fmt("%.10e", g);
      for (double v : {r.zeta_off, r.zeta_on, r.zmin_probe, r.pic1_shift}) {
        *out << " " << fmt("%.10e", v);
      }
      *out << "\n";
    }
  }
  return 0;
}

// evolve ---------------------------------------------------------------------

int cmd_evolve(const RunConfig& cfg, std::ostream& report, std::ostream& log) {
  const CurvatureTensor s = load_tensor(cfg.input);
  const int n = s.dim();
  const CurvatureTensor t =
      cfg.cert.empty() ? CurvatureTensor::zero(n, false) : load_tensor(cfg.cert);
  if (t.dim() != n) throw UsageError("--cert dimension differs from --in");
  if (!(cfg.dt > 0)) throw UsageError("--dt must be > 0");
  require_positive(cfg.steps, "--steps");
  if (n < 5) throw UsageError("evolve needs n >= 5");
  const double b = cfg.b.value_or(first_b_max(n));
  if (!(b > 0) || b > first_b_max(n)) throw UsageError("--b outside (0, b_max]");
  const FirstConeParams p = first_cone_params(n, b);
  double eps = 0;
  if (cfg.epsilon) {
    eps = *cfg.epsilon;
    if (!(eps >= 0)) throw UsageError("--epsilon must be >= 0");
  } else {
    eps = estimate_epsilon(p, std::max(cfg.samples / 5, 2), cfg.seed,
                           budget_for(cfg, 16, 120)).epsilon;
  }
  IntegrateOptions opts;
  opts.record_every = std::max(cfg.record_every, 1);
  const Trajectory tr = ode_integrate(EvolutionState(s, t, p.lab(), eps, p), cfg.dt, cfg.steps, opts);

  Output out(cfg.out, report);
  *out << "# n=" << n << " b=" << fmt("%.17g", b) << " epsilon=" << fmt("%.6e", eps)
       << " dt=" << fmt("%.6e", cfg.dt) << " steps=" << cfg.steps << "\n";
  for (const auto& pt : tr.points) *out << trajectory_line(pt) << "\n";
  const TrajectoryPoint& last = tr.points.back();
  std::ostream& summary = out.to_file() ? log : *out;
  summary << "# steps_taken=" << tr.steps_taken << " truncated=" << (tr.truncated ? 1 : 0)
          << "\n# final " << trajectory_line(last) << "\n";
  return 0;
}

// member ---------------------------------------------------------------------

int cmd_member(const RunConfig& cfg, std::ostream& out) {
  const CurvatureTensor r = load_tensor(cfg.input);
  const OptimizerBudget budget = budget_for(cfg, 64, 200);
  MembershipReport rep;
  std::string what;
  if (cfg.mode == "second") {
    const int n = r.dim();
    const double b = cfg.b.value_or(second_b_max(n));
    if (n < 5 || !(b > 0) || b > second_b_max(n)) throw UsageError("--b outside (0, b~_max]");
    const auto p = second_cone_params(n, b, cfg.gamma_factor != GammaFactor::off);
    rep = second_cone_z_min(l_ab_inverse(r, p.lab()), p, budget);
    what = "second b=" + fmt("%.17g", b);
  } else {
    ConeMode mode;
    try {
      mode = parse_cone_mode(cfg.mode);
    } catch (const std::exception&) {
      throw UsageError("--mode must be PIC, PIC1, PIC2 or second");
    }
    rep = min_isotropic(r, mode, budget);
    what = std::string(to_string(mode));
  }
  const bool member = rep.min_value >= -cfg.tol;
  const IsotropicProbe& pr = rep.argmin_probe;
  out << "mode=" << what << " min=" << fmt("%.16e", rep.min_value)
      << " lambda=" << fmt("%.16e", pr.lambda) << " mu=" << fmt("%.16e", pr.mu)
      << " tol=" << fmt("%.3e", cfg.tol) << " member=" << (member ? 1 : 0) << "\n";
  return member ? 0 : 1;
}

// trajectory -----------------------------------------------------------------

int cmd_trajectory(const RunConfig& cfg, std::ostream& report) {
  if (cfg.input.empty()) throw UsageError("--in is required");
  std::ifstream in(cfg.input);
  if (!in) throw UsageError("cannot open '" + cfg.input + "'");
  std::vector<TrajectoryPoint> pts;
  try {
    pts = read_trajectory(in);
  } catch (const ParseError& e) {
    throw UsageError(cfg.input + ": " + e.what());
  }
  Output out(cfg.out, report);
  *out << "# t scal m1 m2 m3 m4 norm\n";
  for (const auto& p : pts) {
    *out << fmt("%.10e", p.t) << " " << fmt("%.10e", p.scal);
    for (double m : p.margin) *out << " " << fmt("%.10e", m);
    *out << " " << fmt("%.10e", p.norm) << "\n";
  }
  return 0;
}

// model ----------------------------------------------------------------------

int cmd_model(const RunConfig& cfg, std::ostream& report) {
  if (cfg.ns.size() != 1) throw UsageError("model needs exactly one --n");
  require_ns(cfg, 2, kMaxDimension);
  const int n = cfg.ns[0];
  CurvatureTensor r;
  if (cfg.kind == "round") {
    r = round_tensor(n);
  } else if (cfg.kind == "cylinder") {
    if (n < 3) throw UsageError("cylinder needs n >= 3");
    r = cylinder_tensor(n);
  } else if (cfg.kind == "zero") {
    r = CurvatureTensor::zero(n);
  } else {
    throw UsageError("--kind must be round, cylinder or zero");
  }
  Output out(cfg.out, report);
  write_tensor(*out, r);
  return 0;
}

// command line ---------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for the PIC pinching families"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file mirroring the flags; flags win");

  std::string n_list = "9,10,11", gamma = "both";
  RunConfig cfg;
  double b = 0, eps = 0;
  std::uint64_t seed = kDefaultSeed;
  if (const char* env = std::getenv("PINCH_SEED")) {
    try {
      std::size_t used = 0;
      seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      err << "error: PINCH_SEED is not an unsigned integer\n";
      return 2;
    }
  }
  app.add_option("--n", n_list, "dimensions: 9,10,11 or 9..11");
  auto* b_opt = app.add_option("--b", b, "pinching parameter");
  app.add_option("--beta-grid", cfg.beta_grid, "count or comma-separated betas");
  app.add_option("--samples", cfg.samples, "samples per sampled check");
  app.add_option("--seed", seed, "seed (default PINCH_SEED or a fixed constant)");
  app.add_option("--tol", cfg.tol, "membership tolerance");
  app.add_option("--gamma-factor", gamma, "on, off or both");
  app.add_option("--out", cfg.out, "output path, - for stdout");
  app.add_option("--workers", cfg.workers, "worker threads");
  app.add_option("--rho-threshold", cfg.rho_threshold, "slope threshold for rho");
  app.add_option("--in", cfg.input, "input tensor or trajectory file");
  app.add_option("--cert", cfg.cert, "initial T for evolve (default zero)");
  app.add_option("--dt", cfg.dt, "time step");
  app.add_option("--steps", cfg.steps, "number of steps");
  app.add_option("--record-every", cfg.record_every, "trajectory stride");
  auto* eps_opt = app.add_option("--epsilon", eps, "epsilon of the T flow (default estimated)");
  app.add_option("--mode", cfg.mode, "PIC, PIC1, PIC2 or second");
  app.add_option("--kind", cfg.kind, "model tensor: round, cylinder or zero");

  auto* params = app.add_subcommand("params", "print the derived parameters");
  auto* verify = app.add_subcommand("verify", "run every check suite");
  auto* sweep = app.add_subcommand("sweep", "per-beta data over the glued family");
  auto* evolve = app.add_subcommand("evolve", "integrate the reaction ODE from a tensor file");
  auto* member = app.add_subcommand("member", "cone membership of a tensor file");
  auto* traj = app.add_subcommand("trajectory", "columns from a trajectory dump");
  auto* model = app.add_subcommand("model", "write a model tensor file");
  for (auto* sub : {params, verify, sweep, evolve, member, traj, model}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    cfg.ns = parse_n_list(n_list);
    cfg.gamma_factor = parse_gamma_factor(gamma);
    cfg.seed = seed;
    if (b_opt->count() > 0) cfg.b = b;
    if (eps_opt->count() > 0) cfg.epsilon = eps;
    if (cfg.workers < 1) throw UsageError("--workers must be >= 1");
    if (!(cfg.tol >= 0)) throw UsageError("--tol must be >= 0");
    if (params->parsed()) return cmd_params(cfg, out);
    if (verify->parsed()) return cmd_verify(cfg, out, cfg.out.empty() || cfg.out == "-" ? err : out);
    if (sweep->parsed()) return cmd_sweep(cfg, out);
    if (evolve->parsed()) return cmd_evolve(cfg, out, err);
    if (member->parsed()) return cmd_member(cfg, out);
    if (traj->parsed()) return cmd_trajectory(cfg, out);
    if (model->parsed()) return cmd_model(cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace pinch::cli
