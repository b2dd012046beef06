#include "thetaforge/error.hpp"
#include "thetaforge/extensions.hpp"
#include "thetaforge/lattice.hpp"
#include "thetaforge/lattice_io.hpp"
#include "thetaforge/profile.hpp"
#include "thetaforge/prolim.hpp"
#include "thetaforge/siegel.hpp"
#include "thetaforge/theta.hpp"
#include "thetaforge/thermo.hpp"
#include "thetaforge/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace tf = thetaforge;
using nlohmann::json;

namespace {

constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;

// Bad files and malformed flag values.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  int points = 1;
  double at(int i) const { return points == 1 ? lo : lo + (hi - lo) * i / (points - 1); }
};

double parse_double(const std::string& text, const std::string& flag) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw InputError(flag + ": cannot parse '" + text + "' as a number");
  }
  return v;
}

// "a:b:k" is k evenly spaced points from a to b inclusive.
Grid parse_grid(const std::string& text, const std::string& flag) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
  if (second == std::string::npos) throw InputError(flag + ": expected a:b:k, got '" + text + "'");
  Grid g{parse_double(text.substr(0, first), flag), parse_double(text.substr(first + 1, second - first - 1), flag), 0};
  const std::string count = text.substr(second + 1);
  const auto res = std::from_chars(count.data(), count.data() + count.size(), g.points);
  if (res.ec != std::errc() || res.ptr != count.data() + count.size() || g.points < 1) {
    throw InputError(flag + ": point count must be a positive integer, got '" + count + "'");
  }
  if (g.points > 1 && !(g.hi > g.lo)) throw InputError(flag + ": need a < b when k > 1");
  return g;
}

template <class F>
auto load(F&& reader) -> decltype(reader()) {
  try {
    return reader();
  } catch (const tf::Error& e) {
    throw InputError(e.what());
  }
}

tf::EuclideanLattice load_lattice(const std::string& path) {
  return load([&] { return tf::read_lattice_file(path); });
}

std::string csv_row(const std::vector<double>& values) {
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += tf::format_csv(values[i]);
  }
  return row;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json check_json(const tf::Check& c) {
  return {{"name", c.name}, {"passed", c.passed}, {"lhs", finite_or_null(c.lhs)},
          {"rhs", finite_or_null(c.rhs)}, {"witness", c.witness}};
}

json tail_json(const tf::KernelTail& t) {
  return {{"value", finite_or_null(t.value)}, {"slope", finite_or_null(t.slope)},
          {"summable", t.summable}, {"reason", t.reason}};
}

void emit(const json& doc) { std::cout << doc.dump(2) << '\n'; }

struct Settings {
  int threads = 0;
  double tol = tf::kDefaultThetaTolerance;
};

void apply_threads(const Settings& s) {
  int threads = s.threads;
  if (threads <= 0) {
    if (const char* env = std::getenv("THETA_FORGE_THREADS")) {
      const std::string text(env);
      const auto res = std::from_chars(text.data(), text.data() + text.size(), threads);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size() || threads < 1) {
        throw InputError("THETA_FORGE_THREADS must be a positive integer, got '" + text + "'");
      }
    }
  }
  if (threads > 0) omp_set_num_threads(threads);
}

void check_tolerance(double tol) {
  if (!(tol > 0.0 && tol < 0.5)) throw InputError("--tol must lie in (0, 0.5)");
}

int run_invariants(const std::string& path, const Settings& s) {
  const tf::EuclideanLattice l = load_lattice(path);
  const tf::ThetaResult h0 = tf::theta(l, 1.0, s.tol);
  const tf::ThetaResult h1 = tf::theta(tf::dual(l), 1.0, s.tol);
  const tf::PoissonResidual pr = tf::poisson_rr_check(l, s.tol);
  json doc{{"rank", l.rank()},
           {"deg", l.degree()},
           {"covol", l.covolume()},
           {"h0_theta", h0.log_value},
           {"h0_theta_rel_error", h0.rel_error},
           {"h1_theta", h1.log_value},
           {"h1_theta_rel_error", h1.rel_error},
           {"poisson_residual", pr.residual},
           {"poisson_error_bound", pr.error_bound}};
  if (l.rank() > 0) {
    const tf::FirstMinimum m = tf::first_minimum(l);
    doc["lambda1"] = m.lambda1;
    doc["nu"] = m.multiplicity;
  } else {
    doc["lambda1"] = nullptr;
    doc["nu"] = 0;
  }
  emit(doc);
  return 0;
}

int run_theta(const std::string& path, const std::optional<double>& t, const std::optional<std::string>& grid_text,
              bool csv, const Settings& s) {
  const tf::EuclideanLattice l = load_lattice(path);
  Grid grid{1.0, 1.0, 1};
  if (grid_text) grid = parse_grid(*grid_text, "--t-grid");
  else if (t) grid = Grid{*t, *t, 1};
  std::vector<tf::ThetaResult> rows;
  for (int i = 0; i < grid.points; ++i) {
    if (!(grid.at(i) > 0.0)) throw InputError("--t values must be positive");
    rows.push_back(tf::theta(l, grid.at(i), s.tol));
  }
  if (csv) {
    std::cout << "t,log_theta,rel_error\n";
    for (int i = 0; i < grid.points; ++i) {
      std::cout << csv_row({grid.at(i), rows[i].log_value, rows[i].rel_error}) << '\n';
    }
    return 0;
  }
  auto row_json = [&](int i) {
    return json{{"t", grid.at(i)}, {"log_theta", rows[i].log_value}, {"rel_error", rows[i].rel_error}};
  };
  if (grid.points == 1 && !grid_text) {
    emit(row_json(0));
  } else {
    json doc = json::array();
    for (int i = 0; i < grid.points; ++i) doc.push_back(row_json(i));
    emit(doc);
  }
  return 0;
}

int run_profile(const std::string& path, double r2, std::uint64_t cap) {
  const tf::EuclideanLattice l = load_lattice(path);
  if (!(r2 >= 0.0)) throw InputError("--r2 must be nonnegative");
  const tf::CountingProfile p = tf::counting_profile(l, r2, cap);
  std::cout << "t,N_E,h0_ar\n";
  for (std::size_t i = 0; i < p.thresholds.size(); ++i) {
    const double count = static_cast<double>(p.counts[i]);
    std::cout << tf::format_csv(p.thresholds[i]) << ',' << p.counts[i] << ',' << tf::format_csv(std::log(count))
              << '\n';
  }
  return 0;
}

int run_gext(const std::string& e_path, const std::string& g_path, const std::string& twist_text,
             const Settings& s) {
  const tf::EuclideanLattice e = load_lattice(e_path);
  const tf::EuclideanLattice g = load_lattice(g_path);
  const Eigen::MatrixXd twist =
      load([&] { return tf::matrix_from_json(tf::parse_json_text(twist_text, "--T"), "--T"); });
  if (twist.rows() != e.rank() || twist.cols() != g.rank()) {
    throw InputError("--T must be rank(E) x rank(G)");
  }
  const tf::ThetaResult direct = tf::gext(e, g, twist, s.tol);
  const tf::ThetaResult split = tf::gext(e, g, Eigen::MatrixXd::Zero(e.rank(), g.rank()), s.tol);
  emit({{"gext", direct.value},
        {"log_gext", direct.log_value},
        {"rel_error", direct.rel_error},
        {"gext_dual_series", tf::gext_dual_series(e, g, twist, s.tol)},
        {"log_ratio_to_split", direct.log_value - split.log_value}});
  return 0;
}

int run_gext_average(const std::optional<std::string>& e_path, const std::optional<std::string>& g_path, int grid,
                     const Settings& s) {
  const tf::EuclideanLattice e = e_path ? load_lattice(*e_path) : tf::identity_lattice(1);
  const tf::EuclideanLattice g = g_path ? load_lattice(*g_path) : tf::identity_lattice(1);
  if (grid < 1) throw InputError("--grid must be positive");
  const tf::GextAverage avg = tf::gext_average(e, g, grid, s.tol);
  emit({{"average", avg.average},
        {"target", avg.target},
        {"abs_error", std::abs(avg.average - avg.target)},
        {"grid_points", avg.grid_points}});
  return 0;
}

int run_legendre(const std::string& path, const std::string& grid_text, const Settings& s) {
  const tf::EuclideanLattice l = load_lattice(path);
  const Grid grid = parse_grid(grid_text, "--t-grid");
  const double h0 = tf::theta(l, 1.0, s.tol).log_value;
  std::cout << "t,htilde0_ar,beta_star,tail_bound,lower_h0_ar,upper_theta,bracket_width\n";
  for (int i = 0; i < grid.points; ++i) {
    const double t = grid.at(i);
    if (!(t > 0.0)) throw InputError("--t-grid values must be positive");
    const tf::EntropyResult r = tf::htilde0_ar(l, t, s.tol);
    const double lower = tf::h0_ar(l, t);
    const double upper = h0 + M_PI * t;
    std::cout << csv_row({t, r.value, r.beta, r.tail, lower, upper, upper - lower}) << '\n';
  }
  return 0;
}

int run_prolim(const std::string& path, std::optional<int> depth, std::optional<double> eps, bool atoms,
               const Settings& s) {
  tf::ProjectiveSystem sys = load([&] { return tf::projective_system_from_json(tf::read_json_file(path)); });
  if (depth) {
    if (*depth < 0 || *depth > sys.depth()) {
      throw InputError("--depth must lie in [0, " + std::to_string(sys.depth()) + "]");
    }
    sys = sys.truncated(*depth);
  }
  json doc{{"depth", sys.depth()}};
  const tf::SummabilityReport report = tf::summability_report(sys, eps.value_or(0.0), s.tol);
  doc["summability"] = {{"eps", report.eps},
                        {"kernel_h0", report.kernel_h0},
                        {"partial_sums", report.partial_sums},
                        {"tail", tail_json(report.tail)},
                        {"status", report.status}};
  int code = 0;
  try {
    const tf::LimitH0 lim = tf::limit_h0(sys, s.tol);
    doc["limit"] = {{"estimate", lim.estimate},
                    {"lower", lim.lower},
                    {"upper", lim.upper},
                    {"lower_level", lim.lower_level},
                    {"level_h0", lim.level_h0},
                    {"kernel_h0", lim.kernel_h0},
                    {"level_values", lim.level_values},
                    {"monotone", lim.monotone},
                    {"subadditive", lim.subadditive},
                    {"tail", tail_json(lim.tail)}};
    if (!lim.monotone || !lim.subadditive) code = kExitViolation;
    if (atoms) {
      const tf::LimitMeasureReport m = tf::limit_measure_truncation(sys, sys.depth(), 1e-6, s.tol);
      json list = json::array();
      for (const auto& a : m.atoms) {
        list.push_back({{"level", a.level},
                        {"atom", std::vector<std::int64_t>(a.atom.data(), a.atom.data() + a.atom.size())},
                        {"gamma", a.gamma},
                        {"pushforward", a.pushforward},
                        {"lower", a.lower},
                        {"log_upper", a.log_upper},
                        {"log_width", a.log_width},
                        {"in_bracket", a.in_bracket}});
      }
      json domination = json::array();
      for (const auto& c : m.domination) domination.push_back(check_json(c));
      doc["measure"] = {{"atoms", list}, {"domination", domination}, {"passed", m.passed()}};
      if (!m.passed()) code = kExitViolation;
    }
  } catch (const tf::Error& e) {
    if (e.kind() != tf::ErrorKind::NotSummableAtDepth && e.kind() != tf::ErrorKind::InconsistentBounds) throw;
    doc["limit"] = nullptr;
    doc["error"] = {{"kind", tf::to_string(e.kind())}, {"message", e.what()}};
    code = kExitViolation;
  }
  emit(doc);
  return code;
}

int run_hardy(double radius, const std::string& grid_text, bool csv) {
  const Grid grid = parse_grid(grid_text, "--delta");
  if (!(radius > 0.0)) throw InputError("--R must be positive");
  std::vector<double> values;
  for (int i = 0; i < grid.points; ++i) values.push_back(tf::hardy_invariant(radius, grid.at(i)));
  if (csv) {
    std::cout << "delta,h\n";
    for (int i = 0; i < grid.points; ++i) std::cout << csv_row({grid.at(i), values[i]}) << '\n';
    return 0;
  }
  json doc = json::array();
  for (int i = 0; i < grid.points; ++i) doc.push_back({{"delta", grid.at(i)}, {"h", finite_or_null(values[i])}});
  emit(doc);
  return 0;
}

json estimate_json(const tf::SiegelEstimate& e) {
  return {{"estimate", e.estimate}, {"target", e.target},   {"rel_error", e.relative_error()},
          {"mean", e.mean},         {"spread", e.spread},   {"redraws", e.redraws},
          {"block_means", e.block_means}};
}

int run_siegel(double delta, double t, std::uint64_t samples, std::uint64_t seed, int blocks) {
  if (samples < 1000) throw InputError("--samples must be at least 1000");
  if (!(t > 0.0)) throw InputError("--t must be positive");
  if (blocks < 1 || static_cast<std::uint64_t>(blocks) > samples) throw InputError("--blocks must lie in [1, samples]");
  const tf::SiegelEstimate gauss = tf::siegel_average_h0theta(delta, samples, seed, blocks);
  const tf::SiegelEstimate count = tf::siegel_average_count(delta, t, samples, seed, blocks);
  json count_doc = estimate_json(count);
  count_doc["minkowski_fraction"] = count.minkowski_fraction;
  count_doc["comparison_above"] = count.comparison_above;
  count_doc["comparison_below"] = count.comparison_below;
  emit({{"delta", delta},
        {"t", t},
        {"samples", samples},
        {"seed", seed},
        {"blocks", blocks},
        {"theta_average", estimate_json(gauss)},
        {"count_average", count_doc}});
  return 0;
}

int run_verify(const std::string& suite, int trials, std::uint64_t seed) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = tf::suite_names();
  } else {
    bool known = false;
    for (const auto& n : tf::suite_names()) known = known || n == suite;
    if (!known) throw InputError("--suite: unknown suite '" + suite + "'");
    names = {suite};
  }
  if (trials < 1) throw InputError("--trials must be positive");
  int code = 0;
  for (const auto& name : names) {
    const tf::SuiteResult r = tf::run_suite(name, {trials, seed});
    std::size_t failures = 0;
    for (const auto& c : r.checks) failures += c.passed ? 0 : 1;
    std::cout << name << ": " << r.checks.size() << " checks, " << failures << " violations\n";
    if (const tf::Check* c = r.first_failure()) {
      std::cout << "  witness: " << check_json(*c).dump() << '\n';
      code = kExitViolation;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"theta_forge: theta invariants, counting profiles and limits of euclidean lattices"};
  app.require_subcommand(1);
  Settings settings;
  app.add_option("--threads", settings.threads, "worker threads (default: THETA_FORGE_THREADS, else all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol", settings.tol, "relative tolerance of theta sums")->capture_default_str();

  std::string lattice_path;
  std::function<int()> action;

  auto* invariants = app.add_subcommand("invariants", "degree, covolume, theta invariants, first minimum");
  invariants->add_option("--lattice", lattice_path, "lattice JSON file")->required();
  invariants->callback([&] { action = [&] { return run_invariants(lattice_path, settings); }; });

  std::optional<double> theta_t;
  std::optional<std::string> theta_grid;
  bool theta_csv = false;
  auto* theta = app.add_subcommand("theta", "log theta(t) with certified relative error");
  theta->add_option("--lattice", lattice_path, "lattice JSON file")->required();
  auto* t_opt = theta->add_option("--t", theta_t, "scale t (default 1)");
  theta->add_option("--t-grid", theta_grid, "grid a:b:k")->excludes(t_opt);
  theta->add_flag("--csv", theta_csv, "emit CSV");
  theta->callback([&] { action = [&] { return run_theta(lattice_path, theta_t, theta_grid, theta_csv, settings); }; });

  double profile_r2 = 4.0;
  std::uint64_t profile_cap = tf::kDefaultCountCap;
  auto* profile = app.add_subcommand("profile", "CSV counting profile (t, N_E(t), h0_Ar)");
  profile->add_option("--lattice", lattice_path, "lattice JSON file")->required();
  profile->add_option("--r2", profile_r2, "largest squared norm")->capture_default_str();
  profile->add_option("--cap", profile_cap, "point count cap")->capture_default_str();
  profile->callback([&] { action = [&] { return run_profile(lattice_path, profile_r2, profile_cap); }; });

  std::string e_path;
  std::string g_path;
  std::string twist_text;
  auto* gext = app.add_subcommand("gext", "Gaussian sum of the twisted extension");
  gext->add_option("--E", e_path, "sub lattice JSON file")->required();
  gext->add_option("--G", g_path, "quotient lattice JSON file")->required();
  gext->add_option("--T", twist_text, "twist matrix as JSON rows, rank(E) x rank(G)")->required();
  gext->callback([&] { action = [&] { return run_gext(e_path, g_path, twist_text, settings); }; });

  std::optional<std::string> avg_e;
  std::optional<std::string> avg_g;
  int avg_grid = 256;
  auto* gext_avg = app.add_subcommand("gext-average", "torus average of Gext(T)/Gext(0) against its closed form");
  gext_avg->add_option("--E", avg_e, "sub lattice JSON file (default Z)");
  gext_avg->add_option("--G", avg_g, "quotient lattice JSON file (default Z)");
  gext_avg->add_option("--grid", avg_grid, "points per torus direction")->capture_default_str();
  gext_avg->callback([&] { action = [&] { return run_gext_average(avg_e, avg_g, avg_grid, settings); }; });

  std::string legendre_grid;
  auto* legendre = app.add_subcommand("legendre", "CSV of the asymptotic counting invariant over a t grid");
  legendre->add_option("--lattice", lattice_path, "lattice JSON file")->required();
  legendre->add_option("--t-grid", legendre_grid, "grid a:b:k")->required();
  legendre->callback([&] { action = [&] { return run_legendre(lattice_path, legendre_grid, settings); }; });

  std::string system_path;
  std::optional<int> prolim_depth;
  std::optional<double> prolim_eps;
  bool prolim_atoms = false;
  auto* prolim = app.add_subcommand("prolim", "limit invariants of a truncated projective system");
  prolim->add_option("--system", system_path, "projective system JSON file")->required();
  prolim->add_option("--depth", prolim_depth, "truncation depth (default: all levels)");
  prolim->add_option("--eps", prolim_eps, "twist of the summability report (default 0)");
  prolim->add_flag("--atoms", prolim_atoms, "include the limit-measure bracket per atom");
  prolim->callback([&] {
    action = [&] { return run_prolim(system_path, prolim_depth, prolim_eps, prolim_atoms, settings); };
  });

  double hardy_r = 2.0;
  std::string hardy_delta;
  bool hardy_csv = false;
  auto* hardy = app.add_subcommand("hardy", "series sum_n tau(R^{2n} e^{-2 delta}) over a delta grid");
  hardy->add_option("--R", hardy_r, "ratio R")->required();
  hardy->add_option("--delta", hardy_delta, "grid a:b:k")->required();
  hardy->add_flag("--csv", hardy_csv, "emit CSV");
  hardy->callback([&] { action = [&] { return run_hardy(hardy_r, hardy_delta, hardy_csv); }; });

  double siegel_delta = 0.0;
  double siegel_t = 1.0;
  std::uint64_t siegel_samples = 100'000;
  std::uint64_t siegel_seed = 0;
  int siegel_blocks = tf::kDefaultSiegelBlocks;
  auto* siegel = app.add_subcommand("siegel", "Monte Carlo averages over random rank-2 lattices");
  siegel->add_option("--delta", siegel_delta, "log covolume shift")->capture_default_str();
  siegel->add_option("--t", siegel_t, "counting radius squared")->capture_default_str();
  siegel->add_option("--samples", siegel_samples, "sample count")->capture_default_str();
  siegel->add_option("--seed", siegel_seed, "generator seed")->capture_default_str();
  siegel->add_option("--blocks", siegel_blocks, "median-of-means blocks")->capture_default_str();
  siegel->callback([&] {
    action = [&] { return run_siegel(siegel_delta, siegel_t, siegel_samples, siegel_seed, siegel_blocks); };
  });

  std::string verify_suite = "all";
  int verify_trials = 20;
  std::uint64_t verify_seed = 0;
  auto* verify = app.add_subcommand("verify", "randomized property suites; exit 1 with a witness on violation");
  verify->add_option("--suite", verify_suite, "suite name or 'all'")->capture_default_str();
  verify->add_option("--trials", verify_trials, "trials per suite")->capture_default_str();
  verify->add_option("--seed", verify_seed, "generator seed")->capture_default_str();
  verify->callback([&] { action = [&] { return run_verify(verify_suite, verify_trials, verify_seed); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    check_tolerance(settings.tol);
    apply_threads(settings);
    return action();
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const tf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitViolation;
  }
}
