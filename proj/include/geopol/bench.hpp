#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geopol/engine.hpp"
#include "geopol/geometric.hpp"

namespace geopol {

/// Invalid benchmark configuration; raised before any run starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ProfileError : public Error {
 public:
  using Error::Error;
};

struct ProblemSpec {
  std::string family;  // quadratic | nesterov | hinge | libsvm
  std::size_t n = 0;   // dimension (features for hinge)
  std::uint64_t seed = 0;
  std::optional<double> kappa;  // quadratic: floor D at 1/kappa
  std::size_t samples = 0;      // hinge: synthetic rows
  double t = 1.0;
  double lambda = 1e-4;
  std::string path;  // libsvm file

  std::string id() const;
};

struct BenchConfig {
  std::vector<ProblemSpec> problems;
  std::vector<std::string> methods;
  std::size_t budget = 100;
  double tol = 1e-10;
  std::string out_dir = "bench_out";
  /// Target accuracy of the "solved" rule; family default when unset.
  std::optional<double> epsilon;
  std::size_t jobs = 1;
  double alpha0 = kInfinity;
};

BenchConfig parse_config(const nlohmann::json& j);
BenchConfig load_config(const std::string& path);
nlohmann::json to_json(const BenchConfig& config);
/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const BenchConfig& config);

struct MethodSpec {
  std::string base;     // sd, cg, gk, bfgs, empty
  bool geometric = false;  // "+" suffix

  std::string name() const { return geometric ? base + "+" : base; }
};

/// Validates against the registry; throws ConfigError on unknown names.
MethodSpec parse_method(const std::string& name);
std::unique_ptr<Method> make_method(const MethodSpec& spec);
std::unique_ptr<Politician> make_politician(const MethodSpec& spec,
                                            const GeometricOptions& options = {});
const std::vector<std::string>& registered_methods();

struct BuiltProblem {
  std::string id;
  Objective objective;
  Vector x0;
  std::optional<double> fstar;
  bool smooth = true;
};

BuiltProblem build_problem(const ProblemSpec& spec);

/// iter, f, gradnorm, alpha, grad_evals, value_evals, cum_seconds.
std::string trace_csv(const RunTrace& trace);
inline constexpr int kSchemaVersion = 1;

/// First iteration (1-based) satisfying the solved rule, if any.
std::optional<std::size_t> solved_iteration(const RunTrace& trace, const BuiltProblem& problem,
                                            double epsilon, double tol);

struct RunResult {
  std::string problem;
  std::string method;
  std::string politician;
  std::string file;
  RunTrace trace;
  std::optional<std::size_t> solved;
  std::string error;  // empty unless the run aborted
  bool contract_violation = false;
  std::vector<CenteringEvent> events;
};

struct SuiteResult {
  std::vector<RunResult> runs;
  std::string config_hash;
  bool any_contract_violation() const;
};

/// Runs every (problem, method) pair, writes one CSV per run, manifest.json
/// and profile.csv into config.out_dir. Runs are independent and may use
/// config.jobs threads; output does not depend on the thread count.
SuiteResult run_suite(const BenchConfig& config, bool write_files = true);

struct ProfileCurve {
  std::vector<double> x;
  std::vector<std::string> methods;
  /// fraction[m][i]: share of problems method m solves within x[i] times the best count.
  std::vector<std::vector<double>> fraction;
};

/// counts[p][m] is the iteration count of method m on problem p, nullopt
/// when it did not solve it.
ProfileCurve performance_profile(const std::vector<std::string>& methods,
                                 const std::vector<std::vector<std::optional<std::size_t>>>& counts,
                                 const std::vector<double>& x_grid);

std::vector<double> default_profile_grid();
std::string profile_csv(const ProfileCurve& curve);
/// Standalone matplotlib script that plots profile.csv.
std::string profile_plot_script();

}  // namespace geopol
