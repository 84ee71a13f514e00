#include "geopol/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "geopol/libsvm.hpp"
#include "geopol/methods.hpp"
#include "geopol/problems.hpp"

namespace geopol {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string short_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
  }
}

std::string file_stem(const std::string& method) {
  std::string s = method;
  if (!s.empty() && s.back() == '+') {
    s.pop_back();
    s += "_plus";
  }
  return s;
}

}  // namespace

std::string ProblemSpec::id() const {
  std::ostringstream os;
  if (family == "quadratic") {
    os << "quadratic_n" << n << "_s" << seed;
    if (kappa) os << "_k" << short_double(*kappa);
  } else if (family == "nesterov") {
    os << "nesterov_n" << n;
  } else if (family == "hinge") {
    os << "hinge_d" << n << "_N" << samples << "_s" << seed << "_t" << short_double(t) << "_l"
       << short_double(lambda);
  } else {
    os << "libsvm_" << std::filesystem::path(path).stem().string() << "_t" << short_double(t)
       << "_l" << short_double(lambda);
  }
  return os.str();
}

BenchConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(j, {"problems", "methods", "budget", "tol", "out", "epsilon", "jobs", "alpha0"},
             "config");
  BenchConfig c;
  if (!j.contains("problems") || !j["problems"].is_array() || j["problems"].empty())
    throw ConfigError("config needs a non-empty 'problems' array");
  if (!j.contains("methods") || !j["methods"].is_array() || j["methods"].empty())
    throw ConfigError("config needs a non-empty 'methods' array");

  for (const auto& p : j["problems"]) {
    if (!p.is_object()) throw ConfigError("each problem must be an object");
    check_keys(p, {"family", "n", "seed", "kappa", "samples", "t", "lambda", "path"}, "problem");
    ProblemSpec s;
    s.family = get_or<std::string>(p, "family", "");
    s.n = get_or<std::size_t>(p, "n", 0);
    s.seed = get_or<std::uint64_t>(p, "seed", 0);
    if (p.contains("kappa") && !p["kappa"].is_null()) s.kappa = get_or<double>(p, "kappa", 1.0);
    s.samples = get_or<std::size_t>(p, "samples", 0);
    s.t = get_or<double>(p, "t", 1.0);
    s.lambda = get_or<double>(p, "lambda", 1e-4);
    s.path = get_or<std::string>(p, "path", "");
    if (s.family == "quadratic" || s.family == "nesterov") {
      if (s.n == 0) throw ConfigError(s.family + " problem needs n >= 1");
      if (s.kappa && !(*s.kappa >= 1.0)) throw ConfigError("kappa must be >= 1");
    } else if (s.family == "hinge") {
      if (s.n == 0 || s.samples == 0) throw ConfigError("hinge problem needs n and samples");
    } else if (s.family == "libsvm") {
      if (s.path.empty()) throw ConfigError("libsvm problem needs a path");
    } else {
      throw ConfigError("unknown problem family '" + s.family + "'");
    }
    if (s.family == "hinge" || s.family == "libsvm") {
      if (!(s.t > 0.0)) throw ConfigError("t must be positive");
      if (!(s.lambda > 0.0)) throw ConfigError("lambda must be positive");
    }
    c.problems.push_back(std::move(s));
  }
  for (const auto& m : j["methods"]) {
    if (!m.is_string()) throw ConfigError("method names must be strings");
    c.methods.push_back(parse_method(m.get<std::string>()).name());
  }
  c.budget = get_or<std::size_t>(j, "budget", c.budget);
  c.tol = get_or<double>(j, "tol", c.tol);
  c.out_dir = get_or<std::string>(j, "out", c.out_dir);
  if (j.contains("epsilon") && !j["epsilon"].is_null()) c.epsilon = get_or<double>(j, "epsilon", 0);
  c.jobs = get_or<std::size_t>(j, "jobs", c.jobs);
  if (j.contains("alpha0") && !j["alpha0"].is_null()) c.alpha0 = get_or<double>(j, "alpha0", 0);
  if (c.budget < 1) throw ConfigError("budget must be >= 1");
  if (!(c.tol >= 0.0)) throw ConfigError("tol must be >= 0");
  if (c.epsilon && !(*c.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (!(c.alpha0 > 0.0)) throw ConfigError("alpha0 must be positive");
  return c;
}

BenchConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return parse_config(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
}

json to_json(const BenchConfig& c) {
  json j;
  j["problems"] = json::array();
  for (const auto& p : c.problems) {
    json q{{"family", p.family}, {"n", p.n}, {"seed", p.seed}};
    if (p.kappa) q["kappa"] = *p.kappa;
    if (p.family == "hinge") q["samples"] = p.samples;
    if (p.family == "hinge" || p.family == "libsvm") {
      q["t"] = p.t;
      q["lambda"] = p.lambda;
    }
    if (p.family == "libsvm") q["path"] = p.path;
    j["problems"].push_back(std::move(q));
  }
  j["methods"] = c.methods;
  j["budget"] = c.budget;
  j["tol"] = c.tol;
  j["out"] = c.out_dir;
  j["epsilon"] = c.epsilon ? json(*c.epsilon) : json(nullptr);
  // alpha0 = infinity has no JSON literal.
  j["alpha0"] = std::isinf(c.alpha0) ? json(nullptr) : json(c.alpha0);
  return j;
}

std::string config_hash(const BenchConfig& config) {
  // Thread count and output location do not change results.
  json j = to_json(config);
  j.erase("out");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const std::vector<std::string>& registered_methods() {
  static const std::vector<std::string> names{"sd",    "sd+",  "cg",    "cg+",   "gk",
                                              "gk+",   "bfgs", "bfgs+", "empty", "empty+"};
  return names;
}

MethodSpec parse_method(const std::string& name) {
  for (const auto& r : registered_methods()) {
    if (r == name) {
      MethodSpec s;
      s.geometric = name.back() == '+';
      s.base = s.geometric ? name.substr(0, name.size() - 1) : name;
      return s;
    }
  }
  throw ConfigError("unknown method '" + name + "'");
}

std::unique_ptr<Method> make_method(const MethodSpec& spec) {
  if (spec.base == "sd") return std::make_unique<SteepestDescent>();
  if (spec.base == "cg") return std::make_unique<ConjugateGradient>();
  if (spec.base == "bfgs") return std::make_unique<Bfgs>();
  if (spec.base == "empty") return std::make_unique<EmptyMethod>();
  // The gamma reset line assumes answers at the queried points.
  if (spec.base == "gk") return std::make_unique<GonzagaKaras>(!spec.geometric);
  throw ConfigError("unknown method '" + spec.base + "'");
}

std::unique_ptr<Politician> make_politician(const MethodSpec& spec,
                                            const GeometricOptions& options) {
  if (spec.geometric) return std::make_unique<GeometricPolitician>(options);
  return std::make_unique<OraclePolitician>();
}

BuiltProblem build_problem(const ProblemSpec& spec) {
  if (spec.family == "quadratic") {
    auto q = QuadraticProblem::random(spec.n, spec.seed, spec.kappa);
    return {spec.id(), q.objective(), Vector::Zero(static_cast<Eigen::Index>(spec.n)), 0.0, true};
  }
  if (spec.family == "nesterov") {
    NesterovVariantProblem p{spec.n};
    return {spec.id(), p.objective(), Vector::Zero(static_cast<Eigen::Index>(spec.n)), 0.0,
            false};
  }
  HingeRegressionProblem h;
  if (spec.family == "hinge") {
    h = HingeRegressionProblem::synthetic(spec.samples, spec.n, spec.seed, spec.t, spec.lambda);
  } else if (spec.family == "libsvm") {
    std::ifstream in(spec.path);
    if (!in) throw ConfigError("cannot open dataset '" + spec.path + "'");
    try {
      h.data = parse_libsvm(in);
    } catch (const ParseError& e) {
      throw ConfigError("dataset '" + spec.path + "': " + e.what());
    }
    if (h.data.rows.empty() || h.data.dim == 0)
      throw ConfigError("dataset '" + spec.path + "' is empty");
    h.t = spec.t;
    h.lambda = spec.lambda;
  } else {
    throw ConfigError("unknown problem family '" + spec.family + "'");
  }
  const std::size_t d = h.data.dim;
  return {spec.id(), h.objective(), Vector::Zero(static_cast<Eigen::Index>(d)), std::nullopt,
          spec.t >= 0.5};
}

std::string trace_csv(const RunTrace& trace) {
  std::string out = "iter,f,gradnorm,alpha,grad_evals,value_evals,cum_seconds\n";
  for (const auto& s : trace.steps) {
    out += std::to_string(s.k);
    out += ',' + format_double(s.value);
    out += ',' + format_double(s.grad_norm);
    out += ',' + format_double(s.alpha);
    out += ',' + std::to_string(s.grad_evals);
    out += ',' + std::to_string(s.value_evals);
    out += ',' + format_double(s.seconds);
    out += '\n';
  }
  return out;
}

std::optional<std::size_t> solved_iteration(const RunTrace& trace, const BuiltProblem& problem,
                                            double epsilon, double tol) {
  for (const auto& s : trace.steps) {
    const bool ok = problem.fstar
                        ? s.value - *problem.fstar <= epsilon * (trace.initial_value - *problem.fstar)
                        : s.grad_norm <= tol;
    if (ok) return s.k;
  }
  return std::nullopt;
}

bool SuiteResult::any_contract_violation() const {
  for (const auto& r : runs)
    if (r.contract_violation) return true;
  return false;
}

SuiteResult run_suite(const BenchConfig& config, bool write_files) {
  // Validate everything before the first run.
  std::vector<MethodSpec> methods;
  for (const auto& m : config.methods) methods.push_back(parse_method(m));
  std::vector<BuiltProblem> problems;
  for (const auto& p : config.problems) problems.push_back(build_problem(p));
  if (methods.empty() || problems.empty()) throw ConfigError("empty suite");

  SuiteResult suite;
  suite.config_hash = config_hash(config);
  suite.runs.resize(problems.size() * methods.size());

  namespace fs = std::filesystem;
  const fs::path out_dir(config.out_dir);
  if (write_files) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + config.out_dir + "'");
  }

  GeometricOptions geo;
  geo.alpha0 = config.alpha0;

  auto execute = [&](std::size_t job) {
    const BuiltProblem& problem = problems[job / methods.size()];
    const MethodSpec& spec = methods[job % methods.size()];
    RunResult& r = suite.runs[job];
    r.problem = problem.id;
    r.method = spec.name();
    r.file = problem.id + "__" + file_stem(r.method) + ".csv";
    auto method = make_method(spec);
    auto politician = make_politician(spec, geo);
    r.politician = politician->name();
    RunOptions options;
    options.budget = config.budget;
    options.tol = config.tol;
    options.keep_points = false;
    try {
      r.trace = run(*method, *politician, problem.objective, problem.x0, options);
    } catch (const ContractViolation& e) {
      r.error = e.what();
      r.contract_violation = true;
    } catch (const Error& e) {
      r.error = e.what();
    }
    if (auto* g = dynamic_cast<GeometricPolitician*>(politician.get())) r.events = g->state().events;
    const double eps = config.epsilon.value_or(problem.smooth ? 1e-6 : 1e-3);
    if (r.error.empty()) r.solved = solved_iteration(r.trace, problem, eps, config.tol);
    if (write_files) {
      std::ofstream out(out_dir / r.file, std::ios::binary);
      out << trace_csv(r.trace);
    }
  };

  const std::size_t total = suite.runs.size();
  const std::size_t workers = std::min(config.jobs, total);
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) execute(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) execute(i);
      });
  }

  if (write_files) {
    json manifest;
    manifest["schema_version"] = kSchemaVersion;
    manifest["csv_columns"] = {"iter",       "f",           "gradnorm",   "alpha",
                               "grad_evals", "value_evals", "cum_seconds"};
    manifest["config_hash"] = suite.config_hash;
    manifest["config"] = to_json(config);
    manifest["runs"] = json::array();
    for (const auto& r : suite.runs) {
      json e{{"problem", r.problem},
             {"method", r.method},
             {"politician", r.politician},
             {"file", r.file},
             {"iterations", r.trace.steps.size()}};
      e["termination"] = r.error.empty() ? std::string(to_string(r.trace.reason))
                                         : (r.contract_violation ? "contract_violation" : "error");
      if (!r.error.empty()) e["error"] = r.error;
      e["solved_at"] = r.solved ? json(*r.solved) : json(nullptr);
      if (!r.trace.steps.empty()) e["final_f"] = format_double(r.trace.steps.back().value);
      manifest["runs"].push_back(std::move(e));
    }
    std::ofstream(out_dir / "manifest.json", std::ios::binary) << manifest.dump(2) << '\n';

    std::vector<std::vector<std::optional<std::size_t>>> counts(problems.size());
    for (std::size_t p = 0; p < problems.size(); ++p)
      for (std::size_t m = 0; m < methods.size(); ++m)
        counts[p].push_back(suite.runs[p * methods.size() + m].solved);
    const ProfileCurve curve =
        performance_profile(config.methods, counts, default_profile_grid());
    std::ofstream(out_dir / "profile.csv", std::ios::binary) << profile_csv(curve);
    std::ofstream(out_dir / "plot_profile.py", std::ios::binary) << profile_plot_script();
  }
  return suite;
}

}  // namespace geopol
