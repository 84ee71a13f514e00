#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace geopol {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite value or gradient returned by an objective.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, Vector point)
      : Error(what), point_(std::move(point)) {}
  const Vector& point() const { return point_; }

 private:
  Vector point_;
};

/// A politician answered with a value above the queried value.
class ContractViolation : public Error {
 public:
  ContractViolation(std::string politician, std::size_t iteration, double query_value,
                    double answer_value);
  const std::string& politician() const { return politician_; }
  std::size_t iteration() const { return iteration_; }

 private:
  std::string politician_;
  std::size_t iteration_;
};

/// (y, f(y), grad f(y)).
struct FirstOrderRecord {
  Vector point;
  double value = 0.0;
  Vector gradient;
};

/// Append-only list of answered records, index order is query order.
class History {
 public:
  void append(FirstOrderRecord rec) { records_.push_back(std::move(rec)); }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const FirstOrderRecord& operator[](std::size_t i) const { return records_[i]; }
  const FirstOrderRecord& back() const { return records_.back(); }
  const std::vector<FirstOrderRecord>& records() const { return records_; }

  /// Index of the record with the smallest value (first one on ties).
  std::size_t best_index() const;

 private:
  std::vector<FirstOrderRecord> records_;
};

/// Black-box differentiable objective. Evaluators must be deterministic and
/// safe for concurrent read-only use.
class Objective {
 public:
  using Evaluator = std::function<double(const Vector& x, Vector& grad)>;

  Objective(std::size_t dimension, Evaluator evaluator, std::string name = "objective");

  std::size_t dimension() const { return dimension_; }
  const std::string& name() const { return name_; }

  /// Raw evaluation without finiteness checks.
  double evaluate(const Vector& x, Vector& grad) const { return evaluator_(x, grad); }

 private:
  std::size_t dimension_;
  Evaluator evaluator_;
  std::string name_;
};

/// Counting front-end to an Objective for a single run. Charged evaluations
/// produce politician answers; probes serve line searches and are tracked
/// separately.
class Oracle {
 public:
  explicit Oracle(const Objective& objective) : objective_(&objective) {}

  const Objective& objective() const { return *objective_; }
  std::size_t dimension() const { return objective_->dimension(); }

  /// Charged first-order evaluation. Throws EvaluationError on non-finite output.
  FirstOrderRecord answer(const Vector& x);

  /// Line-search probe: value and directional derivative along `direction`.
  struct Probe {
    double value;
    double slope;
    /// sum_i |g_i d_i|, the rounding scale of `slope`.
    double slope_scale;
  };
  Probe probe(const Vector& x, const Vector& direction);
  double probe_value(const Vector& x);

  std::size_t gradient_evals() const { return gradient_evals_; }
  std::size_t value_evals() const { return value_evals_; }

 private:
  const Objective* objective_;
  std::size_t gradient_evals_ = 0;
  std::size_t value_evals_ = 0;
  Vector scratch_;
};

/// Answer returned by a politician together with the value at the query.
struct Answer {
  FirstOrderRecord record;
  double query_value = 0.0;
};

/// Maps a query and the history to a point no worse than the query.
class Politician {
 public:
  virtual ~Politician() = default;
  virtual std::string name() const = 0;
  virtual bool is_oracle() const { return false; }
  virtual void reset() {}
  virtual Answer answer(const Vector& x, const History& history, Oracle& oracle) = 0;
  /// Current strong-convexity estimate, NaN when the politician has none.
  virtual double alpha() const { return std::numeric_limits<double>::quiet_NaN(); }
};

/// The trivial politician: answers at the queried point.
class OraclePolitician final : public Politician {
 public:
  std::string name() const override { return "oracle"; }
  bool is_oracle() const override { return true; }
  Answer answer(const Vector& x, const History& history, Oracle& oracle) override;
};

/// Free-function form of the oracle politician.
FirstOrderRecord oracle_politician(const Vector& x, const History& history, Oracle& oracle);

/// First-order method: maps the history of answers to the next query.
class Method {
 public:
  virtual ~Method() = default;
  virtual std::string name() const = 0;
  virtual void reset(const Vector& x0) = 0;
  /// `history.back()` is the latest politician answer; an empty history asks
  /// for the starting query.
  virtual Vector next_query(const History& history, Oracle& oracle) = 0;
};

enum class StopReason { Budget, GradientTolerance, Stationary, Stalled };

std::string_view to_string(StopReason reason);

struct RunOptions {
  std::size_t budget = 100;
  double tol = 1e-10;
  /// Relative slack of the politician contract check.
  double contract_slack = 1e-12;
  /// Consecutive iterations with negligible improvement before stopping.
  std::size_t stall_window = 5;
  double stall_tol = 1e-15;
  bool keep_points = true;
  /// Ask the method for one more query once the budget is exhausted.
  bool final_query = false;
};

struct RunStep {
  std::size_t k = 0;
  Vector query;
  Vector answer;
  double query_value = 0.0;
  double value = 0.0;
  double grad_norm = 0.0;
  double alpha = 0.0;
  std::size_t grad_evals = 0;
  std::size_t value_evals = 0;
  double seconds = 0.0;
};

struct RunTrace {
  std::string method;
  std::string politician;
  std::vector<RunStep> steps;
  StopReason reason = StopReason::Budget;
  std::optional<Vector> next_query;
  double initial_value = 0.0;
};

/// Alternates method query, politician answer and history update until the
/// budget, the gradient tolerance, exact stationarity or a stall.
RunTrace run(Method& method, Politician& politician, const Objective& objective,
             const Vector& x0, const RunOptions& options);

}  // namespace geopol
