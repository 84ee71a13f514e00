#include "geopol/engine.hpp"

#include <cmath>
#include <sstream>

namespace geopol {

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

std::string describe_point(const Vector& x) {
  std::ostringstream os;
  os.precision(6);
  os << "[";
  const Eigen::Index shown = std::min<Eigen::Index>(x.size(), 4);
  for (Eigen::Index i = 0; i < shown; ++i) os << (i ? ", " : "") << x[i];
  if (x.size() > shown) os << ", ...";
  os << "]";
  return os.str();
}

}  // namespace

ContractViolation::ContractViolation(std::string politician, std::size_t iteration,
                                     double query_value, double answer_value)
    : Error([&] {
        std::ostringstream os;
        os.precision(17);
        os << "politician '" << politician << "' violated f(answer) <= f(query) at iteration "
           << iteration << ": f(query)=" << query_value << " f(answer)=" << answer_value;
        return os.str();
      }()),
      politician_(std::move(politician)),
      iteration_(iteration) {}

std::size_t History::best_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < records_.size(); ++i)
    if (records_[i].value < records_[best].value) best = i;
  return best;
}

Objective::Objective(std::size_t dimension, Evaluator evaluator, std::string name)
    : dimension_(dimension), evaluator_(std::move(evaluator)), name_(std::move(name)) {
  if (dimension_ == 0) throw Error("objective dimension must be positive");
}

FirstOrderRecord Oracle::answer(const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != dimension())
    throw Error("oracle query has wrong dimension");
  FirstOrderRecord rec;
  rec.point = x;
  rec.gradient.resize(x.size());
  rec.value = objective_->evaluate(x, rec.gradient);
  ++gradient_evals_;
  if (!std::isfinite(rec.value) || !all_finite(rec.gradient))
    throw EvaluationError("non-finite objective or gradient at " + describe_point(x), x);
  return rec;
}

Oracle::Probe Oracle::probe(const Vector& x, const Vector& direction) {
  scratch_.resize(x.size());
  const double value = objective_->evaluate(x, scratch_);
  ++value_evals_;
  if (!std::isfinite(value) || !all_finite(scratch_)) return {kInfinity, kInfinity, kInfinity};
  return {value, scratch_.dot(direction), scratch_.cwiseAbs().dot(direction.cwiseAbs())};
}

double Oracle::probe_value(const Vector& x) {
  scratch_.resize(x.size());
  const double value = objective_->evaluate(x, scratch_);
  ++value_evals_;
  return std::isfinite(value) ? value : kInfinity;
}

Answer OraclePolitician::answer(const Vector& x, const History& history, Oracle& oracle) {
  Answer a;
  a.record = oracle_politician(x, history, oracle);
  a.query_value = a.record.value;
  return a;
}

FirstOrderRecord oracle_politician(const Vector& x, const History&, Oracle& oracle) {
  return oracle.answer(x);
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Budget: return "budget";
    case StopReason::GradientTolerance: return "gradient_tol";
    case StopReason::Stationary: return "stationary";
    case StopReason::Stalled: return "stalled";
  }
  return "unknown";
}

RunTrace run(Method& method, Politician& politician, const Objective& objective,
             const Vector& x0, const RunOptions& options) {
  if (options.budget < 1) throw Error("run budget must be at least 1");
  if (static_cast<std::size_t>(x0.size()) != objective.dimension())
    throw Error("starting point has wrong dimension");
  if (!x0.allFinite()) throw Error("starting point is not finite");

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  Oracle oracle(objective);
  History history;
  RunTrace trace;
  trace.method = method.name();
  trace.politician = politician.name();
  method.reset(x0);
  politician.reset();

  std::size_t stalled = 0;
  bool stopped = false;
  for (std::size_t k = 0; k < options.budget; ++k) {
    Vector x = method.next_query(history, oracle);
    Answer ans = politician.answer(x, history, oracle);

    const double fx = ans.query_value;
    const double fy = ans.record.value;
    if (fy > fx + options.contract_slack * (1.0 + std::abs(fx)))
      throw ContractViolation(politician.name(), k + 1, fx, fy);

    RunStep step;
    step.k = k + 1;
    step.query_value = fx;
    step.value = fy;
    step.grad_norm = ans.record.gradient.norm();
    step.alpha = politician.alpha();
    step.grad_evals = oracle.gradient_evals();
    step.value_evals = oracle.value_evals();
    step.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (options.keep_points) {
      step.query = std::move(x);
      step.answer = ans.record.point;
    }
    if (k == 0) trace.initial_value = fx;

    const double previous = history.empty() ? kInfinity : history[history.best_index()].value;
    history.append(std::move(ans.record));
    trace.steps.push_back(std::move(step));

    const RunStep& last = trace.steps.back();
    if (last.grad_norm == 0.0) {
      trace.reason = StopReason::Stationary;
      stopped = true;
      break;
    }
    if (last.grad_norm <= options.tol) {
      trace.reason = StopReason::GradientTolerance;
      stopped = true;
      break;
    }
    if (std::isfinite(previous) &&
        previous - last.value < options.stall_tol * (1.0 + std::abs(last.value))) {
      if (++stalled >= options.stall_window) {
        trace.reason = StopReason::Stalled;
        stopped = true;
        break;
      }
    } else {
      stalled = 0;
    }
  }
  if (!stopped) {
    trace.reason = StopReason::Budget;
    if (options.final_query) trace.next_query = method.next_query(history, oracle);
  }
  return trace;
}

}  // namespace geopol
