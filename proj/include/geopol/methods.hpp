#pragma once

#include <vector>

#include "geopol/engine.hpp"
#include "geopol/line_search.hpp"

namespace geopol {

/// Exact line search from the latest answer along its negative gradient.
Vector sd_query(const History& history, Oracle& oracle);

/// Previous answer (or x0 on an empty history); the politician does the work.
Vector empty_plus_query(const History& history, const Vector& x0);

class SteepestDescent final : public Method {
 public:
  std::string name() const override { return "sd"; }
  void reset(const Vector& x0) override { x0_ = x0; }
  Vector next_query(const History& history, Oracle& oracle) override;

 private:
  Vector x0_;
};

/// Repeatedly queries the previous answer.
class EmptyMethod final : public Method {
 public:
  std::string name() const override { return "empty"; }
  void reset(const Vector& x0) override { x0_ = x0; }
  Vector next_query(const History& history, Oracle&) override {
    return empty_plus_query(history, x0_);
  }

 private:
  Vector x0_;
};

struct CGState {
  Vector direction;
  Vector gradient;
  std::size_t restarts = 0;
  /// True when the last query used the steepest-descent direction.
  bool restarted = false;
};

/// Polak-Ribiere+ direction with exact line search; falls back to the
/// negative gradient when the direction is not a descent direction.
Vector cg_query(const History& history, CGState& state, Oracle& oracle);

class ConjugateGradient final : public Method {
 public:
  std::string name() const override { return "cg"; }
  void reset(const Vector& x0) override {
    x0_ = x0;
    state_ = {};
  }
  Vector next_query(const History& history, Oracle& oracle) override;
  const CGState& state() const { return state_; }

 private:
  Vector x0_;
  CGState state_;
};

/// Curvature pairs (s_i, y_i) with <s_i, y_i> > 0, oldest first.
class BFGSMemory {
 public:
  struct Pair {
    Vector s;
    Vector y;
    double rho;  // 1 / <s, y>
  };

  /// Stores the pair when its curvature is positive; returns whether it was kept.
  bool push(Vector s, Vector y);
  const std::vector<Pair>& pairs() const { return pairs_; }
  std::size_t rejected() const { return rejected_; }
  void clear() {
    pairs_.clear();
    rejected_ = 0;
  }

  /// Two-loop recursion: -H g with H built from the stored pairs and the
  /// initial scaling <s, y>/<y, y> of the newest pair.
  Vector direction(const Vector& gradient) const;

 private:
  std::vector<Pair> pairs_;
  std::size_t rejected_ = 0;
};

/// Records the pair between the last two answers, then searches along the
/// two-loop direction from the latest answer.
Vector bfgs_query(const History& history, BFGSMemory& memory, Oracle& oracle);

class Bfgs final : public Method {
 public:
  std::string name() const override { return "bfgs"; }
  void reset(const Vector& x0) override {
    x0_ = x0;
    memory_.clear();
  }
  Vector next_query(const History& history, Oracle& oracle) override;
  const BFGSMemory& memory() const { return memory_; }

 private:
  Vector x0_;
  BFGSMemory memory_;
};

struct GKState {
  double gamma = 0.0;
  double alpha_est = 0.0;
  /// Momentum point v_k.
  Vector v;
  /// x_k and f(x_k), the method's own steepest-descent iterate.
  Vector x;
  double fx = 0.0;
  /// Latest politician answer y_k.
  Vector y;
  /// Enables the gamma/alpha reset line, which assumes a plain oracle.
  bool oracle_mode = true;
};

/// Instrumentation of the accelerated method.
struct GKLog {
  std::vector<double> gamma;  // after each update
  std::vector<double> beta;
  std::vector<double> alpha;
  std::size_t reset_line_executions = 0;
  std::size_t discriminant_clamps = 0;
  std::size_t alpha_updates = 0;
};

/// One loop body given the politician's answer y_k: steepest-descent line
/// search to x_{k+1}, alpha and gamma learning, momentum update. Returns the
/// next query, the exact minimizer on the line through x_{k+1} and v_{k+1}.
Vector gk_step(GKState& state, const FirstOrderRecord& answer, Oracle& oracle, GKLog& log);

/// Gonzaga-Karas accelerated gradient with exact line searches.
class GonzagaKaras final : public Method {
 public:
  explicit GonzagaKaras(bool oracle_mode = true) : oracle_mode_(oracle_mode) {}
  std::string name() const override { return "gk"; }
  void reset(const Vector& x0) override;
  Vector next_query(const History& history, Oracle& oracle) override;
  const GKState& state() const { return state_; }
  const GKLog& log() const { return log_; }

 private:
  bool oracle_mode_;
  Vector x0_;
  GKState state_;
  GKLog log_;
};

}  // namespace geopol
