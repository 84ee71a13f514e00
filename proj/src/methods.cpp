#include "geopol/methods.hpp"

#include <cmath>

namespace geopol {

Vector sd_query(const History& history, Oracle& oracle) {
  const FirstOrderRecord& y = history.back();
  return line_search_along(oracle, y.point, -y.gradient).point;
}

Vector empty_plus_query(const History& history, const Vector& x0) {
  return history.empty() ? x0 : history.back().point;
}

Vector SteepestDescent::next_query(const History& history, Oracle& oracle) {
  if (history.empty()) return x0_;
  return sd_query(history, oracle);
}

Vector cg_query(const History& history, CGState& state, Oracle& oracle) {
  const FirstOrderRecord& y = history.back();
  const Vector& g = y.gradient;
  Vector d = -g;
  state.restarted = true;
  if (state.direction.size() == g.size()) {
    const double gg_prev = state.gradient.squaredNorm();
    const double beta = gg_prev > 0.0 ? std::max(0.0, g.dot(g - state.gradient) / gg_prev) : 0.0;
    if (beta > 0.0) {
      Vector candidate = -g + beta * state.direction;
      if (candidate.dot(g) < 0.0) {
        d = std::move(candidate);
        state.restarted = false;
      } else {
        ++state.restarts;
      }
    }
  }
  state.direction = d;
  state.gradient = g;
  return line_search_along(oracle, y.point, d).point;
}

Vector ConjugateGradient::next_query(const History& history, Oracle& oracle) {
  if (history.empty()) return x0_;
  return cg_query(history, state_, oracle);
}

bool BFGSMemory::push(Vector s, Vector y) {
  const double sy = s.dot(y);
  if (!(sy > 1e-14 * s.norm() * y.norm())) {
    ++rejected_;
    return false;
  }
  pairs_.push_back({std::move(s), std::move(y), 1.0 / sy});
  return true;
}

Vector BFGSMemory::direction(const Vector& gradient) const {
  if (pairs_.empty()) return -gradient;
  const std::size_t k = pairs_.size();
  std::vector<double> a(k);
  Vector q = gradient;
  for (std::size_t i = k; i-- > 0;) {
    a[i] = pairs_[i].rho * pairs_[i].s.dot(q);
    q -= a[i] * pairs_[i].y;
  }
  const Pair& newest = pairs_.back();
  q *= newest.s.dot(newest.y) / newest.y.squaredNorm();
  for (std::size_t i = 0; i < k; ++i) {
    const double b = pairs_[i].rho * pairs_[i].y.dot(q);
    q += (a[i] - b) * pairs_[i].s;
  }
  return -q;
}

Vector bfgs_query(const History& history, BFGSMemory& memory, Oracle& oracle) {
  const std::size_t k = history.size();
  const FirstOrderRecord& cur = history.back();
  if (k >= 2) {
    const FirstOrderRecord& prev = history[k - 2];
    memory.push(cur.point - prev.point, cur.gradient - prev.gradient);
  }
  return line_search_along(oracle, cur.point, memory.direction(cur.gradient)).point;
}

Vector Bfgs::next_query(const History& history, Oracle& oracle) {
  if (history.empty()) return x0_;
  return bfgs_query(history, memory_, oracle);
}

namespace {

// Root of a b^2 + bb b + c = 0 in (0, 1]; q(0) = c <= 0 < q(1) in exact arithmetic.
double gk_beta(double a, double b, double c, GKLog& log) {
  auto q = [&](double beta) { return (a * beta + b) * beta + c; };
  auto valid = [](double beta) { return std::isfinite(beta) && beta > 0.0 && beta <= 1.0; };
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    disc = 0.0;
    ++log.discriminant_clamps;
  }
  if (a != 0.0) {
    const double root = (-b + std::sqrt(disc)) / (2.0 * a);
    if (valid(root)) return root;
    const double other = (-b - std::sqrt(disc)) / (2.0 * a);
    if (valid(other)) return other;
  } else if (b != 0.0 && valid(-c / b)) {
    return -c / b;
  }
  // Bisection for the sign change of q on (0, 1].
  if (!(q(1.0) > 0.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    (q(mid) > 0.0 ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

Vector gk_step(GKState& st, const FirstOrderRecord& answer, Oracle& oracle, GKLog& log) {
  const Vector& y = answer.point;
  const Vector& g = answer.gradient;
  const double fy = answer.value;
  const double gg = g.squaredNorm();

  const LineSearchResult ls = line_search_along(oracle, y, -g);
  const Vector& x_next = ls.point;
  const double fx_next = ls.value;

  if (st.oracle_mode && st.alpha_est >= st.gamma / 1.02) {
    st.alpha_est = st.gamma / 2.0;
    ++log.reset_line_executions;
  }
  const double decrease = fy - fx_next;
  if (decrease > 0.0 && st.alpha_est >= gg / (2.0 * decrease)) {
    st.alpha_est = gg / (20.0 * decrease);
    ++log.alpha_updates;
  }

  const double alpha = st.alpha_est;
  const double gamma = st.gamma;
  const Vector vy = st.v - y;
  const double G = gamma * (0.5 * alpha * vy.squaredNorm() + g.dot(vy));
  const double A = G + 0.5 * gg + (alpha - gamma) * (st.fx - fy);
  const double B = (alpha - gamma) * (fx_next - st.fx) - gamma * (fy - st.fx) - G;
  const double C = gamma * (fx_next - st.fx);
  const double beta = gk_beta(A, B, C, log);
  // (1 - beta) gamma + beta alpha, written so rounding cannot raise gamma.
  const double gamma_next = gamma - beta * (gamma - alpha);

  st.v = ((1.0 - beta) * gamma * st.v + beta * (alpha * y - g)) / gamma_next;
  st.gamma = gamma_next;
  st.x = x_next;
  st.fx = fx_next;
  st.y = y;
  log.gamma.push_back(gamma_next);
  log.beta.push_back(beta);
  log.alpha.push_back(alpha);

  return exact_line_search(oracle, st.x, st.v).point;
}

void GonzagaKaras::reset(const Vector& x0) {
  x0_ = x0;
  state_ = {};
  state_.oracle_mode = oracle_mode_;
  log_ = {};
}

Vector GonzagaKaras::next_query(const History& history, Oracle& oracle) {
  if (history.empty()) return x0_;
  if (history.size() == 1) {
    // Preliminary steepest-descent step seeds alpha with the in-loop /20 rule.
    const FirstOrderRecord& y0 = history[0];
    const LineSearchResult ls = line_search_along(oracle, y0.point, -y0.gradient);
    const double decrease = y0.value - ls.value;
    state_.alpha_est =
        decrease > 0.0 ? y0.gradient.squaredNorm() / (20.0 * decrease) : 1.0;
    state_.gamma = 2.0 * state_.alpha_est;
    state_.v = y0.point;
    state_.y = y0.point;
    state_.x = ls.point;
    state_.fx = ls.value;
    log_.gamma.push_back(state_.gamma);
    return exact_line_search(oracle, state_.x, state_.v).point;
  }
  return gk_step(state_, history.back(), oracle, log_);
}

}  // namespace geopol
