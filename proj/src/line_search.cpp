#include "geopol/line_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace geopol {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kExpansionCap = 0x1p60;
constexpr std::size_t kMaxRefineSteps = 200;

struct Sample {
  double t;
  LinePoint p;
};

bool flat(const LinePoint& p) {
  return std::isfinite(p.slope) && std::abs(p.slope) <= 16.0 * kEps * p.slope_scale;
}

}  // namespace

LineMinimum minimize_on_line(const LineFunction& phi) {
  std::vector<Sample> samples;
  auto eval = [&](double t) -> const Sample& {
    samples.push_back({t, phi(t)});
    return samples.back();
  };

  const Sample s0 = eval(0.0);
  const Sample s1 = eval(1.0);
  LineMinimum out;
  out.value_at_0 = s0.p.value;
  out.value_at_1 = s1.p.value;

  // Bracket [lo, hi] with slope(lo) < 0 < slope(hi).
  bool done = s0.p.slope == 0.0 || flat(s0.p);
  Sample lo = s0, hi = s1;
  if (!done) {
    if (s0.p.slope < 0.0) {
      if (s1.p.slope < 0.0 && !flat(s1.p)) {
        lo = s1;
        double t = 2.0;
        for (;;) {
          const Sample s = eval(t);
          if (s.p.slope >= 0.0 || flat(s.p)) {
            hi = s;
            break;
          }
          if (t >= kExpansionCap) {
            if (s.p.value < lo.p.value)
              throw LineSearchError("line search diverged: objective keeps decreasing along the line");
            hi = s;
            break;
          }
          lo = s;
          t *= 2.0;
        }
      } else {
        hi = s1;
      }
    } else {
      // Minimizer lies at negative t.
      hi = s0;
      double t = -1.0;
      for (;;) {
        const Sample s = eval(t);
        if (s.p.slope <= 0.0 || flat(s.p)) {
          lo = s;
          break;
        }
        if (-t >= kExpansionCap) {
          if (s.p.value < hi.p.value)
            throw LineSearchError("line search diverged: objective keeps decreasing along the line");
          lo = s;
          break;
        }
        hi = s;
        t *= 2.0;
      }
    }

    double last_width = hi.t - lo.t;
    bool bisect_next = false;
    for (std::size_t step = 0; step < kMaxRefineSteps; ++step) {
      if (flat(lo.p) || flat(hi.p)) break;
      const double width = hi.t - lo.t;
      if (width <= 4.0 * kEps * std::max(std::abs(lo.t), std::abs(hi.t))) break;
      double t;
      const double denom = hi.p.slope - lo.p.slope;
      if (!bisect_next && std::isfinite(denom) && denom > 0.0) {
        t = lo.t - lo.p.slope * width / denom;
        const double guard = 1e-3 * width;
        if (!(t > lo.t + guard && t < hi.t - guard)) t = std::clamp(t, lo.t + guard, hi.t - guard);
      } else {
        t = lo.t + 0.5 * width;
      }
      if (!(t > lo.t && t < hi.t)) break;
      const Sample s = eval(t);
      if (s.p.slope == 0.0 || flat(s.p)) break;
      if (s.p.slope < 0.0)
        lo = s;
      else
        hi = s;
      const double new_width = hi.t - lo.t;
      bisect_next = new_width > 0.5 * last_width;
      last_width = new_width;
    }
  }

  // Among points no worse than both anchors, pick the most stationary one.
  const double anchor_best = std::min(s0.p.value, s1.p.value);
  const Sample* best = s0.p.value <= s1.p.value ? &samples[0] : &samples[1];
  for (const Sample& s : samples) {
    if (!(s.p.value <= anchor_best)) continue;
    if (std::abs(s.p.slope) < std::abs(best->p.slope) ||
        (std::abs(s.p.slope) == std::abs(best->p.slope) && s.p.value < best->p.value))
      best = &s;
  }
  out.t_star = best->t;
  out.value = best->p.value;
  out.evals = samples.size();
  return out;
}

LineSearchResult exact_line_search(Oracle& oracle, const Vector& a, const Vector& b) {
  LineSearchResult r;
  if (a == b) {
    r.point = a;
    r.value = oracle.probe_value(a);
    r.value_a = r.value_b = r.value;
    r.value_evals = 1;
    return r;
  }
  const Vector dir = b - a;
  // The anchors are evaluated at a and b exactly, not at a + 1 * (b - a).
  auto point_at = [&](double t) -> Vector {
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    return a + t * dir;
  };
  const std::size_t before = oracle.value_evals();
  auto phi = [&](double t) -> LinePoint {
    const Oracle::Probe p = oracle.probe(point_at(t), dir);
    return {p.value, p.slope, p.slope_scale};
  };
  const LineMinimum m = minimize_on_line(phi);
  r.t_star = m.t_star;
  r.point = point_at(m.t_star);
  r.value = m.value;
  r.value_a = m.value_at_0;
  r.value_b = m.value_at_1;
  r.value_evals = oracle.value_evals() - before;
  return r;
}

}  // namespace geopol
