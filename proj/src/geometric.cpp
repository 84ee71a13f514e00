#include "geopol/geometric.hpp"

#include <cmath>

#include "geopol/line_search.hpp"

namespace geopol {

namespace {

void pad(Vector& v, std::size_t m) {
  const auto old = v.size();
  if (static_cast<std::size_t>(old) >= m) return;
  v.conservativeResize(static_cast<Eigen::Index>(m));
  v.tail(static_cast<Eigen::Index>(m) - old).setZero();
}

// Inserts y - y_1 and g into the basis and appends the reduced record.
void record_answer(PoliticianState& st, const FirstOrderRecord& rec) {
  st.basis.insert(rec.point - st.basis.base());
  st.basis.insert(rec.gradient);
  st.reduced.push_back(
      {st.basis.reduce(rec.point), rec.value, st.basis.reduce_direction(rec.gradient)});
  const std::size_t m = st.basis.dimension();
  for (auto& r : st.reduced) {
    pad(r.point, m);
    pad(r.gradient, m);
  }
  if (st.cached_center) pad(*st.cached_center, m);
}

void start_basis(PoliticianState& st, const Vector& base, const GeometricOptions& options) {
  st.basis = options.reduce ? SubspaceBasis(base) : SubspaceBasis::full(base);
  st.reduced.clear();
  st.cached_center.reset();
}

bool point_limit_nonempty(const std::vector<FirstOrderRecord>& recs, double fval) {
  for (const auto& r : recs)
    if (r.value != fval || r.point != recs.front().point) return false;
  return true;
}

}  // namespace

void GeometricPolitician::reset() {
  state_ = {};
  state_.alpha = options_.alpha0;
}

Answer geometric_politician(const Vector& x, const History& history, PoliticianState& st,
                            Oracle& oracle, const GeometricOptions& options) {
  const std::size_t k = history.size();
  if (k == 0) {
    start_basis(st, x, options);
    FirstOrderRecord rec = oracle.answer(x);
    record_answer(st, rec);
    return {std::move(rec), rec.value};
  }
  if (st.reduced.size() != k || !st.basis.initialized()) {
    start_basis(st, history[0].point, options);
    for (const auto& rec : history.records()) record_answer(st, rec);
  }

  const auto& recs = st.reduced;
  double fval = recs.front().value;
  for (const auto& r : recs) fval = std::min(fval, r.value);

  CenteringEvent ev;
  ev.k = k;
  ev.dimension = st.basis.dimension();

  std::optional<Vector> center;
  try {
    bool restart = false;
    if (std::isinf(st.alpha)) {
      restart = !point_limit_nonempty(recs, fval);
    } else {
      const Margin margin = feasibility_margin(recs, st.alpha, fval);
      restart = margin.certainly_empty();
      // Interior and emptiness indistinguishable at rounding level: keep alpha.
      if (!restart && !margin.has_interior()) throw RegionError("region degenerate");
    }
    if (restart) {
      const double alpha_bar = largest_feasible_alpha(recs, fval, st.alpha);
      st.alpha = alpha_bar / 4.0;
      ++st.restarts;
      st.cached_center.reset();
      ev.restarted = true;
    }
    const BallRegion region = build_region(recs, st.alpha, fval);
    if (region.is_point()) {
      center = *region.point;
      ev.point_region = true;
      ev.converged = true;
    } else {
      ev.warm = st.cached_center.has_value();
      const CenterResult cr = newton_center(region, options.center, st.cached_center,
                                            options.centering);
      ev.iterations = cr.newton_iterations;
      ev.decrement = cr.final_decrement;
      ev.converged = cr.converged;
      ev.fd_fallbacks = cr.fd_fallbacks;
      if (region.min_slack(cr.center) > 0.0) center = cr.center;
    }
  } catch (const RegionError&) {
    center.reset();
  } catch (const CenteringError&) {
    center.reset();
  } catch (const DomainError&) {
    center.reset();
  }

  Answer out;
  if (center) {
    st.cached_center = *center;
    Vector anchor = st.basis.lift(*center);
    // Single-point region at x itself: the centers y - g/alpha approach y
    // along -g as alpha grows, so the limiting line is the gradient line.
    if (ev.point_region && anchor == x) anchor = x - history.back().gradient;
    const LineSearchResult ls = exact_line_search(oracle, anchor, x);
    out.query_value = ls.value_b;
    out.record = oracle.answer(ls.point);
  } else {
    // Degenerate region: answer the best point so far when it is no worse than x.
    ev.fallback = true;
    const double fx = oracle.probe_value(x);
    const FirstOrderRecord& best = history[history.best_index()];
    out.query_value = fx;
    out.record = oracle.answer(best.value <= fx ? best.point : x);
  }
  st.events.push_back(ev);
  record_answer(st, out.record);
  return out;
}

}  // namespace geopol
