#pragma once

#include <optional>
#include <vector>

#include "geopol/barriers.hpp"
#include "geopol/engine.hpp"
#include "geopol/region.hpp"
#include "geopol/subspace.hpp"

namespace geopol {

struct GeometricOptions {
  /// Initial upper bound on the strong convexity; infinity is allowed.
  double alpha0 = kInfinity;
  /// Run the geometry in reduced coordinates (false: identity basis of R^n).
  bool reduce = true;
  CenterKind center = CenterKind::Volumetric;
  CenterOptions centering;
};

/// One call of the politician, for diagnostics and the centering statistics.
struct CenteringEvent {
  std::size_t k = 0;            // records available when the call was made
  std::size_t dimension = 0;    // reduced dimension m
  bool restarted = false;       // alpha was lowered during this call
  bool warm = false;            // a previous center was available as warm start
  bool point_region = false;    // alpha = infinity, single-point region
  bool fallback = false;        // centering failed, best-so-far or x answered
  std::size_t iterations = 0;
  double decrement = 0.0;
  bool converged = false;
  std::size_t fd_fallbacks = 0;
};

struct PoliticianState {
  double alpha = kInfinity;
  std::size_t restarts = 0;
  SubspaceBasis basis;
  /// History records in reduced coordinates (shorter vectors are zero padded).
  std::vector<FirstOrderRecord> reduced;
  /// Previous center in reduced coordinates, the next warm start.
  std::optional<Vector> cached_center;
  std::vector<CenteringEvent> events;
};

/// Volumetric-center politician: localizes the minimizer in the intersection
/// of lower-bound balls and line-searches between the query and the center.
Answer geometric_politician(const Vector& x, const History& history, PoliticianState& state,
                            Oracle& oracle, const GeometricOptions& options = {});

class GeometricPolitician final : public Politician {
 public:
  explicit GeometricPolitician(GeometricOptions options = {}) : options_(options) { reset(); }
  std::string name() const override { return "geometric"; }
  void reset() override;
  Answer answer(const Vector& x, const History& history, Oracle& oracle) override {
    return geometric_politician(x, history, state_, oracle, options_);
  }
  double alpha() const override { return state_.alpha; }
  const PoliticianState& state() const { return state_; }
  const GeometricOptions& options() const { return options_; }

 private:
  GeometricOptions options_;
  PoliticianState state_;
};

}  // namespace geopol
