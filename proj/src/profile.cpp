#include <cstdio>
#include <limits>

#include "geopol/bench.hpp"

namespace geopol {

ProfileCurve performance_profile(const std::vector<std::string>& methods,
                                 const std::vector<std::vector<std::optional<std::size_t>>>& counts,
                                 const std::vector<double>& x_grid) {
  if (methods.empty() || counts.empty()) throw ProfileError("empty result set");
  if (x_grid.empty()) throw ProfileError("empty x grid");
  for (const auto& row : counts)
    if (row.size() != methods.size()) throw ProfileError("result row has wrong method count");

  ProfileCurve curve;
  curve.x = x_grid;
  curve.methods = methods;
  curve.fraction.assign(methods.size(), std::vector<double>(x_grid.size(), 0.0));
  const double problems = static_cast<double>(counts.size());

  for (const auto& row : counts) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const auto& c : row)
      if (c && *c < best) best = *c;
    if (best == std::numeric_limits<std::size_t>::max()) continue;
    for (std::size_t m = 0; m < row.size(); ++m) {
      if (!row[m]) continue;
      for (std::size_t i = 0; i < x_grid.size(); ++i)
        if (static_cast<double>(*row[m]) <= x_grid[i] * static_cast<double>(best))
          curve.fraction[m][i] += 1.0;
    }
  }
  for (auto& f : curve.fraction)
    for (double& v : f) v /= problems;
  return curve;
}

std::vector<double> default_profile_grid() {
  std::vector<double> x;
  for (int i = 0; i <= 90; ++i) x.push_back(1.0 + i / 10.0);
  return x;
}

std::string profile_csv(const ProfileCurve& curve) {
  std::string out = "x";
  for (const auto& m : curve.methods) out += "," + m;
  out += '\n';
  char buf[40];
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", curve.x[i]);
    out += buf;
    for (const auto& f : curve.fraction) {
      std::snprintf(buf, sizeof(buf), ",%.17g", f[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string profile_plot_script() {
  return R"(#!/usr/bin/env python3
"""Plot a performance profile written by geopol_bench (profile.csv)."""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    src = sys.argv[1] if len(sys.argv) > 1 else "profile.csv"
    dst = sys.argv[2] if len(sys.argv) > 2 else "profile.png"
    with open(src, newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    x = [float(r[0]) for r in data]
    for j, name in enumerate(header[1:], start=1):
        plt.step(x, [float(r[j]) for r in data], where="post", label=name)
    plt.xlabel("ratio to best iteration count")
    plt.ylabel("fraction solved")
    plt.ylim(0, 1.05)
    plt.legend()
    plt.savefig(dst, dpi=150)


if __name__ == "__main__":
    main()
)";
}

}  // namespace geopol
