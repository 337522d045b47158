#pragma once

#include <Eigen/Core>
#include <cmath>

namespace dcool {

// Ambient-space point/vector. Dimension is a runtime value (1..3) but storage
// is a fixed-capacity stack buffer, so the per-edge solver loops never touch
// the heap.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

inline Vec zero_vec(int p) { return Vec::Zero(p); }

inline bool all_finite(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

}  // namespace dcool
