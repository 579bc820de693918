#pragma once

#include <vector>

#include "dualgan/data_features.hpp"
#include "dualgan/types.hpp"

namespace dualgan {

/// Which mixture modes receive more than `threshold` samples within
/// k_sigma standard deviations of their center.
struct CoverageReport {
  std::vector<int> covered_modes;
  std::vector<int> counts;
  int threshold = 100;
  double k_sigma = 3.0;
  int sample_count = 0;

  bool all_covered(int mode_count) const {
    return static_cast<int>(covered_modes.size()) == mode_count;
  }
};

CoverageReport mode_coverage(const Matrix& samples, const RingMixtureSpec& spec,
                             int threshold = 100, double k_sigma = 3.0);

/// Normalized histogram over [0, 1] of the rescaled duals 2n*lambda.
Vector lambda_histogram(const Vector& lambdas, int n, int bins);

}  // namespace dualgan
