#include "dualgan/metrics.hpp"

#include <cmath>

#include "dualgan/errors.hpp"

namespace dualgan {

CoverageReport mode_coverage(const Matrix& samples, const RingMixtureSpec& spec, int threshold,
                             double k_sigma) {
  spec.validate();
  if (samples.rows() < 1) throw ValidationError("mode_coverage: need at least one sample");
  if (samples.cols() != 2) throw ValidationError("mode_coverage: samples must be n x 2");

  const Matrix centers = mixture_centers(spec);
  const double reach = k_sigma * std::sqrt(spec.covariance_scale);

  CoverageReport report;
  report.threshold = threshold;
  report.k_sigma = k_sigma;
  report.sample_count = static_cast<int>(samples.rows());
  report.counts.assign(spec.mode_count, 0);
  for (int j = 0; j < spec.mode_count; ++j) {
    // a sample may count toward several modes when the balls overlap
    const auto dist = (samples.rowwise() - centers.row(j)).rowwise().norm();
    report.counts[j] = static_cast<int>((dist.array() <= reach).count());
    if (report.counts[j] > threshold) report.covered_modes.push_back(j);
  }
  return report;
}

Vector lambda_histogram(const Vector& lambdas, int n, int bins) {
  if (n < 1) throw ValidationError("lambda_histogram: n must be >= 1");
  if (bins < 1) throw ValidationError("lambda_histogram: bins must be >= 1");
  if (lambdas.size() < 1) throw ValidationError("lambda_histogram: empty input");
  const double box = 1.0 / (2.0 * n);
  Vector hist = Vector::Zero(bins);
  for (int i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] < 0.0 || lambdas[i] > box) {
      throw ValidationError("lambda_histogram: value outside [0, 1/(2n)] at index " +
                            std::to_string(i));
    }
    const double u = 2.0 * n * lambdas[i];
    const int bin = std::min(static_cast<int>(u * bins), bins - 1);
    hist[bin] += 1.0;
  }
  hist /= static_cast<double>(lambdas.size());
  return hist;
}

}  // namespace dualgan
