#pragma once

#include <cmath>

namespace crcmap {

/// Standard normal CDF via the complementary error function.
double normal_cdf(double x);

/// Standard normal quantile (inverse CDF), Wichura's AS 241 (PPND16).
/// Absolute accuracy is far below 1e-9 over (0, 1); the endpoints are
/// rejected by the caller-facing contracts.
double normal_quantile(double p);

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace crcmap
