#pragma once

namespace mclsquad {

/// Standard normal quantile by Acklam's rational approximation; relative
/// error below 1.15e-9 on (0, 1). Returns -inf / +inf at 0 / 1.
double inverse_normal_cdf(double p);

/// Standard normal CDF via erfc.
double normal_cdf(double x);

}  // namespace mclsquad
