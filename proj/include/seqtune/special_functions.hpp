#pragma once

namespace seqtune {

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
// series expansion for x < a + 1, continued fraction otherwise.
double reg_gamma_lower(double a, double x);

// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double reg_beta(double a, double b, double x);

// Standard normal CDF.
double normal_cdf(double z);

}  // namespace seqtune
