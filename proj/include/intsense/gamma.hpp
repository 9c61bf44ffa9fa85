#pragma once

// Regularized lower incomplete gamma function P(a, x) = gamma(a, x) / Gamma(a)
// and its inverse in x. Series expansion below x = a + 1, Lentz continued
// fraction above; inverse by safeguarded Newton with a bisection bracket.

namespace intsense {

double reg_lower_incomplete_gamma(double a, double x);

// Returns x with reg_lower_incomplete_gamma(a, x) = p. p = 0 maps to 0,
// p >= 1 is a domain error (the inverse is unbounded there).
double inv_reg_lower_incomplete_gamma(double a, double p);

} // namespace intsense
