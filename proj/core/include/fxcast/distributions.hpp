#pragma once

namespace fxcast {

// Distribution functions needed by the test battery. All tails are exact
// analytic forms evaluated through the regularized incomplete gamma/beta
// functions; no table lookups.

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal survival function 1 - CDF.
double normal_sf(double x);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Chi-square upper tail P(X > x) with df degrees of freedom.
double chi_squared_sf(double x, double df);

/// F distribution upper tail P(F > f) with (df1, df2) degrees of freedom.
double f_sf(double f, double df1, double df2);

/// Two-sided Student-t p-value P(|T| > |t|) with df degrees of freedom.
double student_t_two_sided(double t, double df);

}  // namespace fxcast
