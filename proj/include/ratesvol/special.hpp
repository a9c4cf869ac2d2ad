#pragma once

namespace ratesvol::special {

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed without cancellation.
double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b), continued fraction to 1e-12 relative accuracy.
double beta_inc(double a, double b, double x);

double normal_cdf(double x);
/// Inverse standard normal CDF. Rational approximation refined by one Halley step;
/// absolute error well below 1.5e-9 on (0, 1).
double normal_quantile(double p);

double chi_square_cdf(double x, double dof);
double chi_square_sf(double x, double dof);

double student_t_cdf(double t, double dof);
/// P(|T| >= |t|) for T ~ Student t with dof degrees of freedom.
double student_t_two_sided_p(double t, double dof);

}  // namespace ratesvol::special
