#pragma once

namespace plrd::stats {

double normal_cdf(double x);

/// Upper tail 1 - Phi(x), accurate for large x.
double normal_sf(double x);

/// Inverse standard normal CDF, |error| below 1e-9 on (0, 1).
double normal_quantile(double p);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// P(F > f) for F ~ F(df1, df2).
double f_upper_tail(double f, double df1, double df2);

}  // namespace plrd::stats
