#pragma once

#include <cstddef>
#include <vector>

namespace divent {

// Standard normal CDF, accurate to full double precision via erfc.
double normal_cdf(double x);

// Standard normal density.
double normal_pdf(double x);

// Inverse standard normal CDF. Abramowitz-Stegun initial guess polished by
// two Halley iterations against the erfc-based CDF; absolute error is well
// below 1e-13 on (0, 1). Throws std::invalid_argument outside (0, 1).
double normal_quantile(double p);

// Half-width of the two-sided 95% Dvoretzky-Kiefer-Wolfowitz band for an
// empirical CDF built from m samples.
double dkw_radius(std::size_t m);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_max = 0.0;
};

// Ordinary least squares y = slope*x + intercept. Requires >= 2 points.
LineFit ols_fit(const std::vector<double>& x, const std::vector<double>& y);

} // namespace divent
