#include "divent/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace divent {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

double normal_pdf(double x) {
    return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");

    // Rational tail approximation (Abramowitz-Stegun 26.2.23), |err| < 4.5e-4.
    const double q = p < 0.5 ? p : 1.0 - p;
    const double t = std::sqrt(-2.0 * std::log(q));
    double x = t - (2.515517 + t * (0.802853 + t * 0.010328)) /
                       (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308)));
    if (p < 0.5) x = -x;

    // Two Halley steps: cubic convergence leaves the initial 5e-4 error far
    // below double rounding noise.
    for (int it = 0; it < 2; ++it) {
        const double err = normal_cdf(x) - p;
        const double u = err / normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double dkw_radius(std::size_t m) {
    return 1.36 / std::sqrt(static_cast<double>(m));
}

LineFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("ols_fit: need >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("ols_fit: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = std::abs(y[i] - (fit.intercept + fit.slope * x[i]));
        if (r > fit.residual_max) fit.residual_max = r;
    }
    return fit;
}

} // namespace divent
