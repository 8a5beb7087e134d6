#pragma once

// Standard normal pdf/cdf and inverse cdf.
//
// cdf:      Phi(x) = erfc(-x / sqrt(2)) / 2, absolute error below 1e-12
//           (inherited from the libm erfc implementation).
// inverse:  rational initial guess (Acklam's approximation, |err| ~ 1.15e-9)
//           refined by one Newton step on Phi, absolute error well below 1e-9.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqdec {

inline double norm_pdf(double x) {
    static constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double norm_cdf(double x) {
    static constexpr double inv_sqrt_2 = 0.7071067811865475244008444;
    return 0.5 * std::erfc(-x * inv_sqrt_2);
}

// Acklam's rational approximation for the initial guess.
inline double norm_cdf_inverse(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("norm_cdf_inverse: probability must lie in (0, 1)");

    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    static constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Newton step on Phi(x) = p.
    const double density = norm_pdf(x);
    if (density > std::numeric_limits<double>::min())
        x -= (norm_cdf(x) - p) / density;
    return x;
}

} // namespace seqdec
