#include "intsense/gamma.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace intsense {
namespace {

constexpr int kMaxIter = 500;
const double kEps = std::numeric_limits<double>::epsilon();
const double kFpMin = std::numeric_limits<double>::min() / kEps;

// series representation of P(a, x), good for x < a + 1
double gamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// modified Lentz continued fraction for Q(a, x), good for x >= a + 1
double gamma_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double reg_lower_incomplete_gamma(double a, double x) {
    if (!(a > 0.0))
        throw std::invalid_argument("reg_lower_incomplete_gamma: a must be positive");
    if (!(x >= 0.0))
        throw std::invalid_argument("reg_lower_incomplete_gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_series(a, x) : 1.0 - gamma_cf(a, x);
}

double inv_reg_lower_incomplete_gamma(double a, double p) {
    if (!(a > 0.0))
        throw std::invalid_argument("inv_reg_lower_incomplete_gamma: a must be positive");
    if (!(p >= 0.0) || p >= 1.0)
        throw std::invalid_argument("inv_reg_lower_incomplete_gamma: p must lie in [0, 1)");
    if (p == 0.0) return 0.0;

    // bracket the root
    double lo = 0.0;
    double hi = a > 1.0 ? a : 1.0;
    while (reg_lower_incomplete_gamma(a, hi) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300)
            throw std::runtime_error("inv_reg_lower_incomplete_gamma: bracket failed");
    }

    // Newton on f(x) = P(a,x) - p, falling back to the midpoint whenever the
    // step leaves the bracket or the density underflows
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double f = reg_lower_incomplete_gamma(a, x) - p;
        if (f >= 0.0) hi = x; else lo = x;
        if (hi - lo < 1e-15 * (1.0 + hi)) break;

        double logpdf = (a - 1.0) * std::log(x) - x - std::lgamma(a);
        double xn;
        if (logpdf > -700.0) {
            xn = x - f * std::exp(-logpdf);
        } else {
            xn = 0.5 * (lo + hi);
        }
        if (!(xn > lo) || !(xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) < 1e-15 * (1.0 + x)) { x = xn; break; }
        x = xn;
    }
    return x;
}

} // namespace intsense
