#include "twistspec/bessel.hpp"

#include <cmath>

namespace twistspec {

double bessel_j0(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 64; ++k) {
        term *= -q / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return sum;
}

double bessel_j1(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 64; ++k) {
        term *= -q / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return 0.5 * x * sum;
}

double bessel_j0_first_zero() {
    double x = 2.4;
    for (int it = 0; it < 64; ++it) {
        const double f = bessel_j0(x);
        const double df = -bessel_j1(x);
        const double step = f / df;
        x -= step;
        if (std::abs(step) < 1e-15) break;
    }
    return x;
}

}  // namespace twistspec
