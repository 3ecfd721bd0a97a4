#pragma once

namespace twistspec {

/// Power-series Bessel functions, adequate for arguments up to ~12.
double bessel_j0(double x);
double bessel_j1(double x);

/// First positive zero of J0, from the series plus Newton iterations
/// started at 2.4 (approximately 2.404825557695773).
double bessel_j0_first_zero();

}  // namespace twistspec
