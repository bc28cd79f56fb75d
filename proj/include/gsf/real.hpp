#pragma once

// High-precision scalar used for every epsilon-sample of a generalized number.
//
// Samples are MPFR floats with ~1330 significant bits and the widest exponent
// range MPFR supports, so nets like exp(1/eps) at eps = 2^-40 or residuals far
// below rho^30 are represented exactly enough to decide moderateness and
// negligibility without leaving the linear domain.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace gsf {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<400>,
                                           boost::multiprecision::et_off>;

/// Widens the MPFR exponent range for the calling thread. Idempotent.
void ensure_real_range();

/// log|x| as a double; -inf for an exact zero. Never overflows.
double log_abs(const Real& x);

/// Nearest double; saturates to +-inf / 0 outside the double range.
inline double to_double(const Real& x) { return x.convert_to<double>(); }

inline bool is_zero(const Real& x) { return x == 0; }

Real real_pi();

std::string to_string(const Real& x, int digits = 17);

}  // namespace gsf
