#include "gsf/real.hpp"

#include <cstdio>

namespace gsf {

void ensure_real_range() {
  thread_local bool done = false;
  if (done) return;
  mpfr_set_emax(mpfr_get_emax_max());
  mpfr_set_emin(mpfr_get_emin_min());
  done = true;
}

double log_abs(const Real& x) {
  if (x == 0) return -std::numeric_limits<double>::infinity();
  if (boost::multiprecision::isinf(x)) return std::numeric_limits<double>::infinity();
  if (boost::multiprecision::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  long exponent = 0;
  double mantissa = mpfr_get_d_2exp(&exponent, x.backend().data(), MPFR_RNDN);
  return std::log(std::fabs(mantissa)) + static_cast<double>(exponent) * std::log(2.0);
}

Real real_pi() {
  ensure_real_range();
  static const Real pi = boost::math::constants::pi<Real>();
  return pi;
}

std::string to_string(const Real& x, int digits) {
  if (x == 0) return "0";
  double d = to_double(x);
  if (std::isfinite(d) && d != 0.0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, d);
    return buf;
  }
  // outside double range: mantissa * 2^exponent
  long exponent = 0;
  double mantissa = mpfr_get_d_2exp(&exponent, x.backend().data(), MPFR_RNDN);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.*g*2^%ld", digits, mantissa, exponent);
  return buf;
}

}  // namespace gsf
