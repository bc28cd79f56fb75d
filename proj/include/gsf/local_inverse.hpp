#pragma once

// Certified local inversion of generalized smooth functions in the sharp and
// Fermat topologies, the inverse Jacobian by the adjugate formula, and the
// difference-quotient check in the sharp norm.

#include "gsf/smooth_net.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gsf {

/// |det A| strictly positive, i.e. A invertible in L(rho-R^n, rho-R^n).
Verdict is_nondegenerate(const GenMatrix& a);

/// Dimensional constant of |det M| <= C ||M||^n used in the determinant lower bound.
double hadamard_constant(std::size_t n);

enum class CertKind { Sharp, Fermat };

const char* to_string(CertKind kind);

struct LocalInverseOptions {
  /// Starting radius of the halving search (per eps for sharp, real for Fermat).
  double initial_radius = 1.0;
  int max_halvings = 400;
  /// Newton target: residual <= rho^q_tol, then refinement until no progress.
  int q_tol = 10;
  int max_newton_steps = 200;
  int stagnation_steps = 10;
};

struct LocalCert {
  CertKind kind = CertKind::Sharp;
  GSF f;
  GenPoint x0;
  GenPoint y0;
  GenMatrix jac0;
  GenMatrix jac0_inv;
  GenNum a;             // ||Df(x0)^-1||
  GenNum b;             // 1 / (2a)
  GenNum c;             // a / (1 - ab) = 2a
  GenNum r;             // radius of U = B_r(x0)
  GenNum image_radius;  // r / c: B_{r/c}(y0) lies in f(U)
  double fermat_r = 0;  // Fermat kind: real radii with s < r / c
  double fermat_s = 0;
  double hadamard_c = 1;
  std::size_t probes_per_eps = 0;
  LocalInverseOptions options;
  std::string notes;
};

/// Thm-style sharp certificate: a per eps, b = 1/(2a), c = 2a, r by halving
/// until ||Df(x0) - Df(x)|| < b at every probe of B_{2r}(x0).
LocalCert sharp_ift_certificate(const GSF& f, const GenPoint& x0,
                                const LocalInverseOptions& options = {});

/// Fermat certificate with real radii; requires ||Df(x0)^-1|| <= k finite and
/// Df Fermat-continuous at x0.
LocalCert fermat_ift_certificate(const GSF& f, const GenPoint& x0, double k,
                                 const LocalInverseOptions& options = {});

struct NewtonTrace {
  double eps = 0;
  std::vector<double> log_residuals;  // natural log of ||f(x) - y|| per step
};

struct InverseResult {
  GenPoint x;
  GenNum residual;
  Verdict negligible;
  Verdict membership;
  std::vector<NewtonTrace> traces;
};

/// Damped Newton per eps from x0, projected into the certified ball U.
InverseResult local_inverse_eval(const LocalCert& cert, const GenPoint& y);

struct InverseJacobian {
  GenPoint x;         // f^-1(y)
  GenMatrix matrix;   // D(f^-1)(y) = adj(Df(x)) / det(Df(x))
  GenNum det;         // det Df(x)
  GenNum det_bound;   // 1 / (C c^n)
  bool detlow_ok = true;
};

/// Throws CertificateError if |det Df| drops below 1/(C c^n) at some grid point.
InverseJacobian inverse_jacobian(const LocalCert& cert, const GenPoint& y);

struct AfjRow {
  int k = 0;
  double numerator_valuation = 0;    // v(f(x_k) - f(x0) - Df(x0)(x_k - x0))
  double denominator_valuation = 0;  // v(x_k - x0)
  double quotient = 0;               // sharp-norm quotient
};

struct AfjReport {
  std::vector<AfjRow> rows;
  bool decreasing = false;
  double final_quotient = 0;
  double q = 0;            // fitted exponent in ||r||_e <= e^q ||x - x0||_e^2
  bool bound_holds = false;
  bool passed = false;     // strictly decreasing quotients
};

/// Quotients along x_k = x0 + [eps^k](1, ..., 1), k = 1..kmax. Gauge eps only.
AfjReport afj_differentiability_check(const GSF& f, const GenPoint& x0, int kmax = 8);

}  // namespace gsf
