#pragma once

// Global inversion: uniform positivity exponents, the one-dimensional theorem
// via a cutoff-modified monotone net, Hadamard properness certificates,
// Hadamard-Levy bounds, and a continuation-based global inverse evaluator.

#include "gsf/local_inverse.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gsf {

/// Scalar map applied to f_eps(x) before the positivity test; default: Euclidean norm.
using Scalarization = std::function<Real(std::span<const Real>)>;

/// Smallest integer q <= m_max with min over sampled x in A_eps of b(f_eps(x)) > rho^q
/// on the tail. Throws CertificateError if pointwise positivity fails at a
/// probe point or no q works.
int uniform_positivity_exponent(const GSF& f, const SetNet& a, Scalarization b = {});

/// n(eps) = min(ceil(log2(1/eps)), 8).
int default_n_schedule(double eps);

struct MonotoneNet {
  GSF fbar;
  int sign = 1;              // sign of f' on the scheduled intervals
  double outside_slope = 1;  // |fbar'| outside [-n, n]
  std::function<int(double)> n_schedule;
  std::vector<int> q;        // uniform positivity exponent on [-m, m], m = 1..max n + 1
};

/// fbar_eps(x) = f_eps(0) + s x + int_0^x (f_eps' - s) phi_{n+1} with n = n(eps),
/// phi_m = 1 on [-(m-1), m-1], supp phi_m in [-m, m], s = sign * max(1, r).
/// fbar = f on [-n, n]; the sign of f' is checked on [-(n+1), n+1].
MonotoneNet build_monotone_net_1d(const GSF& f, double r = 0.0,
                                  std::function<int(double)> n_schedule = default_n_schedule);

enum class GlobalKind { OneD, Hadamard, HadamardLevy };

const char* to_string(GlobalKind kind);

struct PropernessRow {
  double radius = 0;
  double inf_norm = 0;  // inf over eps <= eps' and |x| = radius of ||f_eps(x)||
};

struct BetaSpec {
  enum class Kind { Constant, Affine } kind = Kind::Constant;
  double a = 1;  // constant C, or a in a + b s
  double b = 0;
};

struct GlobalCert {
  GlobalKind kind = GlobalKind::OneD;
  GSF f;
  std::optional<MonotoneNet> monotone;      // OneD
  double r = 0;                             // OneD: lower bound on |f'|
  double c_f0 = 0;                          // C with ||f_eps(0)|| <= C
  bool surjective = false;                  // onto compactly supported points
  std::vector<PropernessRow> properness;    // Hadamard
  double eps_prime = 0;
  double bound_m = 0;                       // requested properness bound M
  std::optional<double> plateau_radius;
  std::optional<BetaSpec> beta;             // HadamardLevy
  double measured_c = 0;                    // max sampled ||Df^-1||
  bool passed = false;
  std::string notes;
};

/// One-dimensional theorem: |f'| > r (r = 0 allowed) on compactly supported probes.
GlobalCert global_1d_certificate(const GSF& f, double r);

struct HadamardOptions {
  int j_max = 10;        // radii R_j = 2^j, j = 0..j_max
  double bound_m = 100;  // properness target M
};

GlobalCert hadamard_certificate(const GSF& f, const HadamardOptions& options = {});

/// ||Df_eps(x)^-1|| <= beta_eps(||x||) on probes; constant beta certifies surjectivity.
GlobalCert hadamard_levy_certificate(const GSF& f, const BetaSpec& beta);

struct GlobalInverseResult {
  GenPoint x;
  GenNum residual;          // ||f(x) - y||
  Verdict negligible;
  bool bound_ok = true;     // eq:C (1D, r > 0) or ||g(y)|| <= C ||y - f(0)|| (constant beta)
  std::optional<double> compact_radius;  // K' from the properness table
  std::vector<Verdict> derivative_moderate;  // inverse derivatives of order 1..3 (1D) or 1
  std::vector<int> homotopy_steps;           // per eps (Hadamard kinds)
  bool in_agreement_zone = true;  // 1D: every g_eps(y_eps) lies where fbar = f
};

GlobalInverseResult global_inverse_eval(const GlobalCert& cert, const GenPoint& y);

}  // namespace gsf
