#pragma once

// Mollifiers with vanishing moments and the embedding of distributions
// T -> [(T * psi^b_eps)(-)].
//
// A 1D mollifier is psi(x) = p(x) chi(x) with chi the unit bump. The
// polynomial solves the moment system int x^a psi = delta_{a0}, a = 0..j,
// optionally with int_{-1}^0 psi = d and psi(0) = 1 as extra rows.

#include "gsf/smooth_net.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gsf {

struct MollifierOptions {
  std::optional<double> d;  // prescribed mass on (-inf, 0]
  bool psi0 = false;        // impose psi(0) = 1
};

struct Mollifier1D {
  int j = 0;
  MollifierOptions options;
  std::vector<int> powers;          // monomials of the polynomial factor
  std::vector<double> coefficients; // matching coefficients
  std::vector<double> moment_residuals;  // |int x^a psi - delta_a0|, a = 0..j
  std::optional<double> d_residual;
  std::optional<double> psi0_residual;
  double l1_norm = 0;
  double condition = 0;

  double operator()(double x) const;
  double max_residual() const;
};

/// Solves the moment system (moments by 200-node Gauss-Legendre in high
/// precision). Throws NumericError when the condition estimate exceeds 1e12.
Mollifier1D build_mollifier(int j, const MollifierOptions& options = {});

struct MollifierNetOptions {
  int j_max = 10;
  MollifierOptions mollifier;
  /// b as an expression in eps; default eps^-1.
  std::optional<Expr> b;
};

/// psi_eps with the moment order schedule j(eps) = min(floor(log2(1/eps)), j_max)
/// and its concentration psi^b_eps(x) = b_eps^n psi_eps(b_eps x).
class MollifierNet {
 public:
  explicit MollifierNet(ContextPtr ctx, MollifierNetOptions options = {});

  const ContextPtr& context() const { return ctx_; }
  const MollifierNetOptions& options() const { return options_; }
  int j_at(double eps) const;
  const Mollifier1D& mollifier(int j) const;
  /// b as an expression in eps and as a generalized number.
  const Expr& b() const { return b_; }
  GenNum b_net() const;

  /// psi_eps(u) as an expression (coefficients are eps-dependent parameters).
  Expr psi(const Expr& u) const;
  /// psi^b_eps(u) = b psi_eps(b u).
  Expr kernel(const Expr& u) const;
  /// Tensor kernel in n variables: prod_i sqrt(n) psi(sqrt(n) b u_i) b.
  Expr kernel_nd(const std::vector<Expr>& u) const;

  /// Parser functions delta(u), ddelta(u) (= delta'), H(u) backed by this net.
  ParserOptions parser_options(ParserOptions base = ParserOptions::standard()) const;

 private:
  ContextPtr ctx_;
  MollifierNetOptions options_;
  Expr b_;
  std::vector<Mollifier1D> by_j_;
  std::map<int, std::shared_ptr<const ParamNet>> coeff_params_;
};

/// Group actions on test functions (expressions in x_0..x_{n-1}):
/// r . phi = r^-n phi(x / r),  a + phi = phi(x - a).
Expr scale_action(double r, const Expr& phi, std::size_t n = 1);
Expr translate_action(const std::vector<double>& a, const Expr& phi);

/// Finite combination of delta^(k)_a, H_a and regular functions.
struct DistTerm {
  enum class Kind { Delta, Heaviside, Regular } kind = Kind::Delta;
  double coefficient = 1.0;
  int order = 0;       // derivative order for Delta
  double at = 0.0;     // point a for Delta / Heaviside
  Expr f;              // Regular: function of x
  std::optional<std::pair<double, double>> window;  // Regular: compact window
};

struct DistSpec {
  std::vector<DistTerm> terms;

  static DistSpec delta(double a = 0.0, int order = 0);
  static DistSpec heaviside(double a = 0.0);
  static DistSpec regular(Expr f, std::optional<std::pair<double, double>> window = std::nullopt);
  /// Terms separated by '+', each optionally prefixed by "c*":
  /// delta@a, delta'@a, delta^(k)@a, H@a, regular(f)@[lo,hi], regular(f).
  static DistSpec parse(std::string_view text);
  DistSpec derivative() const;
  std::string to_string() const;
};

/// iota^b(T) as a GSF in one variable.
GSF embed(const DistSpec& t, const MollifierNet& net);

struct PairingRow {
  double eps = 0;
  double value = 0;
  double abs_error = 0;
};

struct PairingReport {
  double exact = 0;
  std::vector<PairingRow> rows;
  bool monotone = false;        // tail errors nonincreasing (above the noise floor)
  double final_error = 0;
  std::optional<double> rate;   // fitted exponent of the error in eps (tail)
  double noise_floor = 1e-13;
};

/// Tabulates int iota(T)_eps phi over the grid against <T, phi>. phi must be
/// supported in [support_lo, support_hi].
PairingReport pairing_limit(const DistSpec& t, const MollifierNet& net, const Expr& phi,
                            double support_lo, double support_hi);

struct CommutationReport {
  bool structural = false;   // d(iota T) and iota(dT) equivalent as expressions
  double max_abs_diff = 0;   // at probe points (scaled per eps)
  std::size_t probes = 0;
};

/// Compares d(iota T) with iota(dT) at interior probe points on the grid tail.
CommutationReport derivative_commutation_check(const DistSpec& t, const MollifierNet& net);

struct GrowthFit {
  int order = 0;
  double exponent = 0;  // fitted p with sup|d^a psi^b| ~ b^p
};

/// Fitted growth of sup |d^a psi^b_eps| in b on the tail, a = 0..max_order.
std::vector<GrowthFit> mollifier_derivative_growth(const MollifierNet& net, int max_order = 3);

}  // namespace gsf
