#pragma once

// Generalized smooth functions: a net of smooth expressions f_eps : Omega_eps ->
// R^d together with a domain descriptor. Evaluation at a generalized point is
// componentwise on representatives; every certified evaluation also checks
// that the derivatives up to the certification order are moderate.

#include "gsf/gauge_ring.hpp"
#include "gsf/parser.hpp"
#include "gsf/sets_topology.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace gsf {

using MultiIndex = std::vector<int>;

/// Where the function is evaluated: the whole space, a sharp or Fermat ball,
/// or the compactly supported points of an open set.
enum class PointSetKind { All, SharpBall, FermatBall, Csp };

struct PointSet {
  PointSetKind kind = PointSetKind::All;
  std::optional<GenPoint> center;
  std::optional<GenNum> sharp_radius;
  double fermat_radius = 0.0;
};

class GSF {
 public:
  GSF(ContextPtr ctx, std::vector<Expr> components, std::size_t dim,
      std::optional<SetNet> domain = std::nullopt, std::string label = {});

  /// Components separated by ';' in the expression grammar.
  static GSF parse(ContextPtr ctx, std::string_view text,
                   const ParserOptions& options = ParserOptions::standard(),
                   std::optional<SetNet> domain = std::nullopt);

  const ContextPtr& context() const { return ctx_; }
  std::size_t dim() const { return dim_; }
  std::size_t codim() const { return comps_.size(); }
  const std::vector<Expr>& components() const { return comps_; }
  const Expr& component(std::size_t i) const { return comps_[i]; }
  const std::optional<SetNet>& domain() const { return domain_; }
  const std::string& label() const { return label_; }
  const PointSet& points() const { return points_; }
  int cert_order() const { return cert_order_; }

  GSF with_points(PointSet points) const;
  GSF with_cert_order(int k) const;
  GSF with_label(std::string label) const;

  /// d^alpha f_i as an expression; cached, safe for concurrent use.
  Expr derivative(std::size_t component, const MultiIndex& alpha) const;

  std::vector<Real> eval_at(std::size_t k, std::span<const Real> x) const;
  std::vector<double> eval_double(double eps, std::span<const double> x) const;
  RealMatrix jacobian_at(std::size_t k, std::span<const Real> x) const;
  /// Evaluates an arbitrary-eps slice (for probes off the grid).
  std::vector<Real> eval_eps(double eps, std::span<const Real> x) const;
  RealMatrix jacobian_eps(double eps, std::span<const Real> x) const;

 private:
  struct Cache {
    std::mutex mutex;
    std::map<std::pair<std::size_t, MultiIndex>, Expr> derivatives;
  };

  ContextPtr ctx_;
  std::vector<Expr> comps_;
  std::size_t dim_;
  std::optional<SetNet> domain_;
  std::string label_;
  PointSet points_;
  int cert_order_;
  std::shared_ptr<Cache> cache_;
};

/// All multi-indices of length n with 1 <= |alpha| <= order, graded.
std::vector<MultiIndex> multi_indices(std::size_t n, int order);

struct DerivativeCheck {
  std::size_t component = 0;
  MultiIndex alpha;
  Verdict moderate;
  double exponent = 0.0;
};

struct EvalCertificate {
  Verdict domain;
  std::vector<DerivativeCheck> derivatives;
};

struct EvalResult {
  GenPoint value;
  EvalCertificate certificate;
};

/// [f_eps(x_eps)] with the moderateness certificate of all d^alpha f, |alpha| <= K.
EvalResult gsf_eval(const GSF& f, const GenPoint& x);
/// Value only, without certificate (used on hot paths that certify elsewhere).
GenPoint gsf_value(const GSF& f, const GenPoint& x);

GSF differentiate(const GSF& f, const MultiIndex& alpha);
GenPoint directional_derivative(const GSF& f, const GenPoint& x, const GenPoint& v);
GenMatrix jacobian(const GSF& f, const GenPoint& x);

struct IncrementRow {
  GenNum h;
  GenNum residual;
  Verdict negligible;
};

struct IncrementReport {
  std::vector<IncrementRow> rows;
  bool ok = true;  // no residual decided non-negligible
};

/// Residuals of f(x + h v) - f(x) - h r(x, h), with r from the exact
/// derivative plus the second-order integral remainder (Gauss-Legendre in Real).
IncrementReport incremental_ratio_check(const GSF& f, const GenPoint& x, const GenPoint& v,
                                        const std::vector<GenNum>& hs);

/// f o g at the expression level; the range of g on probe points must lie in
/// the domain of f.
GSF compose(const GSF& f, const GSF& g);

struct LipschitzResult {
  Verdict verdict;
  GenNum constant;  // sampled Lipschitz constant L per eps
};

/// Sampled Lipschitz constant on a small ball around x: radius rho_eps (sharp)
/// or `fermat_radius` (Fermat). The Fermat kind also requires L finite.
LipschitzResult lipschitz_probe(const GSF& f, const GenPoint& x, BallKind kind,
                                double fermat_radius = 0.5);

/// x in csp(Omega): bounded by a real and at real distance from the complement.
Verdict is_compactly_supported(const GenPoint& x, const SetNet& omega);

}  // namespace gsf
