#pragma once

// Nets of sets (A_eps) with exact distance oracles, and the membership tests
// for sharp/Fermat balls, internal sets [A_eps] and strongly internal sets
// <A_eps>. Membership reduces to distances: x is in [A_eps] when d(x_eps, A_eps)
// is negligible, and in <A_eps> when d(x_eps, complement) > rho_eps^q.

#include "gsf/gauge_ring.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gsf {

class SetNet {
 public:
  using SignedDistance = std::function<Real(double eps, std::span<const Real> p)>;
  using Sampler = std::function<std::vector<std::vector<Real>>(double eps, std::size_t count)>;

  /// Axis-aligned box prod [lo_i, hi_i]; bounds are expressions in eps and may be +-inf.
  static SetNet box(std::vector<Expr> lo, std::vector<Expr> hi, bool closed = true);
  static SetNet ball(std::vector<Expr> center, Expr radius, bool closed = false);
  /// Finite union. Inside, the signed distance is the max over members, which
  /// is exact for separated members and a lower bound otherwise.
  static SetNet unite(std::vector<SetNet> members);
  /// User-supplied 1-Lipschitz signed distance (positive inside).
  static SetNet custom(std::size_t dim, SignedDistance sd, Sampler sampler, bool closed,
                       std::string label);

  std::size_t dim() const;
  const std::string& label() const;
  bool closed() const;

  /// Positive inside (distance to the complement), negative outside (minus
  /// the distance to the set). Boundary points give 0.
  Real signed_distance(double eps, std::span<const Real> p) const;
  Real distance_to(double eps, std::span<const Real> p) const;
  Real distance_to_complement(double eps, std::span<const Real> p) const;
  bool contains(double eps, std::span<const Real> p) const;
  /// Deterministic sample of points of A_eps: vertices/extremes when they
  /// belong to the set, then a Halton sequence.
  std::vector<std::vector<Real>> sample_points(double eps, std::size_t count) const;
  /// sup |x| over A_eps, +inf when unbounded.
  Real sup_norm(double eps) const;
  /// Same set with its closure flag set.
  SetNet closure() const;

  struct Impl;

 private:
  explicit SetNet(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Parses `box(a, b)`, `box(a1, b1, a2, b2, ...)`, `obox(...)`, `ball(c, r)`,
/// `ball(c1, ..., cn, r)`, `cball(...)`, `union(S1, S2, ...)`; bounds are
/// expressions in eps and may use `inf`.
SetNet parse_set(std::string_view text);

enum class BallKind { Sharp, Fermat };

Verdict ball_membership(const GenPoint& x, const GenPoint& c, const GenNum& r, BallKind kind);
Verdict ball_membership(const GenPoint& x, const GenPoint& c, double r);

/// [d(x_eps, A_eps)] on the grid.
GenNum distance_net(const GenPoint& x, const SetNet& a);
GenNum complement_distance_net(const GenPoint& x, const SetNet& a);

Verdict internal_membership(const GenPoint& x, const SetNet& a);
Verdict strongly_internal_membership(const GenPoint& x, const SetNet& a);

struct Boundedness {
  Verdict verdict;
  std::optional<GenNum> radius;  // moderate r with A_eps inside B_r(0) on the tail
};

Boundedness is_sharply_bounded(const ContextPtr& ctx, const SetNet& a);
/// Sampled check that B_eps is inside Omega_eps on the grid tail; B must be
/// sharply bounded.
Verdict eps_inclusion(const ContextPtr& ctx, const SetNet& b, const SetNet& omega,
                      std::size_t points_per_dim = 64);

/// Point i of the d-dimensional Halton sequence in [0, 1]^d.
std::vector<double> halton(std::size_t index, std::size_t dim);

}  // namespace gsf
