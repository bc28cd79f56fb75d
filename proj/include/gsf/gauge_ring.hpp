#pragma once

// Generalized numbers over a gauge rho, sampled on a finite epsilon grid.
//
// A GenNum stores one representative net (x_eps) evaluated on the grid. All
// asymptotic statements ("for eps small") are decided on the grid tail, the
// tail_window smallest grid points, and come back as three-valued verdicts.
// Equality of generalized numbers is never structural: x = y means that
// is_negligible(x - y) holds.

#include "gsf/errors.hpp"
#include "gsf/expr.hpp"
#include "gsf/real.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gsf {

enum class GaugeKind { Eps, Exp };

/// The infinitesimal net rho. Two gauges are built in: rho_eps = eps and
/// rho_eps = exp(-1/eps).
class Gauge {
 public:
  static Gauge eps();
  static Gauge exp();
  /// "eps" or "exp".
  static Gauge from_name(std::string_view name);

  GaugeKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double log_rho(double eps) const;
  Real rho(double eps) const;

  bool operator==(const Gauge& other) const { return kind_ == other.kind_; }

 private:
  Gauge(GaugeKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}
  GaugeKind kind_;
  std::string name_;
};

/// Finite strictly decreasing sample of (0, 1]. The last tail_window points
/// are the ones asymptotic decisions look at.
class EpsGrid {
 public:
  EpsGrid(std::vector<double> points, std::size_t tail_window);
  /// eps_k = 2^-k for k = kmin..kmax.
  static EpsGrid dyadic(int kmin = 4, int kmax = 40, std::size_t tail_window = 8);

  std::span<const double> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t k) const { return points_[k]; }
  std::size_t tail_window() const { return tail_window_; }
  std::size_t tail_begin() const { return points_.size() - tail_window_; }

 private:
  std::vector<double> points_;
  std::size_t tail_window_;
};

struct Thresholds {
  int n_max = 100;              // moderateness bound rho^-N
  int m_max = 30;               // negligibility / invertibility search
  double zero_threshold = 0.0;  // |x_eps| at or below this counts as an exact zero
  double slack = 0.1;           // exponent-estimator stability band
  int cert_order = 3;           // derivative order K certified by gsf_eval
  int probes = 64;              // deterministic probe points per dimension
};

/// Gauge + grid + thresholds, with rho cached on the grid. Shared by every
/// GenNum built against it.
class Context {
 public:
  Context(Gauge gauge, EpsGrid grid, Thresholds thresholds = {});

  static std::shared_ptr<const Context> make(Gauge gauge = Gauge::eps(),
                                             EpsGrid grid = EpsGrid::dyadic(),
                                             Thresholds thresholds = {});

  const Gauge& gauge() const { return gauge_; }
  const EpsGrid& grid() const { return grid_; }
  const Thresholds& thresholds() const { return thresholds_; }
  std::size_t size() const { return grid_.size(); }
  double eps(std::size_t k) const { return grid_[k]; }
  const Real& rho(std::size_t k) const { return rho_[k]; }
  double log_rho(std::size_t k) const { return log_rho_[k]; }
  /// rho_eps^m as an exact-range Real.
  Real rho_pow(std::size_t k, double m) const;

 private:
  Gauge gauge_;
  EpsGrid grid_;
  Thresholds thresholds_;
  std::vector<Real> rho_;
  std::vector<double> log_rho_;
};

using ContextPtr = std::shared_ptr<const Context>;

enum class Truth { True, False, Indeterminate };

const char* to_string(Truth t);

struct Verdict {
  Truth value = Truth::Indeterminate;
  std::optional<double> witness;
  std::string diagnostics;

  static Verdict yes(double witness, std::string why = {});
  static Verdict no(double witness, std::string why = {});
  static Verdict unknown(std::string why);

  bool is_true() const { return value == Truth::True; }
  bool is_false() const { return value == Truth::False; }
  bool is_indeterminate() const { return value == Truth::Indeterminate; }
};

class GenNum {
 public:
  using Net = std::function<Real(double eps)>;

  GenNum(ContextPtr ctx, Net net);
  static GenNum from_samples(ContextPtr ctx, std::vector<Real> samples);
  static GenNum constant(ContextPtr ctx, double value);
  /// Net given as an expression in the single variable `eps`.
  static GenNum from_expr(ContextPtr ctx, const Expr& net);

  const ContextPtr& context() const { return ctx_; }
  const std::vector<Real>& samples() const { return samples_; }
  const Real& sample(std::size_t k) const { return samples_[k]; }
  double value(std::size_t k) const { return to_double(samples_[k]); }
  std::vector<double> values() const;
  /// Representative net; on grid points it reproduces the cached samples.
  Real at(double eps) const;
  bool has_net() const { return static_cast<bool>(net_); }

 private:
  GenNum(ContextPtr ctx, std::vector<Real> samples, Net net);
  ContextPtr ctx_;
  std::vector<Real> samples_;
  Net net_;
};

// ring operations: pointwise on representatives; inputs and results must not be
// decided non-moderate, division needs an invertible divisor.
GenNum operator+(const GenNum& x, const GenNum& y);
GenNum operator-(const GenNum& x, const GenNum& y);
GenNum operator*(const GenNum& x, const GenNum& y);
GenNum operator/(const GenNum& x, const GenNum& y);
GenNum operator-(const GenNum& x);
GenNum operator*(double a, const GenNum& x);
GenNum min(const GenNum& x, const GenNum& y);
GenNum max(const GenNum& x, const GenNum& y);
GenNum abs(const GenNum& x);
/// Pointwise map on samples (net composed when present). No moderateness check.
GenNum map(const GenNum& x, const std::function<Real(const Real&)>& f);

/// Thrown when dividing by an element that is not positive-invertible.
class NotInvertible : public DomainError {
 public:
  explicit NotInvertible(Verdict verdict);
  const Verdict& verdict() const { return verdict_; }

 private:
  Verdict verdict_;
};

struct ExponentEstimate {
  Verdict verdict;        // True: stable estimate; Indeterminate otherwise
  double exponent = 0.0;  // +inf when every tail sample is zero
  double spread = 0.0;    // max deviation from the median inside the window
};

ExponentEstimate exponent_estimate(const GenNum& x);
Verdict is_moderate(const GenNum& x);
Verdict is_negligible(const GenNum& x);
Verdict is_strictly_positive(const GenNum& x);
Verdict leq(const GenNum& x, const GenNum& y);
Verdict lt_sharp(const GenNum& x, const GenNum& y);
Verdict lt_fermat(const GenNum& x, const GenNum& y);
Verdict infinitely_close(const GenNum& x, const GenNum& y);

/// Order valuation sup{b : |x_eps| = O(eps^b)}; only for the gauge rho = eps.
double valuation(const GenNum& x);
/// exp(-valuation), 0 for negligible-zero nets.
double sharp_norm(const GenNum& x);

/// Throws DomainError unless both numbers share gauge and grid.
void require_same_context(const GenNum& x, const GenNum& y);

/// Generalized point of rho-R^n, componentwise nets.
class GenPoint {
 public:
  GenPoint() = default;
  explicit GenPoint(std::vector<GenNum> components);
  static GenPoint constant(ContextPtr ctx, std::span<const double> values);
  static GenPoint scalar(GenNum x);

  std::size_t dim() const { return comps_.size(); }
  const GenNum& operator[](std::size_t i) const { return comps_[i]; }
  const std::vector<GenNum>& components() const { return comps_; }
  const ContextPtr& context() const;
  /// Coordinates at grid index k.
  std::vector<Real> at(std::size_t k) const;
  std::vector<double> at_double(std::size_t k) const;
  /// Euclidean norm per eps.
  GenNum norm() const;

 private:
  std::vector<GenNum> comps_;
};

GenPoint operator+(const GenPoint& a, const GenPoint& b);
GenPoint operator-(const GenPoint& a, const GenPoint& b);
GenPoint operator*(const GenNum& s, const GenPoint& a);

/// Dense matrix over Real (one epsilon slice of a GenMatrix).
struct RealMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Real> data;

  RealMatrix() = default;
  RealMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, Real(0)) {}
  static RealMatrix identity(std::size_t n);
  Real& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const Real& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

RealMatrix operator*(const RealMatrix& a, const RealMatrix& b);
std::vector<Real> operator*(const RealMatrix& a, std::span<const Real> v);
Real determinant(const RealMatrix& a);
/// Adjugate (transposed cofactor matrix), computed from minors.
RealMatrix adjugate(const RealMatrix& a);
/// Gauss-Jordan inverse with partial pivoting; throws NumericError if singular.
RealMatrix inverse(const RealMatrix& a);
/// Largest singular value (scaled double SVD).
Real operator_norm(const RealMatrix& a);
Real max_abs_entry(const RealMatrix& a);

/// Matrix in L(rho-R^n, rho-R^d): one RealMatrix per grid point.
class GenMatrix {
 public:
  GenMatrix(ContextPtr ctx, std::vector<RealMatrix> slices);
  static GenMatrix diagonal(const std::vector<GenNum>& diag);
  static GenMatrix identity(ContextPtr ctx, std::size_t n);

  std::size_t rows() const { return slices_.front().rows; }
  std::size_t cols() const { return slices_.front().cols; }
  const ContextPtr& context() const { return ctx_; }
  const RealMatrix& at(std::size_t k) const { return slices_[k]; }
  GenNum entry(std::size_t i, std::size_t j) const;

 private:
  ContextPtr ctx_;
  std::vector<RealMatrix> slices_;
};

GenMatrix operator*(const GenMatrix& a, const GenMatrix& b);
GenPoint operator*(const GenMatrix& a, const GenPoint& v);
GenNum det(const GenMatrix& a);
GenMatrix inverse(const GenMatrix& a);
/// [||A_eps||], spectral norm per eps.
GenNum op_norm(const GenMatrix& a);

}  // namespace gsf
