#include "gsf/gauge_ring.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gsf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

bool counts_as_zero(const Context& ctx, const Real& x) {
  double t = ctx.thresholds().zero_threshold;
  return t > 0 ? abs(x) <= t : x == 0;
}

}  // namespace

// ---------------------------------------------------------------- Gauge

Gauge Gauge::eps() { return Gauge(GaugeKind::Eps, "eps"); }
Gauge Gauge::exp() { return Gauge(GaugeKind::Exp, "exp"); }

Gauge Gauge::from_name(std::string_view name) {
  if (name == "eps") return eps();
  if (name == "exp") return exp();
  throw DomainError("unknown gauge '" + std::string(name) + "' (expected eps or exp)");
}

double Gauge::log_rho(double e) const {
  return kind_ == GaugeKind::Eps ? std::log(e) : -1.0 / e;
}

Real Gauge::rho(double e) const {
  ensure_real_range();
  if (kind_ == GaugeKind::Eps) return Real(e);
  return boost::multiprecision::exp(Real(-1) / Real(e));
}

// ---------------------------------------------------------------- EpsGrid

EpsGrid::EpsGrid(std::vector<double> points, std::size_t tail_window)
    : points_(std::move(points)), tail_window_(tail_window) {
  if (points_.empty()) throw DomainError("epsilon grid is empty");
  if (tail_window_ == 0 || tail_window_ > points_.size())
    throw DomainError("tail_window must be in 1.." + std::to_string(points_.size()));
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i] > 0.0 && points_[i] <= 1.0))
      throw DomainError("grid points must lie in (0, 1]");
    if (i > 0 && !(points_[i] < points_[i - 1]))
      throw DomainError("grid points must be strictly decreasing");
  }
}

EpsGrid EpsGrid::dyadic(int kmin, int kmax, std::size_t tail_window) {
  if (kmin < 0 || kmax < kmin || kmax > 1000)
    throw DomainError("invalid dyadic grid bounds " + std::to_string(kmin) + ":" +
                      std::to_string(kmax));
  std::vector<double> pts;
  for (int k = kmin; k <= kmax; ++k) pts.push_back(std::ldexp(1.0, -k));
  return EpsGrid(std::move(pts), std::min<std::size_t>(tail_window, pts.size()));
}

// ---------------------------------------------------------------- Context

Context::Context(Gauge gauge, EpsGrid grid, Thresholds thresholds)
    : gauge_(std::move(gauge)), grid_(std::move(grid)), thresholds_(thresholds) {
  ensure_real_range();
  if (thresholds_.n_max < 0 || thresholds_.m_max < 1)
    throw DomainError("thresholds need n_max >= 0 and m_max >= 1");
  if (!(thresholds_.slack > 0)) throw DomainError("slack must be positive");
  rho_.reserve(grid_.size());
  log_rho_.reserve(grid_.size());
  for (double e : grid_.points()) {
    rho_.push_back(gauge_.rho(e));
    log_rho_.push_back(gauge_.log_rho(e));
  }
  for (std::size_t k = 1; k < rho_.size(); ++k)
    if (rho_[k] > rho_[k - 1]) throw DomainError("gauge is not nonincreasing on the grid");
  if (!(rho_.back() < 1)) throw DomainError("gauge does not tend to zero on the grid tail");
}

std::shared_ptr<const Context> Context::make(Gauge gauge, EpsGrid grid, Thresholds thresholds) {
  return std::make_shared<const Context>(std::move(gauge), std::move(grid), thresholds);
}

Real Context::rho_pow(std::size_t k, double m) const {
  ensure_real_range();
  if (m == std::floor(m) && std::fabs(m) < 1e6)
    return boost::multiprecision::pow(rho_[k], static_cast<long>(m));
  return boost::multiprecision::exp(Real(m) * boost::multiprecision::log(rho_[k]));
}

// ---------------------------------------------------------------- Verdict

const char* to_string(Truth t) {
  switch (t) {
    case Truth::True: return "true";
    case Truth::False: return "false";
    case Truth::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

Verdict Verdict::yes(double witness, std::string why) {
  return Verdict{Truth::True, witness, std::move(why)};
}
Verdict Verdict::no(double witness, std::string why) {
  return Verdict{Truth::False, witness, std::move(why)};
}
Verdict Verdict::unknown(std::string why) {
  return Verdict{Truth::Indeterminate, std::nullopt, std::move(why)};
}

// ---------------------------------------------------------------- GenNum

GenNum::GenNum(ContextPtr ctx, std::vector<Real> samples, Net net)
    : ctx_(std::move(ctx)), samples_(std::move(samples)), net_(std::move(net)) {
  if (!ctx_) throw DomainError("GenNum needs a context");
  if (samples_.size() != ctx_->size()) throw DomainError("sample count does not match grid");
}

GenNum::GenNum(ContextPtr ctx, Net net) : ctx_(std::move(ctx)), net_(std::move(net)) {
  if (!ctx_) throw DomainError("GenNum needs a context");
  ensure_real_range();
  samples_.reserve(ctx_->size());
  for (double e : ctx_->grid().points()) samples_.push_back(net_(e));
}

GenNum GenNum::from_samples(ContextPtr ctx, std::vector<Real> samples) {
  return GenNum(std::move(ctx), std::move(samples), Net{});
}

GenNum GenNum::constant(ContextPtr ctx, double value) {
  Real v(value);
  return GenNum(std::move(ctx), [v](double) { return v; });
}

GenNum GenNum::from_expr(ContextPtr ctx, const Expr& net) {
  if (max_free_var(net) >= 0) throw DomainError("a generalized number may only depend on eps");
  return GenNum(std::move(ctx), [net](double e) {
    std::vector<Real> none;
    return evaluate<Real>(net, e, std::span<const Real>(none));
  });
}

std::vector<double> GenNum::values() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(to_double(s));
  return out;
}

Real GenNum::at(double e) const {
  const auto pts = ctx_->grid().points();
  for (std::size_t k = 0; k < pts.size(); ++k)
    if (pts[k] == e) return samples_[k];
  if (!net_) throw DomainError("sample-only generalized number has no value off the grid");
  return net_(e);
}

void require_same_context(const GenNum& x, const GenNum& y) {
  if (x.context() == y.context()) return;
  const Context& a = *x.context();
  const Context& b = *y.context();
  if (!(a.gauge() == b.gauge())) throw DomainError("gauge mismatch");
  auto pa = a.grid().points();
  auto pb = b.grid().points();
  if (!std::equal(pa.begin(), pa.end(), pb.begin(), pb.end()) ||
      a.grid().tail_window() != b.grid().tail_window())
    throw DomainError("epsilon grid mismatch");
}

namespace {

GenNum combine(const GenNum& x, const GenNum& y, Real (*op)(const Real&, const Real&)) {
  require_same_context(x, y);
  std::vector<Real> s(x.samples().size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = op(x.sample(k), y.sample(k));
  if (x.has_net() && y.has_net()) {
    auto ctx = x.context();
    return GenNum(ctx, [x, y, op](double e) { return op(x.at(e), y.at(e)); });
  }
  return GenNum::from_samples(x.context(), std::move(s));
}

void require_moderate(const GenNum& x, const char* role) {
  Verdict v = is_moderate(x);
  if (v.is_false())
    throw DomainError(std::string(role) + " is not moderate: " + v.diagnostics);
}

GenNum checked(const GenNum& x, const GenNum& y, Real (*op)(const Real&, const Real&)) {
  require_moderate(x, "left operand");
  require_moderate(y, "right operand");
  GenNum r = combine(x, y, op);
  require_moderate(r, "result");
  return r;
}

Real add_(const Real& a, const Real& b) { return a + b; }
Real sub_(const Real& a, const Real& b) { return a - b; }
Real mul_(const Real& a, const Real& b) { return a * b; }
Real div_(const Real& a, const Real& b) { return a / b; }
Real min_(const Real& a, const Real& b) { return a < b ? a : b; }
Real max_(const Real& a, const Real& b) { return a < b ? b : a; }

// sample-level helpers without moderateness checks, used inside decisions
GenNum raw_sub(const GenNum& x, const GenNum& y) {
  require_same_context(x, y);
  std::vector<Real> s(x.samples().size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = x.sample(k) - y.sample(k);
  return GenNum::from_samples(x.context(), std::move(s));
}

}  // namespace

GenNum operator+(const GenNum& x, const GenNum& y) { return checked(x, y, add_); }
GenNum operator-(const GenNum& x, const GenNum& y) { return checked(x, y, sub_); }
GenNum operator*(const GenNum& x, const GenNum& y) { return checked(x, y, mul_); }
GenNum min(const GenNum& x, const GenNum& y) { return checked(x, y, min_); }
GenNum max(const GenNum& x, const GenNum& y) { return checked(x, y, max_); }

GenNum operator/(const GenNum& x, const GenNum& y) {
  Verdict v = is_strictly_positive(abs(y));
  if (!v.is_true()) throw NotInvertible(v);
  return checked(x, y, div_);
}

GenNum operator-(const GenNum& x) {
  return map(x, [](const Real& a) { return Real(-a); });
}

GenNum operator*(double a, const GenNum& x) {
  Real r(a);
  return map(x, [r](const Real& v) { return Real(r * v); });
}

GenNum abs(const GenNum& x) {
  return map(x, [](const Real& a) { return Real(boost::multiprecision::abs(a)); });
}

GenNum map(const GenNum& x, const std::function<Real(const Real&)>& f) {
  if (x.has_net()) return GenNum(x.context(), [x, f](double e) { return f(x.at(e)); });
  std::vector<Real> s;
  s.reserve(x.samples().size());
  for (const auto& v : x.samples()) s.push_back(f(v));
  return GenNum::from_samples(x.context(), std::move(s));
}

NotInvertible::NotInvertible(Verdict verdict)
    : DomainError("divisor is not invertible (" + std::string(to_string(verdict.value)) +
                  "): " + verdict.diagnostics),
      verdict_(std::move(verdict)) {}

// ---------------------------------------------------------------- decisions

ExponentEstimate exponent_estimate(const GenNum& x) {
  const Context& ctx = *x.context();
  const std::size_t t0 = ctx.grid().tail_begin();
  const std::size_t n = ctx.size();
  ExponentEstimate out;
  std::size_t zeros = 0;
  std::vector<double> ratios;
  for (std::size_t k = t0; k < n; ++k) {
    if (counts_as_zero(ctx, x.sample(k))) {
      ++zeros;
      continue;
    }
    ratios.push_back(log_abs(x.sample(k)) / ctx.log_rho(k));
  }
  if (zeros == n - t0) {
    out.exponent = kInf;
    out.verdict = Verdict::yes(kInf, "all tail samples are zero");
    return out;
  }
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  std::size_t m = sorted.size();
  double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  double spread = 0;
  for (double r : ratios) spread = std::max(spread, std::fabs(r - median));
  out.exponent = median;
  out.spread = spread;
  if (zeros > 0) {
    out.verdict = Verdict::unknown(std::to_string(zeros) + " zero sample(s) in the tail");
  } else if (spread <= ctx.thresholds().slack) {
    out.verdict = Verdict::yes(median, "spread " + fmt(spread));
  } else {
    out.verdict = Verdict::unknown("unstable exponent: spread " + fmt(spread) + " exceeds slack");
  }
  return out;
}

Verdict is_moderate(const GenNum& x) {
  const Context& ctx = *x.context();
  const int n_max = ctx.thresholds().n_max;
  const double slack = ctx.thresholds().slack;
  int witness = 0;
  std::size_t beyond = 0;
  const std::size_t t0 = ctx.grid().tail_begin();
  for (std::size_t k = t0; k < ctx.size(); ++k) {
    const Real& v = x.sample(k);
    if (boost::multiprecision::isnan(v)) return Verdict::unknown("NaN sample in the tail");
    if (counts_as_zero(ctx, v)) continue;
    // |x| <= rho^-(N + slack)  <=>  log|x| <= -(N + slack) log rho
    double needed = log_abs(v) / (-ctx.log_rho(k)) - slack;
    if (needed > n_max) {
      ++beyond;
      continue;
    }
    witness = std::max(witness, static_cast<int>(std::ceil(std::max(needed, 0.0) - 1e-12)));
  }
  std::size_t window = ctx.size() - t0;
  if (beyond == 0)
    return Verdict::yes(witness, "|x| <= rho^-" + std::to_string(witness) + " on the tail");
  if (beyond == window)
    return Verdict::no(n_max, "|x| > rho^-" + std::to_string(n_max) + " on the whole tail");
  return Verdict::unknown(std::to_string(beyond) + " of " + std::to_string(window) +
                          " tail samples exceed rho^-N_max");
}

Verdict is_negligible(const GenNum& x) {
  const Context& ctx = *x.context();
  const int m_max = ctx.thresholds().m_max;
  const std::size_t t0 = ctx.grid().tail_begin();
  bool all_small = true;
  for (std::size_t k = t0; k < ctx.size() && all_small; ++k)
    if (!counts_as_zero(ctx, x.sample(k)) && abs(x.sample(k)) > ctx.rho_pow(k, m_max))
      all_small = false;
  if (all_small)
    return Verdict::yes(m_max, "|x| <= rho^" + std::to_string(m_max) + " on the tail");
  for (int m = 1; m <= m_max; ++m) {
    bool persistent = true;
    for (std::size_t k = t0; k < ctx.size() && persistent; ++k)
      if (!(abs(x.sample(k)) > ctx.rho_pow(k, m))) persistent = false;
    if (persistent)
      return Verdict::no(m, "|x| > rho^" + std::to_string(m) + " on the whole tail");
  }
  return Verdict::unknown("tail samples straddle rho^m for every tested m");
}

Verdict is_strictly_positive(const GenNum& x) {
  const Context& ctx = *x.context();
  const int m_max = ctx.thresholds().m_max;
  const std::size_t t0 = ctx.grid().tail_begin();
  Verdict neg = is_negligible(x);
  if (neg.is_true()) return Verdict::no(m_max, "x is negligible");
  if (is_moderate(x).is_false()) return Verdict::unknown("x is not moderate, so it has no class in the ring");
  std::size_t nonpositive = 0;
  for (std::size_t k = t0; k < ctx.size(); ++k)
    if (x.sample(k) <= 0 || counts_as_zero(ctx, x.sample(k))) ++nonpositive;
  bool last_nonpositive = x.samples().back() <= 0 || counts_as_zero(ctx, x.samples().back());
  if (nonpositive >= 2 || last_nonpositive)
    return Verdict::no(static_cast<double>(nonpositive),
                       std::to_string(nonpositive) + " nonpositive tail sample(s)");
  if (nonpositive == 0) {
    for (int m = 0; m <= m_max; ++m) {
      bool ok = true;
      for (std::size_t k = t0; k < ctx.size() && ok; ++k)
        if (!(x.sample(k) > ctx.rho_pow(k, m))) ok = false;
      if (ok) return Verdict::yes(m, "x > rho^" + std::to_string(m) + " on the tail");
    }
  }
  return Verdict::unknown("no m <= m_max with x > rho^m on the whole tail");
}

Verdict leq(const GenNum& x, const GenNum& y) {
  GenNum d = raw_sub(x, y);
  GenNum pos = map(d, [](const Real& v) { return v > 0 ? v : Real(0); });
  Verdict v = is_negligible(pos);
  v.diagnostics = "(x - y)_+ : " + v.diagnostics;
  return v;
}

Verdict lt_sharp(const GenNum& x, const GenNum& y) {
  Verdict v = is_strictly_positive(raw_sub(y, x));
  v.diagnostics = "y - x : " + v.diagnostics;
  return v;
}

namespace {

// Least-squares slope of log|x| against log rho on the tail, with the largest
// residual of the fit. Zero samples are skipped.
struct Slope {
  double slope = 0;
  double residual = 0;
  std::size_t used = 0;
};

Slope tail_slope(const GenNum& x) {
  const Context& ctx = *x.context();
  std::vector<double> u, w;
  for (std::size_t k = ctx.grid().tail_begin(); k < ctx.size(); ++k) {
    if (counts_as_zero(ctx, x.sample(k))) continue;
    u.push_back(ctx.log_rho(k));
    w.push_back(log_abs(x.sample(k)));
  }
  Slope s;
  s.used = u.size();
  if (u.size() < 2) return s;
  double mu = std::accumulate(u.begin(), u.end(), 0.0) / u.size();
  double mw = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
  double suu = 0, suw = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suw += (u[i] - mu) * (w[i] - mw);
  }
  s.slope = suu > 0 ? suw / suu : 0;
  double scale = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double fit = mw + s.slope * (u[i] - mu);
    scale = std::max(scale, std::fabs(u[i]));
    s.residual = std::max(s.residual, std::fabs(w[i] - fit));
  }
  // residual measured in exponent units so it is comparable with slack
  s.residual = scale > 0 ? s.residual / scale : 0;
  return s;
}

// True: infinitesimal; False: bounded away from zero; with the fitted order.
Verdict infinitesimal(const GenNum& d) {
  const Context& ctx = *d.context();
  const double slack = ctx.thresholds().slack;
  Verdict neg = is_negligible(d);
  if (neg.is_true()) return Verdict::yes(kInf, "difference is negligible");
  Slope s = tail_slope(d);
  if (s.used < 2) return Verdict::unknown("too few nonzero tail samples");
  if (s.residual > slack)
    return Verdict::unknown("unstable order: fit residual " + fmt(s.residual));
  if (s.slope > slack) return Verdict::yes(s.slope, "order " + fmt(s.slope) + " > 0");
  return Verdict::no(s.slope, "order " + fmt(s.slope) + " <= 0");
}

}  // namespace

Verdict infinitely_close(const GenNum& x, const GenNum& y) {
  return infinitesimal(raw_sub(x, y));
}

Verdict lt_fermat(const GenNum& x, const GenNum& y) {
  GenNum d = raw_sub(y, x);
  Verdict pos = is_strictly_positive(d);
  if (pos.is_false()) return Verdict::no(0.0, "y - x is not positive: " + pos.diagnostics);
  Verdict inf = infinitesimal(d);
  if (inf.is_true()) return Verdict::no(*inf.witness, "y - x is infinitesimal");
  if (pos.is_true() && inf.is_false()) {
    const Context& ctx = *d.context();
    double r = kInf;
    for (std::size_t k = ctx.grid().tail_begin(); k < ctx.size(); ++k)
      r = std::min(r, to_double(d.sample(k)));
    return Verdict::yes(r, "y - x >= " + fmt(r) + " on the tail");
  }
  return Verdict::unknown("positivity: " + pos.diagnostics + "; order: " + inf.diagnostics);
}

double valuation(const GenNum& x) {
  if (x.context()->gauge().kind() != GaugeKind::Eps)
    throw DomainError("valuation is defined only for the gauge rho = eps");
  return exponent_estimate(x).exponent;
}

double sharp_norm(const GenNum& x) {
  double v = valuation(x);
  return std::isinf(v) && v > 0 ? 0.0 : std::exp(-v);
}

// ---------------------------------------------------------------- GenPoint

GenPoint::GenPoint(std::vector<GenNum> components) : comps_(std::move(components)) {
  for (std::size_t i = 1; i < comps_.size(); ++i) require_same_context(comps_[0], comps_[i]);
}

GenPoint GenPoint::constant(ContextPtr ctx, std::span<const double> values) {
  std::vector<GenNum> c;
  for (double v : values) c.push_back(GenNum::constant(ctx, v));
  return GenPoint(std::move(c));
}

GenPoint GenPoint::scalar(GenNum x) { return GenPoint(std::vector<GenNum>{std::move(x)}); }

const ContextPtr& GenPoint::context() const {
  if (comps_.empty()) throw DomainError("empty generalized point");
  return comps_.front().context();
}

std::vector<Real> GenPoint::at(std::size_t k) const {
  std::vector<Real> v;
  v.reserve(comps_.size());
  for (const auto& c : comps_) v.push_back(c.sample(k));
  return v;
}

std::vector<double> GenPoint::at_double(std::size_t k) const {
  std::vector<double> v;
  v.reserve(comps_.size());
  for (const auto& c : comps_) v.push_back(c.value(k));
  return v;
}

GenNum GenPoint::norm() const {
  const auto& ctx = context();
  std::vector<Real> s(ctx->size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    Real acc = 0;
    for (const auto& c : comps_) acc += c.sample(k) * c.sample(k);
    s[k] = boost::multiprecision::sqrt(acc);
  }
  return GenNum::from_samples(ctx, std::move(s));
}

GenPoint operator+(const GenPoint& a, const GenPoint& b) {
  if (a.dim() != b.dim()) throw DomainError("dimension mismatch");
  std::vector<GenNum> c;
  for (std::size_t i = 0; i < a.dim(); ++i) c.push_back(a[i] + b[i]);
  return GenPoint(std::move(c));
}

GenPoint operator-(const GenPoint& a, const GenPoint& b) {
  if (a.dim() != b.dim()) throw DomainError("dimension mismatch");
  std::vector<GenNum> c;
  for (std::size_t i = 0; i < a.dim(); ++i) c.push_back(a[i] - b[i]);
  return GenPoint(std::move(c));
}

GenPoint operator*(const GenNum& s, const GenPoint& a) {
  std::vector<GenNum> c;
  for (std::size_t i = 0; i < a.dim(); ++i) c.push_back(s * a[i]);
  return GenPoint(std::move(c));
}

// ---------------------------------------------------------------- RealMatrix

RealMatrix RealMatrix::identity(std::size_t n) {
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RealMatrix operator*(const RealMatrix& a, const RealMatrix& b) {
  if (a.cols != b.rows) throw DomainError("matrix dimension mismatch");
  RealMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j) {
      Real acc = 0;
      for (std::size_t l = 0; l < a.cols; ++l) acc += a(i, l) * b(l, j);
      c(i, j) = acc;
    }
  return c;
}

std::vector<Real> operator*(const RealMatrix& a, std::span<const Real> v) {
  if (a.cols != v.size()) throw DomainError("matrix-vector dimension mismatch");
  std::vector<Real> out(a.rows, Real(0));
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) out[i] += a(i, j) * v[j];
  return out;
}

Real determinant(const RealMatrix& a) {
  if (a.rows != a.cols) throw DomainError("determinant of a non-square matrix");
  const std::size_t n = a.rows;
  RealMatrix m = a;
  Real det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs(m(r, c)) > abs(m(p, c))) p = r;
    if (m(p, c) == 0) return Real(0);
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      Real f = m(r, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return det;
}

RealMatrix adjugate(const RealMatrix& a) {
  if (a.rows != a.cols) throw DomainError("adjugate of a non-square matrix");
  const std::size_t n = a.rows;
  RealMatrix adj(n, n);
  if (n == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      RealMatrix minor(n - 1, n - 1);
      for (std::size_t r = 0, mr = 0; r < n; ++r) {
        if (r == i) continue;
        for (std::size_t c = 0, mc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(mr, mc++) = a(r, c);
        }
        ++mr;
      }
      Real cof = determinant(minor);
      adj(j, i) = ((i + j) % 2 == 0) ? cof : Real(-cof);
    }
  return adj;
}

RealMatrix inverse(const RealMatrix& a) {
  if (a.rows != a.cols) throw DomainError("inverse of a non-square matrix");
  const std::size_t n = a.rows;
  RealMatrix m = a;
  RealMatrix inv = RealMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs(m(r, c)) > abs(m(p, c))) p = r;
    if (m(p, c) == 0) throw NumericError("singular matrix");
    if (p != c)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(p, j), m(c, j));
        std::swap(inv(p, j), inv(c, j));
      }
    Real piv = m(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      m(c, j) /= piv;
      inv(c, j) /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m(r, c) == 0) continue;
      Real f = m(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        m(r, j) -= f * m(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

Real max_abs_entry(const RealMatrix& a) {
  Real m = 0;
  for (const auto& v : a.data) m = std::max(m, Real(abs(v)));
  return m;
}

Real operator_norm(const RealMatrix& a) {
  Real scale = max_abs_entry(a);
  if (scale == 0) return Real(0);
  if (a.rows == 1 || a.cols == 1) {
    Real acc = 0;
    for (const auto& v : a.data) acc += v * v;
    return boost::multiprecision::sqrt(acc);
  }
  Eigen::MatrixXd m(a.rows, a.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) m(i, j) = to_double(Real(a(i, j) / scale));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return Real(svd.singularValues()(0)) * scale;
}

// ---------------------------------------------------------------- GenMatrix

GenMatrix::GenMatrix(ContextPtr ctx, std::vector<RealMatrix> slices)
    : ctx_(std::move(ctx)), slices_(std::move(slices)) {
  if (!ctx_ || slices_.size() != ctx_->size())
    throw DomainError("generalized matrix needs one slice per grid point");
}

GenMatrix GenMatrix::diagonal(const std::vector<GenNum>& diag) {
  if (diag.empty()) throw DomainError("empty diagonal");
  auto ctx = diag.front().context();
  std::vector<RealMatrix> s(ctx->size(), RealMatrix(diag.size(), diag.size()));
  for (std::size_t k = 0; k < s.size(); ++k)
    for (std::size_t i = 0; i < diag.size(); ++i) s[k](i, i) = diag[i].sample(k);
  return GenMatrix(ctx, std::move(s));
}

GenMatrix GenMatrix::identity(ContextPtr ctx, std::size_t n) {
  std::vector<RealMatrix> s(ctx->size(), RealMatrix::identity(n));
  return GenMatrix(std::move(ctx), std::move(s));
}

GenNum GenMatrix::entry(std::size_t i, std::size_t j) const {
  std::vector<Real> s;
  s.reserve(slices_.size());
  for (const auto& m : slices_) s.push_back(m(i, j));
  return GenNum::from_samples(ctx_, std::move(s));
}

GenMatrix operator*(const GenMatrix& a, const GenMatrix& b) {
  std::vector<RealMatrix> s;
  for (std::size_t k = 0; k < a.context()->size(); ++k) s.push_back(a.at(k) * b.at(k));
  return GenMatrix(a.context(), std::move(s));
}

GenPoint operator*(const GenMatrix& a, const GenPoint& v) {
  if (a.cols() != v.dim()) throw DomainError("matrix-point dimension mismatch");
  std::vector<std::vector<Real>> comp(a.rows(), std::vector<Real>(a.context()->size()));
  for (std::size_t k = 0; k < a.context()->size(); ++k) {
    auto x = v.at(k);
    auto y = a.at(k) * std::span<const Real>(x);
    for (std::size_t i = 0; i < a.rows(); ++i) comp[i][k] = y[i];
  }
  std::vector<GenNum> out;
  for (auto& c : comp) out.push_back(GenNum::from_samples(a.context(), std::move(c)));
  return GenPoint(std::move(out));
}

GenNum det(const GenMatrix& a) {
  std::vector<Real> s;
  for (std::size_t k = 0; k < a.context()->size(); ++k) s.push_back(determinant(a.at(k)));
  return GenNum::from_samples(a.context(), std::move(s));
}

GenMatrix inverse(const GenMatrix& a) {
  Verdict v = is_strictly_positive(abs(det(a)));
  if (!v.is_true()) throw NotInvertible(v);
  std::vector<RealMatrix> s;
  for (std::size_t k = 0; k < a.context()->size(); ++k) {
    RealMatrix inv;
    try {
      inv = inverse(a.at(k));
    } catch (const NumericError&) {
      // singular off the tail: the generalized inverse only sees small eps
      inv = RealMatrix(a.rows(), a.cols());
    }
    s.push_back(std::move(inv));
  }
  return GenMatrix(a.context(), std::move(s));
}

GenNum op_norm(const GenMatrix& a) {
  std::vector<Real> s;
  for (std::size_t k = 0; k < a.context()->size(); ++k) s.push_back(operator_norm(a.at(k)));
  return GenNum::from_samples(a.context(), std::move(s));
}

}  // namespace gsf
