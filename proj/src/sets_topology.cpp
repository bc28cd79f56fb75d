#include "gsf/sets_topology.hpp"

#include "gsf/parser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gsf {

namespace {

enum class Shape { Box, Ball, Union, Custom };

Real eval_eps(const Expr& e, double eps) {
  std::vector<Real> none;
  return evaluate<Real>(e, eps, std::span<const Real>(none));
}

Real real_inf() { return Real(std::numeric_limits<double>::infinity()); }

}  // namespace

struct SetNet::Impl {
  Shape shape = Shape::Box;
  std::size_t dim = 1;
  bool closed = true;
  std::string label;
  std::vector<Expr> lo, hi;       // box
  std::vector<Expr> center;       // ball
  Expr radius;                    // ball
  std::vector<SetNet> members;    // union
  SignedDistance custom_sd;       // custom
  Sampler custom_sampler;         // custom
};

std::vector<double> halton(std::size_t index, std::size_t dim) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,
                               37, 41, 43, 47, 53, 59, 61, 67, 71, 73};
  if (dim > std::size(primes)) throw DomainError("Halton sequence supports up to 21 dimensions");
  std::vector<double> out(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    double f = 1, r = 0;
    std::size_t i = index + 1;
    while (i > 0) {
      f /= primes[d];
      r += f * static_cast<double>(i % primes[d]);
      i /= primes[d];
    }
    out[d] = r;
  }
  return out;
}

SetNet SetNet::box(std::vector<Expr> lo, std::vector<Expr> hi, bool closed) {
  if (lo.empty() || lo.size() != hi.size()) throw DomainError("box needs matching bound lists");
  auto impl = std::make_shared<Impl>();
  impl->shape = Shape::Box;
  impl->dim = lo.size();
  impl->closed = closed;
  impl->label = closed ? "box(" : "obox(";
  for (std::size_t i = 0; i < lo.size(); ++i)
    impl->label += (i ? ", " : "") + to_string(lo[i]) + ", " + to_string(hi[i]);
  impl->label += ")";
  impl->lo = std::move(lo);
  impl->hi = std::move(hi);
  return SetNet(std::move(impl));
}

SetNet SetNet::ball(std::vector<Expr> center, Expr radius, bool closed) {
  if (center.empty()) throw DomainError("ball needs a center");
  auto impl = std::make_shared<Impl>();
  impl->shape = Shape::Ball;
  impl->dim = center.size();
  impl->closed = closed;
  impl->label = closed ? "cball(" : "ball(";
  for (const auto& c : center) impl->label += to_string(c) + ", ";
  impl->label += to_string(radius) + ")";
  impl->center = std::move(center);
  impl->radius = std::move(radius);
  return SetNet(std::move(impl));
}

SetNet SetNet::unite(std::vector<SetNet> members) {
  if (members.empty()) throw DomainError("union of no sets");
  auto impl = std::make_shared<Impl>();
  impl->shape = Shape::Union;
  impl->dim = members.front().dim();
  impl->closed = true;
  impl->label = "union(";
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i].dim() != impl->dim) throw DomainError("union members differ in dimension");
    impl->closed = impl->closed && members[i].closed();
    impl->label += (i ? ", " : "") + members[i].label();
  }
  impl->label += ")";
  impl->members = std::move(members);
  return SetNet(std::move(impl));
}

SetNet SetNet::custom(std::size_t dim, SignedDistance sd, Sampler sampler, bool closed,
                      std::string label) {
  auto impl = std::make_shared<Impl>();
  impl->shape = Shape::Custom;
  impl->dim = dim;
  impl->closed = closed;
  impl->label = std::move(label);
  impl->custom_sd = std::move(sd);
  impl->custom_sampler = std::move(sampler);
  return SetNet(std::move(impl));
}

std::size_t SetNet::dim() const { return impl_->dim; }
const std::string& SetNet::label() const { return impl_->label; }
bool SetNet::closed() const { return impl_->closed; }

Real SetNet::signed_distance(double eps, std::span<const Real> p) const {
  const Impl& s = *impl_;
  if (p.size() != s.dim) throw DomainError("point dimension does not match set " + s.label);
  switch (s.shape) {
    case Shape::Box: {
      bool inside = true;
      Real inner = real_inf();
      Real outer = 0;
      for (std::size_t i = 0; i < s.dim; ++i) {
        Real lo = eval_eps(s.lo[i], eps), hi = eval_eps(s.hi[i], eps);
        Real below = lo - p[i], above = p[i] - hi;
        if (below > 0 || above > 0) {
          inside = false;
          Real d = below > 0 ? below : above;
          outer += d * d;
        } else {
          inner = std::min(inner, Real(std::min(Real(-below), Real(-above))));
        }
      }
      return inside ? inner : Real(-boost::multiprecision::sqrt(outer));
    }
    case Shape::Ball: {
      Real acc = 0;
      for (std::size_t i = 0; i < s.dim; ++i) {
        Real d = p[i] - eval_eps(s.center[i], eps);
        acc += d * d;
      }
      return eval_eps(s.radius, eps) - boost::multiprecision::sqrt(acc);
    }
    case Shape::Union: {
      Real best = -real_inf();
      for (const auto& m : s.members) best = std::max(best, m.signed_distance(eps, p));
      return best;
    }
    case Shape::Custom:
      return s.custom_sd(eps, p);
  }
  return Real(0);
}

Real SetNet::distance_to(double eps, std::span<const Real> p) const {
  Real sd = signed_distance(eps, p);
  return sd < 0 ? Real(-sd) : Real(0);
}

Real SetNet::distance_to_complement(double eps, std::span<const Real> p) const {
  Real sd = signed_distance(eps, p);
  return sd > 0 ? sd : Real(0);
}

bool SetNet::contains(double eps, std::span<const Real> p) const {
  if (impl_->shape == Shape::Union) {
    for (const auto& m : impl_->members)
      if (m.contains(eps, p)) return true;
    return false;
  }
  Real sd = signed_distance(eps, p);
  return impl_->closed ? sd >= 0 : sd > 0;
}

std::vector<std::vector<Real>> SetNet::sample_points(double eps, std::size_t count) const {
  const Impl& s = *impl_;
  std::vector<std::vector<Real>> pts;
  switch (s.shape) {
    case Shape::Box: {
      std::vector<Real> lo(s.dim), hi(s.dim);
      for (std::size_t i = 0; i < s.dim; ++i) {
        lo[i] = eval_eps(s.lo[i], eps);
        hi[i] = eval_eps(s.hi[i], eps);
        // unbounded sides get a finite sampling window
        if (boost::multiprecision::isinf(lo[i]) && boost::multiprecision::isinf(hi[i])) {
          lo[i] = -10;
          hi[i] = 10;
        } else if (boost::multiprecision::isinf(lo[i])) {
          lo[i] = hi[i] - 10 - abs(hi[i]);
        } else if (boost::multiprecision::isinf(hi[i])) {
          hi[i] = lo[i] + 10 + abs(lo[i]);
        }
      }
      std::vector<Real> mid(s.dim);
      for (std::size_t i = 0; i < s.dim; ++i) mid[i] = (lo[i] + hi[i]) / 2;
      pts.push_back(mid);
      if (s.closed && s.dim <= 6)
        for (std::size_t mask = 0; mask < (std::size_t{1} << s.dim); ++mask) {
          std::vector<Real> v(s.dim);
          for (std::size_t i = 0; i < s.dim; ++i) v[i] = (mask >> i) & 1 ? hi[i] : lo[i];
          pts.push_back(std::move(v));
        }
      for (std::size_t j = 0; pts.size() < count; ++j) {
        auto h = halton(j, s.dim);
        std::vector<Real> v(s.dim);
        for (std::size_t i = 0; i < s.dim; ++i) v[i] = lo[i] + (hi[i] - lo[i]) * Real(h[i]);
        pts.push_back(std::move(v));
      }
      break;
    }
    case Shape::Ball: {
      std::vector<Real> c(s.dim);
      for (std::size_t i = 0; i < s.dim; ++i) c[i] = eval_eps(s.center[i], eps);
      Real r = eval_eps(s.radius, eps);
      pts.push_back(c);
      if (s.closed)
        for (std::size_t i = 0; i < s.dim; ++i)
          for (int sign : {-1, 1}) {
            auto v = c;
            v[i] += sign * r;
            pts.push_back(std::move(v));
          }
      for (std::size_t j = 0; pts.size() < count && j < 64 * count; ++j) {
        auto h = halton(j, s.dim);
        double norm2 = 0;
        for (double& t : h) {
          t = 2 * t - 1;
          norm2 += t * t;
        }
        if (norm2 >= 1) continue;
        std::vector<Real> v(s.dim);
        for (std::size_t i = 0; i < s.dim; ++i) v[i] = c[i] + r * Real(h[i]);
        pts.push_back(std::move(v));
      }
      break;
    }
    case Shape::Union: {
      std::size_t share = std::max<std::size_t>(1, count / s.members.size());
      for (const auto& m : s.members) {
        auto part = m.sample_points(eps, share);
        pts.insert(pts.end(), part.begin(), part.end());
      }
      break;
    }
    case Shape::Custom:
      if (!s.custom_sampler) throw DomainError("set " + s.label + " has no sampler");
      pts = s.custom_sampler(eps, count);
      break;
  }
  if (pts.size() > count && count > 0) pts.resize(count);
  return pts;
}

Real SetNet::sup_norm(double eps) const {
  const Impl& s = *impl_;
  switch (s.shape) {
    case Shape::Box: {
      Real acc = 0;
      for (std::size_t i = 0; i < s.dim; ++i) {
        Real m = std::max(Real(abs(eval_eps(s.lo[i], eps))), Real(abs(eval_eps(s.hi[i], eps))));
        acc += m * m;
      }
      return boost::multiprecision::sqrt(acc);
    }
    case Shape::Ball: {
      Real acc = 0;
      for (std::size_t i = 0; i < s.dim; ++i) {
        Real c = eval_eps(s.center[i], eps);
        acc += c * c;
      }
      return boost::multiprecision::sqrt(acc) + eval_eps(s.radius, eps);
    }
    case Shape::Union: {
      Real best = 0;
      for (const auto& m : s.members) best = std::max(best, m.sup_norm(eps));
      return best;
    }
    case Shape::Custom: {
      Real best = 0;
      for (const auto& p : sample_points(eps, 64 * s.dim)) {
        Real acc = 0;
        for (const auto& v : p) acc += v * v;
        best = std::max(best, Real(boost::multiprecision::sqrt(acc)));
      }
      return best;
    }
  }
  return Real(0);
}

SetNet SetNet::closure() const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->closed = true;
  if (impl->shape == Shape::Union)
    for (auto& m : impl->members) m = m.closure();
  return SetNet(std::move(impl));
}

// ---------------------------------------------------------------- parsing

namespace {

std::vector<std::string> split_args(std::string_view s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(std::string_view s) {
  std::size_t a = s.find_first_not_of(" \t\n");
  std::size_t b = s.find_last_not_of(" \t\n");
  return a == std::string_view::npos ? std::string() : std::string(s.substr(a, b - a + 1));
}

}  // namespace

SetNet parse_set(std::string_view text) {
  std::string t = trim(text);
  std::size_t open = t.find('(');
  if (open == std::string::npos || t.back() != ')')
    throw DomainError("set literal must look like name(...): '" + t + "'");
  std::string name = trim(t.substr(0, open));
  std::string inner = t.substr(open + 1, t.size() - open - 2);
  auto args = split_args(inner);
  if (name == "union") {
    std::vector<SetNet> members;
    for (const auto& a : args) members.push_back(parse_set(a));
    return SetNet::unite(std::move(members));
  }
  ParserOptions opt;
  opt.constants["inf"] = Expr(std::numeric_limits<double>::infinity());
  std::vector<Expr> e;
  for (const auto& a : args) e.push_back(parse_expr(a, opt));
  for (const auto& x : e)
    if (max_free_var(x) >= 0) throw DomainError("set bounds may depend only on eps");
  if (name == "box" || name == "obox") {
    if (e.size() % 2 != 0) throw DomainError("box needs lo/hi pairs");
    std::vector<Expr> lo, hi;
    for (std::size_t i = 0; i < e.size(); i += 2) {
      lo.push_back(e[i]);
      hi.push_back(e[i + 1]);
    }
    return SetNet::box(std::move(lo), std::move(hi), name == "box");
  }
  if (name == "ball" || name == "cball") {
    if (e.size() < 2) throw DomainError("ball needs a center and a radius");
    Expr r = e.back();
    e.pop_back();
    return SetNet::ball(std::move(e), r, name == "cball");
  }
  throw DomainError("unknown set '" + name + "' (box, obox, ball, cball, union)");
}

// ---------------------------------------------------------------- membership

Verdict ball_membership(const GenPoint& x, const GenPoint& c, const GenNum& r, BallKind kind) {
  GenNum d = (x - c).norm();
  if (kind == BallKind::Sharp) {
    Verdict rp = is_strictly_positive(r);
    if (!rp.is_true())
      return Verdict::unknown("sharp radius is not invertible: " + rp.diagnostics);
    return lt_sharp(d, r);
  }
  return lt_fermat(d, r);
}

Verdict ball_membership(const GenPoint& x, const GenPoint& c, double r) {
  if (!(r > 0)) throw DomainError("Fermat radius must be a positive real");
  return ball_membership(x, c, GenNum::constant(x.context(), r), BallKind::Fermat);
}

GenNum distance_net(const GenPoint& x, const SetNet& a) {
  const auto& ctx = x.context();
  std::vector<Real> s(ctx->size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto p = x.at(k);
    s[k] = a.distance_to(ctx->eps(k), p);
  }
  return GenNum::from_samples(ctx, std::move(s));
}

GenNum complement_distance_net(const GenPoint& x, const SetNet& a) {
  const auto& ctx = x.context();
  std::vector<Real> s(ctx->size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto p = x.at(k);
    s[k] = a.distance_to_complement(ctx->eps(k), p);
  }
  return GenNum::from_samples(ctx, std::move(s));
}

Verdict internal_membership(const GenPoint& x, const SetNet& a) {
  Verdict v = is_negligible(distance_net(x, a));
  v.diagnostics = "d(x, A) " + v.diagnostics;
  return v;
}

Verdict strongly_internal_membership(const GenPoint& x, const SetNet& a) {
  GenNum d = complement_distance_net(x, a);
  for (std::size_t k = d.context()->grid().tail_begin(); k < d.context()->size(); ++k)
    if (boost::multiprecision::isinf(d.sample(k)))
      return Verdict::unknown("distance to the complement is unbounded");
  Verdict v = is_strictly_positive(d);
  v.diagnostics = "d(x, complement) " + v.diagnostics;
  return v;
}

Boundedness is_sharply_bounded(const ContextPtr& ctx, const SetNet& a) {
  std::vector<Real> r(ctx->size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    Real s = a.sup_norm(ctx->eps(k));
    r[k] = s > 0 ? Real(2 * s) : Real(1);
  }
  GenNum radius = GenNum::from_samples(ctx, std::move(r));
  for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size(); ++k)
    if (boost::multiprecision::isinf(radius.sample(k)))
      return {Verdict::no(ctx->eps(k), "set is unbounded at eps=" + std::to_string(ctx->eps(k))),
              std::nullopt};
  Verdict v = is_moderate(radius);
  if (!v.is_true()) return {v, std::nullopt};
  v.diagnostics = "A_eps inside B_r(0) with r = 2 sup|x|, " + v.diagnostics;
  return {v, radius};
}

Verdict eps_inclusion(const ContextPtr& ctx, const SetNet& b, const SetNet& omega,
                      std::size_t points_per_dim) {
  if (b.dim() != omega.dim()) throw DomainError("inclusion between sets of different dimension");
  Boundedness bounded = is_sharply_bounded(ctx, b);
  if (!bounded.verdict.is_true())
    return Verdict::unknown("inner net is not sharply bounded: " + bounded.verdict.diagnostics);
  const std::size_t count = points_per_dim * b.dim();
  std::size_t failing = 0;
  double first_failure = 0;
  bool last_fails = false;
  for (std::size_t k = ctx->grid().tail_begin(); k < ctx->size(); ++k) {
    bool ok = true;
    for (const auto& p : b.sample_points(ctx->eps(k), count))
      if (!omega.contains(ctx->eps(k), p)) {
        ok = false;
        break;
      }
    if (!ok) {
      if (failing++ == 0) first_failure = ctx->eps(k);
      last_fails = k + 1 == ctx->size();
    }
  }
  const std::string sampled = " (sampled, " + std::to_string(count) + " points per eps)";
  if (failing == 0)
    return Verdict::yes(static_cast<double>(count), "all sampled points inside" + sampled);
  if (failing >= 2 || last_fails)
    return Verdict::no(first_failure, std::to_string(failing) + " tail eps with escaping points" +
                                          sampled);
  return Verdict::unknown("a single non-final tail eps has escaping points" + sampled);
}

}  // namespace gsf
