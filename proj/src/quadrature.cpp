#include "gsf/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace gsf {

namespace {

template <class T>
GaussRule<T> build_rule(int n) {
  using std::abs;
  ensure_real_range();
  GaussRule<T> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pi = 3.14159265358979323846;
  const T tol = std::numeric_limits<T>::epsilon() * 8;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    T x = std::cos(pi * (i + 0.75) / (n + 0.5));
    T dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      T p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        T p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      T step = p1 / dp;
      x -= step;
      if (abs(step) <= tol) break;
    }
    // recompute derivative at the converged node
    T p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      T p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1);
    T w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0;
  return rule;
}

}  // namespace

template <class T>
const GaussRule<T>& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule<T>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule<T>>(build_rule<T>(n));
  return *slot;
}

template const GaussRule<double>& gauss_legendre<double>(int);
template const GaussRule<Real>& gauss_legendre<Real>(int);

}  // namespace gsf
