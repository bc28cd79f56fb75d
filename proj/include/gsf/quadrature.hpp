#pragma once

#include "gsf/real.hpp"

#include <vector>

namespace gsf {

/// Gauss-Legendre rule on [-1, 1].
template <class T>
struct GaussRule {
  std::vector<T> nodes;
  std::vector<T> weights;
};

/// Cached n-point Gauss-Legendre rule (Newton iteration on the Legendre
/// recurrence, carried out in T). Thread-safe; rules are built once.
template <class T>
const GaussRule<T>& gauss_legendre(int n);

extern template const GaussRule<double>& gauss_legendre<double>(int);
extern template const GaussRule<Real>& gauss_legendre<Real>(int);

/// Integrates f over [a, b] split into `panels` equal panels, n nodes each.
template <class T, class F>
T integrate(F&& f, const T& a, const T& b, int n, int panels = 1) {
  const auto& rule = gauss_legendre<T>(n);
  T sum = 0;
  T width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    T lo = a + width * p;
    T half = width / 2;
    T mid = lo + half;
    T part = 0;
    for (int i = 0; i < n; ++i) part += rule.weights[i] * f(mid + half * rule.nodes[i]);
    sum += part * half;
  }
  return sum;
}

}  // namespace gsf
