#include "spdc/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace spdc::quad {
namespace {

QuadratureRule compute_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double wgt = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = wgt;
    rule.weights[n - 1 - i] = wgt;
  }
  return rule;
}

// Newton iteration on orthonormal Hermite polynomials with the usual
// asymptotic starting guesses.
QuadratureRule compute_gauss_hermite(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pim4 = std::pow(kPi, -0.25);
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * rule.nodes[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * rule.nodes[1];
    else
      z = 2.0 * z - rule.nodes[i - 2];
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  // Stored ascending.
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

template <class Compute>
const QuadratureRule& cached(std::map<int, std::unique_ptr<QuadratureRule>>& cache, std::mutex& mutex, int n,
                             Compute compute) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<QuadratureRule>(compute(n))).first;
  return *it->second;
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, n, compute_gauss_legendre);
}

const QuadratureRule& gauss_hermite(int n) {
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, n, compute_gauss_hermite);
}

}  // namespace spdc::quad
