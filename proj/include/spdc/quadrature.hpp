#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

#include "spdc/constants.hpp"

namespace spdc::quad {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]. Rules are cached; the reference
/// stays valid for the lifetime of the program.
const QuadratureRule& gauss_legendre(int n);

/// n-point Gauss-Hermite rule for the weight exp(-x^2) on the real line.
const QuadratureRule& gauss_hermite(int n);

struct IntegralResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

struct ComplexIntegralResult {
  std::complex<double> value{};
  double abs_error = 0.0;
  int panels = 0;
  std::size_t evaluations = 0;
  bool converged = true;
};

namespace detail {

// Kronrod 15-point abscissae/weights and the embedded 7-point Gauss weights
// (QUADPACK qk15 tables).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));
  const double ah = std::abs(half);
  const double value = resk * half;
  resasc *= ah;
  resabs *= ah;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double round = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  if (resabs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon()))
    err = std::max(round, err);
  return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of a real function on
/// [a, b]. Stops when the summed error estimate is below
/// max(abs_tol, rel_tol * |I|) or the subinterval budget is spent
/// (converged = false in that case).
template <class F>
IntegralResult integrate_adaptive(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                                  std::size_t max_subintervals = 2000) {
  IntegralResult out;
  if (a == b) return out;
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk15(f, a, b);
  out.evaluations = 15;
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (heap.size() >= max_subintervals) {
      out.converged = false;
      break;
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      out.converged = false;
      heap.push(worst);
      break;
    }
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the cancellation accumulated by the running updates.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.abs_error = total_err;
  return out;
}

/// Composite Gauss-Legendre with `panels` equal panels of `order` nodes.
template <class F>
double composite_gauss_legendre(F&& f, double a, double b, int panels, int order = 8) {
  const auto& rule = gauss_legendre(order);
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double half = 0.5 * width;
    double s = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) s += rule.weights[j] * f(lo + half * (1.0 + rule.nodes[j]));
    sum += s * half;
  }
  return sum;
}

/// Picks the square root of a complex radicand that continues the previous
/// root along a path starting at radicand 1 (root 1).
class ContinuousSqrt {
 public:
  std::complex<double> operator()(std::complex<double> radicand) {
    std::complex<double> root = std::sqrt(radicand);
    const double keep = std::abs(root - previous_);
    const double flip = std::abs(root + previous_);
    if (flip < keep) root = -root;
    // Both branches equally close means the path passed near the branch
    // point and continuity is ambiguous.
    if (std::min(keep, flip) > 0.8 * std::max(keep, flip) && std::abs(root) > 0.0)
      throw ConditioningError("square-root branch ambiguous: radicand passes near zero");
    previous_ = root;
    return root;
  }

 private:
  std::complex<double> previous_{1.0, 0.0};
};

/// Sample of an integrand of the form prefactor / sqrt(radicand).
struct BranchSample {
  std::complex<double> prefactor;
  std::complex<double> radicand;
};

/// Integrates prefactor(Z)/sqrt(radicand(Z)) over Z in [-1, 1] with composite
/// 16-point Gauss-Legendre panels. The square root is continued from
/// radicand(0) = 1 outward in both directions. Panel count starts at
/// `min_panels` and doubles until successive estimates agree to rel_tol
/// (relative to max(|I|, 1e-6 * integral of |integrand|)).
template <class Sample>
ComplexIntegralResult integrate_branch_tracked(Sample&& sample, int min_panels, double rel_tol,
                                               int max_panels = 4096) {
  const auto& rule = gauss_legendre(16);
  ComplexIntegralResult out;
  std::vector<double> z, w;
  std::vector<BranchSample> values;
  auto level = [&](int panels, double& l1) {
    const std::size_t m = rule.nodes.size();
    const std::size_t n = static_cast<std::size_t>(panels) * m;
    z.resize(n);
    w.resize(n);
    values.resize(n);
    const double half = 1.0 / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = -1.0 + 2.0 * p * half;
      for (std::size_t j = 0; j < m; ++j) {
        z[p * m + j] = lo + half * (1.0 + rule.nodes[j]);
        w[p * m + j] = half * rule.weights[j];
      }
    }
    for (std::size_t i = 0; i < n; ++i) values[i] = sample(z[i]);
    out.evaluations += n;
    const std::size_t first_pos =
        static_cast<std::size_t>(std::lower_bound(z.begin(), z.end(), 0.0) - z.begin());
    std::complex<double> sum{};
    l1 = 0.0;
    ContinuousSqrt up;
    for (std::size_t i = first_pos; i < n; ++i) {
      const auto term = values[i].prefactor / up(values[i].radicand);
      sum += w[i] * term;
      l1 += w[i] * std::abs(term);
    }
    ContinuousSqrt down;
    for (std::size_t i = first_pos; i-- > 0;) {
      const auto term = values[i].prefactor / down(values[i].radicand);
      sum += w[i] * term;
      l1 += w[i] * std::abs(term);
    }
    return sum;
  };
  int panels = std::max(1, min_panels);
  double l1 = 0.0;
  std::complex<double> previous = level(panels, l1);
  while (true) {
    if (2 * panels > max_panels) {
      out.value = previous;
      out.abs_error = std::numeric_limits<double>::infinity();
      out.panels = panels;
      out.converged = false;
      return out;
    }
    panels *= 2;
    const std::complex<double> current = level(panels, l1);
    const double change = std::abs(current - previous);
    if (change <= rel_tol * std::max(std::abs(current), 1e-6 * l1)) {
      out.value = current;
      out.abs_error = change;
      out.panels = panels;
      return out;
    }
    previous = current;
  }
}

}  // namespace spdc::quad
