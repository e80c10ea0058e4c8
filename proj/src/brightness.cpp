#include "spdc/brightness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "spdc/quadrature.hpp"

namespace spdc {

FrequencyDomain FrequencyDomain::window(const TransmissionWindow& w) {
  return {DomainMode::TransmissionWindow, w.omega_min, w.omega_max, w.omega_max};
}

FrequencyDomain FrequencyDomain::filter(double omega_center, double delta, const TransmissionWindow& w) {
  if (!(delta > 0.0)) throw std::invalid_argument("filter half-width must be positive");
  FrequencyDomain d{DomainMode::Filter, std::max(w.omega_min, omega_center - delta),
                    std::min(w.omega_max, omega_center + delta), w.omega_max};
  if (!(d.omega_lo < d.omega_hi)) throw std::invalid_argument("filter does not overlap the transmission window");
  return d;
}

bool FrequencyDomain::contains(double omega_i, double omega_s) const {
  return omega_i >= omega_lo && omega_i <= omega_hi && omega_s >= omega_lo && omega_s <= omega_hi &&
         omega_i + omega_s <= u_max;
}

std::string FrequencyDomain::describe() const {
  std::ostringstream os;
  os << (mode == DomainMode::Filter ? "filter" : "window") << " omega in [" << omega_lo << ", " << omega_hi
     << "] rad/fs (" << omega_to_wavelength(omega_hi) * 1e3 << "-" << omega_to_wavelength(omega_lo) * 1e3
     << " nm), omega_i + omega_s <= " << u_max;
  return os.str();
}

BrightnessOptions BrightnessOptions::refined() const {
  BrightnessOptions r = *this;
  r.u_nodes = 2 * u_nodes;
  r.inner_rel_tol = inner_rel_tol / 4.0;
  r.max_evaluations = 2 * max_evaluations;
  return r;
}

namespace {

struct LevelResult {
  double value = 0.0;
  double inner_error = 0.0;
};

class Integrator {
 public:
  Integrator(const AmplitudeModel& m, const FrequencyDomain& d, const BrightnessOptions& o)
      : model_(m), domain_(d), opts_(o) {}

  // Integral over v of |phi|^2 at fixed u, with the 1/2 Jacobian.
  std::pair<double, double> inner(double u) {
    double X = domain_.v_limit(u);
    if (model_.v_halfwidth) X = std::min(X, *model_.v_halfwidth);
    if (X <= 0.0) return {0.0, 0.0};
    auto f = [&](double v) { return std::norm(model_.phi(0.5 * (u + v), 0.5 * (u - v))); };
    double value = 0.0, error = 0.0;
    auto add = [&](double a, double b, double weight) {
      const auto r = quad::integrate_adaptive(f, a, b, opts_.inner_rel_tol, 0.0, 4000);
      evaluations_ += r.evaluations;
      value += weight * r.value;
      error += weight * r.abs_error;
    };
    if (model_.symmetric) {
      add(0.0, X, 2.0);
    } else {
      add(-X, 0.0, 1.0);
      add(0.0, X, 1.0);
    }
    check_budget(value);
    return {0.5 * value, 0.5 * error};
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  void check_budget(double partial) const {
    if (evaluations_ > opts_.max_evaluations) {
      std::ostringstream msg;
      msg << "brightness integral exceeded the evaluation budget of " << opts_.max_evaluations;
      throw QuadratureError(msg.str(), partial, std::numeric_limits<double>::infinity());
    }
  }

  const AmplitudeModel& model_;
  const FrequencyDomain& domain_;
  const BrightnessOptions& opts_;
  std::size_t evaluations_ = 0;
};

double pump_weight(const PumpEnvelope& p, double u) {
  const double d = u - p.omega0;
  return std::sqrt(2.0 / kPi) * p.tau * std::exp(-2.0 * p.tau * p.tau * d * d);
}

}  // namespace

BrightnessResult total_brightness(const AmplitudeModel& model, const FrequencyDomain& domain,
                                  const BrightnessOptions& opts) {
  if (!model.phi) throw std::invalid_argument("amplitude model has no evaluator");
  BrightnessResult out;
  out.domain = domain;
  Integrator integ(model, domain, opts);
  double a = domain.u_min(), b = domain.u_upper();
  if (!(a < b)) return out;
  const double kink = domain.omega_lo + domain.omega_hi;

  std::function<LevelResult(int)> level;
  bool hermite = false;
  if (model.pump) {
    const double sigma = 1.0 / (2.0 * model.pump->tau);
    const double lo = model.pump->omega0 - 8.0 * sigma, hi = model.pump->omega0 + 8.0 * sigma;
    hermite = lo > a && hi < b && !(kink > lo && kink < hi);
    a = std::max(a, lo);
    b = std::min(b, hi);
    if (!(a < b)) return out;
  }
  if (hermite) {
    const PumpEnvelope p = *model.pump;
    const double scale = 1.0 / (std::sqrt(2.0) * p.tau);
    level = [&integ, p, scale](int n) {
      const auto& gh = quad::gauss_hermite(n);
      LevelResult r;
      for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
        const auto [v, e] = integ.inner(p.omega0 + scale * gh.nodes[j]);
        r.value += gh.weights[j] * v;
        r.inner_error += gh.weights[j] * e;
      }
      r.value /= std::sqrt(kPi);
      r.inner_error /= std::sqrt(kPi);
      return r;
    };
  } else {
    std::vector<double> cuts{a};
    if (model.pump && model.pump->omega0 > a && model.pump->omega0 < b) cuts.push_back(model.pump->omega0);
    if (kink > a && kink < b) cuts.push_back(kink);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    const auto pump = model.pump;
    level = [&integ, cuts, pump](int n) {
      const int panels = std::max(1, n / 8);
      const auto& gl = quad::gauss_legendre(8);
      LevelResult r;
      for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double width = (cuts[s + 1] - cuts[s]) / panels;
        for (int p = 0; p < panels; ++p) {
          const double lo = cuts[s] + p * width, half = 0.5 * width;
          for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
            const double u = lo + half * (1.0 + gl.nodes[j]);
            const double wgt = half * gl.weights[j] * (pump ? pump_weight(*pump, u) : 1.0);
            const auto [v, e] = integ.inner(u);
            r.value += wgt * v;
            r.inner_error += wgt * e;
          }
        }
      }
      return r;
    };
  }

  int n = std::max(2, opts.u_nodes);
  LevelResult previous = level(n);
  for (int k = 0; k < opts.max_u_doublings; ++k) {
    n *= 2;
    const LevelResult current = level(n);
    const double change = std::abs(current.value - previous.value);
    out.value = current.value;
    out.abs_error = change + current.inner_error + 1e-14 * std::abs(current.value);
    out.evaluations = integ.evaluations();
    if (change <= opts.rel_tol * std::abs(current.value) || current.value == 0.0) return out;
    previous = current;
  }
  out.converged = false;
  std::ostringstream msg;
  msg << "brightness outer integral did not converge after " << opts.max_u_doublings << " doublings";
  throw QuadratureError(msg.str(), out.value, out.abs_error);
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<SweepPoint> brightness_sweep(const std::function<AmplitudeModel(double)>& factory,
                                         const FrequencyDomain& domain, const std::vector<double>& grid,
                                         const BrightnessOptions& opts, int workers) {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  std::vector<SweepPoint> points(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    points[i].parameter = grid[i];
    try {
      points[i].result = total_brightness(factory(grid[i]), domain, opts);
    } catch (const std::exception& e) {
      points[i].error = e.what();
    }
  });
  return points;
}

}  // namespace spdc
