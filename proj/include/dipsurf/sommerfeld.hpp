#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "dipsurf/quadrature.hpp"

namespace dipsurf {

/// Integration path and tolerance for Sommerfeld integrals over k_rho in [0, inf).
///
/// The path runs along the real axis up to k(1 - w), detours through the fourth
/// quadrant on a half-ellipse of height `ellipse_height * k` back to the real
/// axis at k(1 + w), and continues along the real axis in panels of growing width
/// until the integrand has decayed below tolerance. Lossy-media poles lie just
/// above the real axis and are never crossed.
struct PathParams {
  double ellipse_half_width = 0.5;  // w, units of k
  double cavity_half_width = 1.0;   // w used between two surfaces; 1 starts the ellipse at the origin
  double ellipse_height = 0.1;      // units of k
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  std::size_t max_evaluations = 200000;
  bool deform = true;  // false: stay on the real axis (reference integrations only)
};

inline void validate(const PathParams& p) {
  if (!(p.ellipse_half_width > 0.0 && p.ellipse_half_width <= 1.0))
    throw std::invalid_argument("ellipse half-width must lie in (0, 1]");
  if (!(p.cavity_half_width > 0.0 && p.cavity_half_width <= 1.0))
    throw std::invalid_argument("cavity ellipse half-width must lie in (0, 1]");
  if (!(p.ellipse_height > 0.0)) throw std::invalid_argument("ellipse height must be > 0");
  if (!(p.rel_tol > 0.0 && p.rel_tol < 1.0)) throw std::invalid_argument("relative tolerance must lie in (0, 1)");
  if (!(p.abs_tol >= 0.0)) throw std::invalid_argument("absolute tolerance must be >= 0");
  if (p.max_evaluations < 10 * GaussKronrod21::points)
    throw std::invalid_argument("evaluation budget too small");
}

/// Integrates f(k_rho) dk_rho from 0 to infinity along the deformed path.
///
/// `decay_length` (nm, optional) is the e-folding length of the integrand's
/// evanescent tail, exp(-|k_z| L); it only sets the tail panel width.
/// Throws ConvergenceError when the tolerance is not met within the budget.
template <typename Value, typename Integrand>
QuadratureResult<Value> sommerfeld_integrate(Integrand&& f, double k, const PathParams& path,
                                             double decay_length = 0.0) {
  using cplx = std::complex<double>;
  validate(path);
  if (!(k > 0.0)) throw std::invalid_argument("wavenumber must be > 0");

  struct Interval {
    bool ellipse;
    double a, b;
    Value estimate;
    double error;
  };
  const double w = path.ellipse_half_width * k;
  const double height = path.ellipse_height * k;

  std::size_t evaluations = 0;
  auto on_real = [&](double x) -> Value {
    ++evaluations;
    return f(cplx(x, 0.0));
  };
  auto on_ellipse = [&](double theta) -> Value {
    ++evaluations;
    const cplx point(k - w * std::cos(theta), -height * std::sin(theta));
    const cplx jacobian(w * std::sin(theta), -height * std::cos(theta));
    return f(point) * jacobian;
  };

  std::vector<Interval> heap;
  auto by_error = [](const Interval& l, const Interval& r) { return l.error < r.error; };
  Value total = zero_like<Value>();
  double total_error = 0.0;

  auto integrate = [&](bool ellipse, double a, double b) {
    auto [est, err] = ellipse ? GaussKronrod21::apply<Value>(on_ellipse, a, b)
                              : GaussKronrod21::apply<Value>(on_real, a, b);
    return Interval{ellipse, a, b, est, err};
  };
  auto push = [&](Interval iv) {
    total = total + iv.estimate;
    total_error += iv.error;
    heap.push_back(std::move(iv));
    std::push_heap(heap.begin(), heap.end(), by_error);
  };

  double tail_start;
  if (path.deform) {
    if (k - w > 0.0) push(integrate(false, 0.0, k - w));
    push(integrate(true, 0.0, 3.14159265358979323846));
    tail_start = k + w;
  } else {
    push(integrate(false, 0.0, k));
    tail_start = k;
  }

  // Tail panels: widths double from k, capped at a few decay lengths.
  double panel_width = k;
  const double width_cap = decay_length > 0.0 ? std::max(k, 4.0 / decay_length) : 0.0;
  std::vector<double> tail_magnitudes;
  bool tail_open = true;

  auto tail_closed = [&](double tol) {
    if (tail_magnitudes.size() < 2) return false;
    const auto n = tail_magnitudes.size();
    const double bound = 0.05 * tol;
    return tail_magnitudes[n - 1] <= bound && tail_magnitudes[n - 2] <= bound;
  };
  auto add_panel = [&] {
    const double a = tail_start, b = tail_start + panel_width;
    // magnitude proxy: integral of |f| with the Kronrod weights
    double magnitude = 0.0;
    {
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (std::size_t i = 0; i < GaussKronrod21::nodes.size(); ++i) {
        const double x = half * GaussKronrod21::nodes[i];
        double s = max_abs(f(cplx(mid + x, 0.0)));
        if (i + 1 < GaussKronrod21::nodes.size()) s += max_abs(f(cplx(mid - x, 0.0)));
        magnitude += s * GaussKronrod21::kronrod_weights[i] * half;
      }
      evaluations += GaussKronrod21::points;
    }
    push(integrate(false, a, b));
    tail_magnitudes.push_back(magnitude);
    tail_start = b;
    panel_width *= 2.0;
    if (width_cap > 0.0) panel_width = std::min(panel_width, width_cap);
  };

  auto fail = [&](const std::string& why) {
    throw ConvergenceError("Sommerfeld integral did not converge: " + why, flatten(total), total_error,
                           evaluations);
  };

  while (true) {
    const double tol = std::max(path.abs_tol, path.rel_tol * max_abs(total));
    if (evaluations + 2 * GaussKronrod21::points > path.max_evaluations)
      fail("evaluation budget of " + std::to_string(path.max_evaluations) + " exhausted");
    if (tail_open) {
      if (tail_closed(tol)) {
        tail_open = false;
      } else {
        add_panel();
      }
      continue;
    }
    if (total_error <= tol) {
      if (!tail_closed(tol)) {
        tail_open = true;
        continue;
      }
      break;
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    Interval worst = std::move(heap.back());
    heap.pop_back();
    total = total - worst.estimate;
    total_error -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) fail("interval collapsed below machine resolution");
    push(integrate(worst.ellipse, worst.a, mid));
    push(integrate(worst.ellipse, mid, worst.b));
  }

  Value sum = zero_like<Value>();
  double err = 0.0;
  for (const auto& iv : heap) {
    sum = sum + iv.estimate;
    err += iv.error;
  }
  return {sum, err, evaluations};
}

}  // namespace dipsurf
