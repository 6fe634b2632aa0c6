#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dipsurf {

/// Raised when an adaptive integration cannot meet its tolerance within budget.
/// Carries the best estimate reached (flattened) and its error bound.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<std::complex<double>> estimate, double error_bound,
                   std::size_t evaluations)
      : std::runtime_error(what),
        estimate_(std::move(estimate)),
        error_bound_(error_bound),
        evaluations_(evaluations) {}

  const std::vector<std::complex<double>>& estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }
  std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  std::vector<std::complex<double>> estimate_;
  double error_bound_;
  std::size_t evaluations_;
};

template <typename Value>
struct QuadratureResult {
  Value value;
  double error = 0.0;
  std::size_t evaluations = 0;
};

// Max-abs norm and flattening for the value types we integrate.
inline double max_abs(double v) { return std::abs(v); }
inline double max_abs(const std::complex<double>& v) { return std::abs(v); }
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline std::vector<std::complex<double>> flatten(const std::complex<double>& v) { return {v}; }
inline std::vector<std::complex<double>> flatten(double v) { return {v}; }
template <typename Derived>
std::vector<std::complex<double>> flatten(const Eigen::MatrixBase<Derived>& m) {
  std::vector<std::complex<double>> out;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(m(i, j));
  return out;
}

template <typename Value>
Value zero_like() {
  if constexpr (std::is_arithmetic_v<Value>) return Value(0);
  else if constexpr (std::is_same_v<Value, std::complex<double>>) return Value(0);
  else return Value::Zero();
}

/// 21-point Gauss-Kronrod rule (10-point Gauss embedded), nodes on [-1, 1].
struct GaussKronrod21 {
  static constexpr std::array<double, 11> nodes = {
      0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
      0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
      0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
      0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
      0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
      0.0};
  static constexpr std::array<double, 11> kronrod_weights = {
      0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
      0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
      0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
      0.123491976262065851077208067052903, 0.134709217311473325928054001771707,
      0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
      0.149445554002916905664936468389821};
  // Gauss weights for nodes[1], nodes[3], ..., nodes[9]
  static constexpr std::array<double, 5> gauss_weights = {
      0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
      0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
      0.295524224714752870173892994651338};

  /// Kronrod estimate and |Kronrod - Gauss| over [a, b].
  template <typename Value, typename F>
  static std::pair<Value, double> apply(F&& f, double a, double b) {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    Value kronrod = zero_like<Value>();
    Value gauss = zero_like<Value>();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double x = half * nodes[i];
      Value fsum = f(mid + x);
      if (i + 1 < nodes.size()) fsum = fsum + f(mid - x);
      kronrod = kronrod + fsum * kronrod_weights[i];
      if (i % 2 == 1) gauss = gauss + fsum * gauss_weights[i / 2];
    }
    kronrod = kronrod * half;
    gauss = gauss * half;
    const Value diff = kronrod - gauss;
    return {kronrod, max_abs(diff)};
  }

  static constexpr std::size_t points = 21;
};

}  // namespace dipsurf
