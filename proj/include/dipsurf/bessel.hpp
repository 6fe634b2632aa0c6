#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

namespace dipsurf {

template <typename T>
struct BesselJ012 {
  T j0, j1, j2;
};

namespace detail {

template <typename T>
struct is_complex : std::false_type {};
template <typename R>
struct is_complex<std::complex<R>> : std::true_type {};

// Ascending series, |z| < 1.
template <typename T>
BesselJ012<T> bessel_series(const T& z) {
  const T q = -z * z / T(4);
  T out[3];
  T lead = T(1);  // (z/2)^n / n!
  for (int n = 0; n < 3; ++n) {
    T term = lead, sum = lead;
    for (int m = 1; m < 30; ++m) {
      term *= q / T(double(m) * double(m + n));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    out[n] = sum;
    lead *= z / T(2.0 * (n + 1));
  }
  return {out[0], out[1], out[2]};
}

// Hankel asymptotic expansion, |z| large and |arg z| small.
template <typename T>
T bessel_hankel(int n, const T& z) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const double mu = 4.0 * n * n;
  const T inv8z = T(1) / (T(8) * z);
  T p = T(1), q = T(0);
  T term = T(1);
  double prev = 1e300;
  for (int k = 1; k < 60; ++k) {
    term *= T((mu - double((2 * k - 1) * (2 * k - 1))) / k) * inv8z;
    const double mag = std::abs(term);
    if (mag > prev) break;  // asymptotic series starts diverging
    prev = mag;
    // k odd -> Q with sign (-1)^((k-1)/2); k even -> P with sign (-1)^(k/2)
    if (k % 2 == 1)
      q += ((k / 2) % 2 == 0 ? term : -term);
    else
      p += ((k / 2) % 2 == 0 ? term : -term);
    if (mag < 1e-17) break;
  }
  const double pi = 3.14159265358979323846;
  const T chi = z - T(pi * (0.5 * n + 0.25));
  return sqrt(T(2.0 / pi) / z) * (p * cos(chi) - q * sin(chi));
}

// Miller backward recurrence, normalised with the generating-function sum.
template <typename T>
BesselJ012<T> bessel_miller(const T& z) {
  const double az = std::abs(z);
  int start = int(az) + 30 + int(2.0 * std::sqrt(az));
  if (start % 2) ++start;
  T next = T(0), cur = T(1e-30);
  T j0 = 0, j1 = 0, j2 = 0;
  T norm = T(0);
  const T two_over_z = T(2) / z;
  [[maybe_unused]] const bool upper = [&] {
    if constexpr (is_complex<T>::value) return z.imag() > 0;
    else return false;
  }();
  auto accumulate = [&](int n, const T& jn) {
    if constexpr (is_complex<T>::value) {
      // e^{+-iz} = J0 + 2 sum_k (+-i)^k J_k, picking the sign that does not cancel.
      static const T ipow[4] = {T(1, 0), T(0, 1), T(-1, 0), T(0, -1)};
      const T phase = upper ? std::conj(ipow[n % 4]) : ipow[n % 4];
      norm += (n == 0 ? T(1) : T(2)) * phase * jn;
    } else {
      // 1 = J0 + 2 sum_k J_2k
      if (n % 2 == 0) norm += (n == 0 ? T(1) : T(2)) * jn;
    }
  };
  accumulate(start, cur);
  for (int n = start; n > 0; --n) {
    const T prev = T(double(n)) * two_over_z * cur - next;
    next = cur;
    cur = prev;
    if (std::abs(cur) > 1e250) {
      const T s = T(1e-250);
      cur *= s;
      next *= s;
      norm *= s;
      j1 *= s;
      j2 *= s;
    }
    const int m = n - 1;
    if (m == 2) j2 = cur;
    if (m == 1) j1 = cur;
    if (m == 0) j0 = cur;
    accumulate(m, cur);
  }
  T target;
  if constexpr (is_complex<T>::value)
    target = upper ? std::exp(T(0, -1) * z) : std::exp(T(0, 1) * z);
  else
    target = T(1);
  const T scale = target / norm;
  return {j0 * scale, j1 * scale, j2 * scale};
}

}  // namespace detail

/// J_0, J_1, J_2 at a real or complex argument. Intended for Re z >= 0 with a
/// modest imaginary part (the deformed Sommerfeld path).
template <typename T>
BesselJ012<T> bessel_j012(const T& z) {
  const double az = std::abs(z);
  if (az == 0.0) return {T(1), T(0), T(0)};
  if (az < 1.0) return detail::bessel_series(z);
  if (az >= 25.0) return {detail::bessel_hankel(0, z), detail::bessel_hankel(1, z), detail::bessel_hankel(2, z)};
  return detail::bessel_miller(z);
}

}  // namespace dipsurf
