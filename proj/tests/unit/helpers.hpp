#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "eiprec/channel.hpp"
#include "eiprec/random.hpp"
#include "eiprec/types.hpp"

namespace testutil {

using eiprec::Complex;
using eiprec::ComplexMatrix;

inline ComplexMatrix sample_channel(int users, int antennas, std::uint64_t seed) {
  eiprec::RandomStream rng(seed);
  return eiprec::channel::gen_channel(eiprec::SystemDims(users, antennas), rng);
}

inline std::vector<double> hermitian_eigs(const ComplexMatrix& M) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(M, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

inline std::vector<double> gram_eigs(const ComplexMatrix& X) { return hermitian_eigs(X * X.adjoint()); }

inline Complex mean_resolvent(const std::vector<double>& eigs, Complex z) {
  Complex s = 0.0;
  for (double l : eigs) s += 1.0 / (l - z);
  return s / static_cast<double>(eigs.size());
}

// Marchenko-Pastur density for U x A Gram matrices with entry variance 1/A, q = U/A < 1.
inline double mp_density_oracle(double x, double q) {
  const double a = std::pow(1.0 - std::sqrt(q), 2);
  const double b = std::pow(1.0 + std::sqrt(q), 2);
  if (x <= a || x >= b) return 0.0;
  return std::sqrt((b - x) * (x - a)) / (2.0 * std::numbers::pi * q * x);
}

template <class F>
double integrate(F&& f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-13);
}

// ∫ rho(x) / (x - z) dx by adaptive quadrature on [lo, hi].
template <class Density>
Complex stieltjes_by_quadrature(Density&& rho, double lo, double hi, Complex z) {
  const double re = integrate([&](double x) { return rho(x) * std::real(1.0 / (x - z)); }, lo, hi);
  const double im = integrate([&](double x) { return rho(x) * std::imag(1.0 / (x - z)); }, lo, hi);
  return {re, im};
}

// Taylor coefficient c_n of f around 0, by the trapezoid rule on a circle of radius r.
template <class F>
Complex taylor_coefficient(F&& f, int n, double r, int points = 512) {
  Complex acc = 0.0;
  for (int k = 0; k < points; ++k) {
    const Complex w = std::polar(r, 2.0 * std::numbers::pi * k / points);
    acc += f(w) / std::pow(w, n);
  }
  return acc / static_cast<double>(points);
}

}  // namespace testutil

namespace testutil {

// L1 distance between the histogram of `samples` on [lo, hi] and the bin-averaged density.
// Mass outside [lo, hi] counts fully.
template <class Density>
double histogram_l1(const std::vector<double>& samples, Density&& rho, double lo, double hi, int bins) {
  const double width = (hi - lo) / bins;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  double outside = 0.0;
  for (double x : samples) {
    const double pos = (x - lo) / width;
    if (pos < 0.0 || pos >= bins)
      outside += 1.0;
    else
      counts[static_cast<std::size_t>(pos)] += 1.0;
  }
  const double n = static_cast<double>(samples.size());
  double l1 = outside / n;
  for (int i = 0; i < bins; ++i) {
    const double mass = integrate(rho, lo + i * width, lo + (i + 1) * width);
    l1 += std::abs(counts[static_cast<std::size_t>(i)] / n - mass);
  }
  return l1;
}

}  // namespace testutil
