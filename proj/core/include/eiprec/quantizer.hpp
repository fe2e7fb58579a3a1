#pragma once

#include <vector>

#include "eiprec/types.hpp"

namespace eiprec::quant {

// Symmetric mid-rise uniform quantizer applied to each real component.
struct QuantizerSpec {
  int bits = 1;
  double step = 1.0;
  bool bypass = false;

  int levels() const { return 1 << bits; }
  // Ascending, step-spaced, symmetric about 0.
  std::vector<double> labels() const;
  // step * (l - 2^(B-1)) for l = 1 .. 2^B - 1.
  std::vector<double> thresholds() const;
  double apply(double x) const;
};

constexpr int kMaxBits = 8;

// E(Q(x) - x)^2 for x ~ N(0, 1).
double gaussian_distortion(double step, int bits);
// Distortion-minimising step for a unit-variance real Gaussian input, cached per bit width.
double optimal_step(int bits);

QuantizerSpec make_quantizer(int bits, double step);
// step = optimal_step(bits) * input_std, input_std being the per-component standard deviation.
QuantizerSpec make_quantizer_auto(int bits, double input_std);
QuantizerSpec bypass_quantizer();

Complex quantize(Complex x, const QuantizerSpec& spec);
ComplexVector quantize(const ComplexVector& x, const QuantizerSpec& spec);

// Closed-form Bussgang gain for CN(0, sigma_u2) input.
double bussgang_gain(const QuantizerSpec& spec, double sigma_u2);
// E|Q(u)|^2 for u ~ CN(0, sigma_u2).
double output_power(const QuantizerSpec& spec, double sigma_u2);

}  // namespace eiprec::quant
