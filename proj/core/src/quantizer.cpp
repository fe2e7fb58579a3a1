#include "eiprec/quantizer.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>

namespace eiprec::quant {

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

void check_bits(int bits) {
  if (bits < 1 || bits > kMaxBits) throw DomainError("quantizer bits must lie in 1..8");
}

// Probability of each output level for x ~ N(0, var).
std::vector<double> level_probabilities(const QuantizerSpec& spec, double var) {
  const auto th = spec.thresholds();
  const double sd = std::sqrt(var);
  std::vector<double> p(static_cast<std::size_t>(spec.levels()));
  double prev = 0.0;
  for (std::size_t i = 0; i < th.size(); ++i) {
    const double c = std_normal_cdf(th[i] / sd);
    p[i] = c - prev;
    prev = c;
  }
  p.back() = 1.0 - prev;
  return p;
}

}  // namespace

std::vector<double> QuantizerSpec::labels() const {
  const int n = levels();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int b = 0; b < n; ++b) out[static_cast<std::size_t>(b)] = step * (b - (n - 1) / 2.0);
  return out;
}

std::vector<double> QuantizerSpec::thresholds() const {
  const int n = levels();
  std::vector<double> out(static_cast<std::size_t>(n - 1));
  for (int l = 1; l < n; ++l) out[static_cast<std::size_t>(l - 1)] = step * (l - n / 2);
  return out;
}

double QuantizerSpec::apply(double x) const {
  if (bypass) return x;
  const int n = levels();
  double idx = std::floor(x / step + n / 2.0);
  if (idx < 0.0) idx = 0.0;
  if (idx > n - 1) idx = n - 1;
  return step * (idx - (n - 1) / 2.0);
}

double gaussian_distortion(double step, int bits) {
  check_bits(bits);
  const QuantizerSpec spec{bits, step, false};
  const auto lab = spec.labels();
  const auto th = spec.thresholds();
  double total = 0.0;
  for (std::size_t i = 0; i < lab.size(); ++i) {
    const bool lo_inf = i == 0;
    const bool hi_inf = i + 1 == lab.size();
    const double a = lo_inf ? 0.0 : th[i - 1];
    const double b = hi_inf ? 0.0 : th[i];
    const double pa = lo_inf ? 0.0 : std_normal_pdf(a);
    const double pb = hi_inf ? 0.0 : std_normal_pdf(b);
    const double mass = (hi_inf ? 1.0 : std_normal_cdf(b)) - (lo_inf ? 0.0 : std_normal_cdf(a));
    const double first = pa - pb;
    const double second = mass + (lo_inf ? 0.0 : a * pa) - (hi_inf ? 0.0 : b * pb);
    const double c = lab[i];
    total += second - 2.0 * c * first + c * c * mass;
  }
  return total;
}

double optimal_step(int bits) {
  check_bits(bits);
  static const std::array<double, kMaxBits> table = [] {
    std::array<double, kMaxBits> t{};
    for (int b = 1; b <= kMaxBits; ++b) {
      const auto res = boost::math::tools::brent_find_minima(
          [b](double d) { return gaussian_distortion(d, b); }, 1e-3, 4.0, 50);
      t[static_cast<std::size_t>(b - 1)] = res.first;
    }
    return t;
  }();
  return table[static_cast<std::size_t>(bits - 1)];
}

QuantizerSpec make_quantizer(int bits, double step) {
  check_bits(bits);
  if (!(step > 0.0)) throw DomainError("quantizer step must be positive");
  return {bits, step, false};
}

QuantizerSpec make_quantizer_auto(int bits, double input_std) {
  if (!(input_std > 0.0)) throw DomainError("input standard deviation must be positive");
  return make_quantizer(bits, optimal_step(bits) * input_std);
}

QuantizerSpec bypass_quantizer() { return {kMaxBits, 1.0, true}; }

Complex quantize(Complex x, const QuantizerSpec& spec) { return {spec.apply(x.real()), spec.apply(x.imag())}; }

ComplexVector quantize(const ComplexVector& x, const QuantizerSpec& spec) {
  ComplexVector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = quantize(x(i), spec);
  return out;
}

double bussgang_gain(const QuantizerSpec& spec, double sigma_u2) {
  if (!(sigma_u2 > 0.0)) throw DomainError("input variance must be positive");
  if (spec.bypass) return 1.0;
  const int n = spec.levels();
  double sum = 0.0;
  for (int l = 1; l < n; ++l) {
    const double t = l - n / 2;
    sum += std::exp(-spec.step * spec.step * t * t / sigma_u2);
  }
  return spec.step / std::sqrt(std::numbers::pi * sigma_u2) * sum;
}

double output_power(const QuantizerSpec& spec, double sigma_u2) {
  if (spec.bypass) return sigma_u2;
  if (!(sigma_u2 > 0.0)) return 2.0 * spec.apply(0.0) * spec.apply(0.0);
  const auto p = level_probabilities(spec, 0.5 * sigma_u2);
  const auto lab = spec.labels();
  double per_component = 0.0;
  for (std::size_t i = 0; i < lab.size(); ++i) per_component += p[i] * lab[i] * lab[i];
  return 2.0 * per_component;
}

}  // namespace eiprec::quant
