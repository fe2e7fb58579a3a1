#include "eiprec/modulation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eiprec::link {

namespace {

const double kQpskScale = 1.0 / std::sqrt(2.0);
const double kQam16Scale = 1.0 / std::sqrt(10.0);

// Gray order along one axis: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
double pam4(std::uint8_t b0, std::uint8_t b1) {
  const int idx = b0 ? (b1 ? 2 : 3) : (b1 ? 1 : 0);
  return (2.0 * idx - 3.0) * kQam16Scale;
}

void slice_pam4(double x, std::uint8_t& b0, std::uint8_t& b1) {
  const double t = 2.0 * kQam16Scale;
  b0 = x > 0.0 ? 1 : 0;
  b1 = std::abs(x) < t ? 1 : 0;
}

}  // namespace

int bits_per_symbol(Modulation m) { return m == Modulation::qpsk ? 2 : 4; }

std::vector<Complex> modulate(std::span<const std::uint8_t> bits, Modulation m) {
  const auto k = static_cast<std::size_t>(bits_per_symbol(m));
  if (bits.size() % k != 0) throw std::invalid_argument("bit count is not a multiple of the symbol size");
  std::vector<Complex> out(bits.size() / k);
  for (std::size_t s = 0; s < out.size(); ++s) {
    const auto* b = bits.data() + s * k;
    if (m == Modulation::qpsk) {
      out[s] = {(b[0] ? -1.0 : 1.0) * kQpskScale, (b[1] ? -1.0 : 1.0) * kQpskScale};
    } else {
      out[s] = {pam4(b[0], b[1]), pam4(b[2], b[3])};
    }
  }
  return out;
}

std::vector<std::uint8_t> demodulate(std::span<const Complex> symbols, Modulation m) {
  const auto k = static_cast<std::size_t>(bits_per_symbol(m));
  std::vector<std::uint8_t> out(symbols.size() * k);
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    auto* b = out.data() + s * k;
    if (m == Modulation::qpsk) {
      b[0] = symbols[s].real() < 0.0 ? 1 : 0;
      b[1] = symbols[s].imag() < 0.0 ? 1 : 0;
    } else {
      slice_pam4(symbols[s].real(), b[0], b[1]);
      slice_pam4(symbols[s].imag(), b[2], b[3]);
    }
  }
  return out;
}

std::string_view to_string(Modulation m) { return m == Modulation::qpsk ? "qpsk" : "16qam"; }

Modulation modulation_from_string(std::string_view name) {
  if (name == "qpsk") return Modulation::qpsk;
  if (name == "16qam") return Modulation::qam16;
  throw std::invalid_argument("unknown modulation '" + std::string(name) + "'");
}

}  // namespace eiprec::link
