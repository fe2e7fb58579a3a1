#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "eiprec/types.hpp"

namespace eiprec::link {

enum class Modulation { qpsk, qam16 };

int bits_per_symbol(Modulation m);

// Gray-mapped, unit average energy.
std::vector<Complex> modulate(std::span<const std::uint8_t> bits, Modulation m);
// Minimum-distance detection.
std::vector<std::uint8_t> demodulate(std::span<const Complex> symbols, Modulation m);

std::string_view to_string(Modulation m);
Modulation modulation_from_string(std::string_view name);

}  // namespace eiprec::link
