#pragma once

#include <string>
#include <string_view>

#include "touchsim/env.hpp"

namespace touchsim {

inline constexpr std::size_t kPackedTaxelBytes = kTaxelCount / 8;

// 1600 taxels -> 200 bytes (row-major, most significant bit first) -> base64
// with padding (268 characters).
std::string encode_taxels(const TaxelGrid& grid);

// Throws std::invalid_argument for non-base64 input or a payload that is not
// exactly 200 bytes.
TaxelGrid decode_taxels(std::string_view text);

}  // namespace touchsim
