#include "touchsim/taxel_codec.hpp"

#include <array>
#include <stdexcept>

#include <sodium.h>

namespace touchsim {

namespace {

constexpr int kVariant = sodium_base64_VARIANT_ORIGINAL;

}  // namespace

std::string encode_taxels(const TaxelGrid& grid) {
  std::array<unsigned char, kPackedTaxelBytes> packed{};
  for (std::size_t i = 0; i < kTaxelCount; ++i) {
    if (grid.cells[i]) packed[i / 8] |= static_cast<unsigned char>(0x80u >> (i % 8));
  }
  std::string out(sodium_base64_ENCODED_LEN(kPackedTaxelBytes, kVariant), '\0');
  sodium_bin2base64(out.data(), out.size(), packed.data(), packed.size(), kVariant);
  out.pop_back();  // drop the terminating NUL
  return out;
}

TaxelGrid decode_taxels(std::string_view text) {
  std::array<unsigned char, kPackedTaxelBytes + 1> packed{};
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(packed.data(), packed.size(), text.data(), text.size(), nullptr, &len, &end,
                        kVariant) != 0 ||
      end != text.data() + text.size()) {
    throw std::invalid_argument("taxels: not valid base64");
  }
  if (len != kPackedTaxelBytes) {
    throw std::invalid_argument("taxels: expected " + std::to_string(kPackedTaxelBytes) +
                                " bytes, got " + std::to_string(len));
  }
  TaxelGrid grid;
  for (std::size_t i = 0; i < kTaxelCount; ++i) {
    grid.cells[i] = (packed[i / 8] >> (7 - i % 8)) & 1u;
  }
  return grid;
}

}  // namespace touchsim
