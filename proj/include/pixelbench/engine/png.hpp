#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pixelbench/engine/frame.hpp"

namespace pixelbench {

// Lossless PNG (RGB8, no interlace). Encoder settings are fixed (filter None,
// zlib level 6, no ancillary chunks) so equal pixels give equal bytes.
std::vector<std::uint8_t> encode_png(const Frame& frame);

// Decodes any 8-bit RGB PNG into a Frame (step_index 0). Throws ContractError
// on malformed input.
Frame decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const Frame& frame);

}  // namespace pixelbench
