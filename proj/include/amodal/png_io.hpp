#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "amodal/image.hpp"
#include "amodal/mask.hpp"

namespace amodal {

// Minimal PNG codec over zlib: writes 8-bit grayscale (masks, 0/255) and
// 8-bit RGB (images), non-interlaced, fixed compression settings so outputs
// are byte-stable across runs. The reader accepts 8-bit gray, gray+alpha,
// RGB and RGBA.

std::vector<std::uint8_t> encode_png(const Image& image);
std::vector<std::uint8_t> encode_png(const BinaryMask& mask);

Image decode_png_image(std::span<const std::uint8_t> bytes);
// Any pixel with luminance > 127 counts as true.
BinaryMask decode_png_mask(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const Image& image);
void write_png(const std::filesystem::path& path, const BinaryMask& mask);

Image read_png_image(const std::filesystem::path& path);
BinaryMask read_png_mask(const std::filesystem::path& path);

}  // namespace amodal
