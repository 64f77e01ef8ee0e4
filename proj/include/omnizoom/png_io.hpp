#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "omnizoom/image.hpp"

namespace omnizoom {

enum class BitDepth { eight = 8, sixteen = 16 };

/// Decodes gray, gray+alpha, RGB or RGBA PNGs (any bit depth) into samples in
/// [0, 1]; palette images expand to RGB. Channel count follows the file.
ErpImage decode_png(std::span<const std::uint8_t> bytes, AspectPolicy policy = AspectPolicy::equirect);
ErpImage read_png(const std::filesystem::path& path, AspectPolicy policy = AspectPolicy::equirect);

/// Quantizes with round-half-up after clamping to [0, 1]. 1-4 channels.
/// Byte output is deterministic (fixed filter and compression settings, no
/// timestamp chunks).
std::string encode_png(const ErpImage& image, BitDepth depth = BitDepth::eight);
void write_png(const ErpImage& image, const std::filesystem::path& path, BitDepth depth = BitDepth::eight);

/// Clamp to [0, 1] then floor(v * max + 0.5).
std::uint16_t quantize(double v, BitDepth depth);

}  // namespace omnizoom
