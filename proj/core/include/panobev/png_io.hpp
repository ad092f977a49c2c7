#pragma once

#include <filesystem>

#include "panobev/image.hpp"

namespace panobev {

/// Reads an 8- or 16-bit PNG into a [0, 1] float buffer. Palette images
/// are expanded, 16-bit samples are reduced to 8, and alpha is dropped.
ImageBuffer read_png(const std::filesystem::path& path);

/// Writes an 8-bit grayscale or RGB PNG (round-half-up quantization).
/// Output bytes are deterministic for identical inputs.
void write_png(const std::filesystem::path& path, const ImageBuffer& img);

}  // namespace panobev
