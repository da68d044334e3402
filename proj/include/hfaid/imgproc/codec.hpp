#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "hfaid/imgproc/image.hpp"

namespace hfaid::imgproc {

enum class ImageFormat { unknown, png, jpeg, webp };

ImageFormat sniff_format(std::span<const std::uint8_t> bytes);
std::string_view mime_type(ImageFormat f);

// Decodes PNG, JPEG (baseline and progressive) or WebP into a 3-channel
// plane with v/255 sample mapping. Grayscale sources are replicated to
// three channels; alpha is dropped. Throws FormatError for unsupported or
// truncated streams.
ImagePlane decode_image(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
ImagePlane load_image(const std::filesystem::path& path);

// 8-bit PNG (round-to-nearest quantization). Output bytes are a pure
// function of the pixel data.
std::vector<std::uint8_t> encode_png(const ImagePlane& img);
void save_png(const ImagePlane& img, const std::filesystem::path& path);

// Baseline JPEG at `quality` (1..100). Chroma is subsampled 4:2:0 below
// quality 95 and kept at 4:4:4 from 95 up.
std::vector<std::uint8_t> encode_jpeg(const ImagePlane& img, int quality);

// Encode + decode through baseline JPEG; dimensions are preserved.
ImagePlane jpeg_roundtrip(const ImagePlane& img, int quality);

}  // namespace hfaid::imgproc
