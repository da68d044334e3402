#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "hfaid/imgproc/image.hpp"

namespace hfaid::fixtures {

// Black/white checkerboard with square cells, 3 channels.
imgproc::ImagePlane checkerboard(int width, int height, int cell);

// Procedural test scene: a multi-octave colour texture overlaid with
// hard-edged shapes in saturated colours. Colourful, sharp and textured
// everywhere, so it clears every cleaning check at default thresholds.
imgproc::ImagePlane scene(int width, int height, std::uint64_t seed);

// Writes count scenes as PNG files named scene_<seed>_<index>.png and
// returns their paths in order. Scene i uses derive_seed(seed, i).
std::vector<std::filesystem::path> write_scenes(const std::filesystem::path& dir, std::size_t count, int width,
                                                int height, std::uint64_t seed, std::size_t workers = 1);

}  // namespace hfaid::fixtures
