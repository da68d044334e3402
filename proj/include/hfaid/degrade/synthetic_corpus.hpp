#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "hfaid/degrade/config.hpp"

namespace hfaid::degrade {

// Copies every decodable image in clean_dir (non-recursive, sorted) to
// out_dir/clean/ and writes a degraded PNG twin of each to
// out_dir/degraded/<stem>.png, seeded by derive_seed(seed, clean id).
// Writes out_dir/manifest.json (entries labeled "clean" / "degraded" with
// twin ids, paths relative to out_dir) and returns its path. Output bytes
// do not depend on `workers`.
std::filesystem::path build_synthetic_corpus(const std::filesystem::path& clean_dir,
                                             const std::filesystem::path& out_dir, std::uint64_t seed,
                                             const DegradationConfig& cfg, std::size_t workers = 1);

}  // namespace hfaid::degrade
