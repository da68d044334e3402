#include "hfaid/degrade/synthetic_corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <vector>

#include <spdlog/spdlog.h>

#include "hfaid/common/error.hpp"
#include "hfaid/common/hashing.hpp"
#include "hfaid/common/parallel.hpp"
#include "hfaid/corpus/manifest.hpp"
#include "hfaid/degrade/degrade.hpp"
#include "hfaid/imgproc/codec.hpp"

namespace hfaid::degrade {
namespace fs = std::filesystem;

namespace {

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

struct Item {
  fs::path source;
  std::vector<std::uint8_t> bytes;
  std::string clean_id;
  std::string clean_name;
  std::optional<std::string> degraded_id;
  std::string degraded_name;
  bool ok = false;
};

}  // namespace

fs::path build_synthetic_corpus(const fs::path& clean_dir, const fs::path& out_dir, std::uint64_t seed,
                                const DegradationConfig& cfg, std::size_t workers) {
  cfg.validate();
  if (!fs::is_directory(clean_dir)) throw IoError("not a directory: " + clean_dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(clean_dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InvalidArgument("no input images in " + clean_dir.string());

  fs::create_directories(out_dir / "clean");
  fs::create_directories(out_dir / "degraded");

  std::vector<Item> items(files.size());
  parallel_for(files.size(), workers, [&](std::size_t i) {
    Item& it = items[i];
    it.source = files[i];
    it.bytes = imgproc::read_file_bytes(files[i]);
    imgproc::ImagePlane img;
    try {
      img = imgproc::decode_image(it.bytes);
    } catch (const FormatError&) {
      return;
    }
    it.clean_id = content_id(it.bytes);
    const auto out = degrade(img, derive_seed(seed, it.clean_id), cfg);
    const auto png = imgproc::encode_png(out);
    it.degraded_id = content_id(png);
    it.clean_name = files[i].filename().string();
    it.degraded_name = files[i].stem().string() + ".png";
    write_bytes(out_dir / "clean" / it.clean_name, it.bytes);
    write_bytes(out_dir / "degraded" / it.degraded_name, png);
    it.ok = true;
  });

  corpus::Manifest m;
  m.provenance.config_digest = json_digest(cfg.to_json());
  m.provenance.seed = seed;
  std::map<std::string, bool> seen;
  std::size_t skipped = 0;
  for (const auto& it : items) {
    if (!it.ok) {
      ++skipped;
      spdlog::warn("skipping undecodable {}", it.source.string());
      continue;
    }
    if (seen.contains(it.clean_id)) {
      spdlog::warn("skipping duplicate image {}", it.source.string());
      continue;
    }
    seen[it.clean_id] = true;
    corpus::ManifestEntry clean;
    clean.id = it.clean_id;
    clean.path = "clean/" + it.clean_name;
    clean.label = "clean";
    clean.twin_id = *it.degraded_id;
    corpus::ManifestEntry deg;
    deg.id = *it.degraded_id;
    deg.path = "degraded/" + it.degraded_name;
    deg.label = "degraded";
    deg.twin_id = it.clean_id;
    m.entries.push_back(std::move(clean));
    m.entries.push_back(std::move(deg));
  }
  if (m.entries.empty()) throw InvalidArgument("no decodable images in " + clean_dir.string());
  std::sort(m.entries.begin(), m.entries.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  const auto path = out_dir / "manifest.json";
  corpus::write_manifest(m, path);
  if (skipped) spdlog::warn("{} undecodable input(s) skipped", skipped);
  return path;
}

}  // namespace hfaid::degrade
