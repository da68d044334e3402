#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hfaid/common/json_util.hpp"
#include "hfaid/common/rng.hpp"
#include "hfaid/corpus/record.hpp"
#include "hfaid/corpus/store.hpp"
#include "hfaid/ropo/config.hpp"

namespace hfaid::ropo {

inline constexpr const char* kRopoFormat = "hfaid-ropo/1";
inline constexpr const char* kManifestName = "ropo_manifest.jsonl";

enum class SampleClass { positive, negative, unconditional };
// Which side of "u < r" the draw landed on; unconditional samples keep it.
enum class Branch { positive, negative };

std::string_view class_name(SampleClass c);
SampleClass parse_class(std::string_view name);
std::string_view branch_name(Branch b);
Branch parse_branch(std::string_view name);

struct RopoSample {
  std::string record_id;
  // Positives: the original image file. Negatives: negatives/<id>.png,
  // relative to the manifest directory.
  std::string image_path;
  std::string caption;
  SampleClass cls = SampleClass::positive;
  Branch branch = Branch::positive;
  std::uint64_t seed_used = 0;  // seed of the record's stream

  Json to_json() const;
  static RopoSample from_json(const Json& j);
  friend bool operator==(const RopoSample&, const RopoSample&) = default;
};

// Where a sample's inputs come from and where its derivative goes.
struct SampleContext {
  std::filesystem::path original;  // decodable image file of the record
  std::filesystem::path out_dir;   // receives negatives/<id>.png
};

std::string negative_relpath(const std::string& record_id);

// One training-sample draw for `record` from `rng`: u ~ U(0,1) picks the branch
// (positive iff u < ratio_r), then an independent dropout draw empties the
// caption with prob empty_caption_prob, then the degradation seed. A
// negative with cfg.materialize set is resized (long side, centre crop),
// degraded and written as PNG. Throws if the caption is missing.
RopoSample build_training_sample(const corpus::ImageRecord& record, Rng& rng, const RopoConfig& cfg,
                                 const SampleContext& ctx);

struct ClassCounts {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t unconditional = 0;
  std::size_t branch_positive = 0;
  std::size_t branch_negative = 0;
};

// One sample per selected record, each from Rng(derive_seed(seed, id)),
// written to out_dir/ropo_manifest.jsonl after a header line, samples
// sorted by record id. Every selected id must exist and carry a caption;
// otherwise nothing is written and the error lists all offenders.
std::filesystem::path build_manifest(const corpus::Store& store, const std::vector<std::string>& selected,
                                     const RopoConfig& cfg, std::uint64_t seed, const std::filesystem::path& out_dir,
                                     std::size_t workers = 1);

struct Band {
  double expected = 0.0;
  double half_width = 0.0;  // 3 sigma binomial
  double observed = 0.0;
  bool inside = true;
};

struct RatioStats {
  std::size_t n = 0;
  ClassCounts counts;
  Band branch_positive;  // vs ratio_r
  Band unconditional;    // vs empty_caption_prob
  Band class_positive;   // vs ratio_r * (1 - empty_caption_prob)
  std::size_t prefix_violations = 0;
  bool ok = true;

  Json to_json() const;
};

// Reads a ROPO manifest and checks the class fractions against the 3-sigma
// bands of the header's r and dropout probability, and the prefix law.
RatioStats verify_ratio(const std::filesystem::path& manifest);

// 3 * sqrt(p (1 - p) / n).
double binomial_band(double p, std::size_t n);

}  // namespace hfaid::ropo
