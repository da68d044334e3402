#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hfaid/corpus/store.hpp"
#include "hfaid/imgproc/image.hpp"
#include "hfaid/iqa/brisque.hpp"
#include "hfaid/iqa/external_scorer.hpp"
#include "hfaid/iqa/niqe.hpp"

namespace hfaid::pipeline {

// Metrics computed in-process: "niqe" (needs a model), "brisque" (needs a
// linear head) and "laplacian_var".
struct NativeScorers {
  std::optional<iqa::NiqeModel> niqe;
  std::optional<iqa::BrisqueLinearHead> brisque;
};

bool is_native_metric(const std::string& metric);

struct ScoreRunReport {
  std::size_t updated = 0;
  std::vector<std::string> failed;  // "id: message"
};

// Scores every record in the store that has not been rejected at the
// cleaning stage; images that cannot be scored are listed, not fatal.
ScoreRunReport score_native(corpus::Store& store, const std::string& metric, const NativeScorers& scorers,
                            std::size_t workers);

// Exports the scoreable records (absolute image paths) to
// work_dir/<metric>.manifest.json, runs the external scorer and merges its
// output into the store.
ScoreRunReport score_external(corpus::Store& store, const iqa::ExternalScorerSpec& spec,
                              const std::filesystem::path& work_dir);

// Percentile (default 20th) of the Laplacian variance over a clean image
// set: a laplacian_min that rejects that share of known-good images.
double calibrate_laplacian_min(std::span<const imgproc::ImagePlane> clean, double pct = 20.0);

}  // namespace hfaid::pipeline
