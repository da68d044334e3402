#pragma once

#include <string_view>
#include <vector>

#include "hfaid/corpus/record.hpp"

namespace hfaid::review {

enum class ReviewStatus { pending, approved, rejected, conflicted };

std::string_view status_name(ReviewStatus s);

// Status of a record from its verdicts alone, with a approvals and r
// rejections:
//   a + r < 2                 pending
//   unanimous, a + r >= 2     approved / rejected
//   split, a + r == 2         conflicted (a third reviewer is needed)
//   split, a + r >= 3         majority; a tied split stays conflicted
ReviewStatus review_status(const std::vector<corpus::ReviewVerdict>& verdicts);

// Final statuses take the record out of the review queue.
inline bool is_final(ReviewStatus s) { return s == ReviewStatus::approved || s == ReviewStatus::rejected; }

}  // namespace hfaid::review
