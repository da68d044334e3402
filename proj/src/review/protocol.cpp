#include "hfaid/review/protocol.hpp"

#include <set>
#include <string>

namespace hfaid::review {

std::string_view status_name(ReviewStatus s) {
  switch (s) {
    case ReviewStatus::pending: return "pending";
    case ReviewStatus::approved: return "approved";
    case ReviewStatus::rejected: return "rejected";
    case ReviewStatus::conflicted: return "conflicted";
  }
  return "pending";
}

ReviewStatus review_status(const std::vector<corpus::ReviewVerdict>& verdicts) {
  std::size_t a = 0, r = 0;
  std::set<std::string> seen;
  for (const auto& v : verdicts) {
    // Only a reviewer's first verdict counts.
    if (!seen.insert(v.reviewer_id).second) continue;
    (v.decision == corpus::Decision::approve ? a : r) += 1;
  }
  if (a + r < 2) return ReviewStatus::pending;
  if (r == 0) return ReviewStatus::approved;
  if (a == 0) return ReviewStatus::rejected;
  if (a + r == 2 || a == r) return ReviewStatus::conflicted;
  return a > r ? ReviewStatus::approved : ReviewStatus::rejected;
}

}  // namespace hfaid::review
