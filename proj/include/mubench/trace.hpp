#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "mubench/error.hpp"
#include "mubench/sequence.hpp"

namespace mubench {

/// Default budget for branch exploration and query tracing.
inline constexpr Nat kDefaultBudget = Nat{1} << 20;

/// Records the code indices read during one instrumented evaluation.
/// Keeps the maximum and a count always; the full index set only on request.
class QueryLog {
 public:
  explicit QueryLog(Nat budget = kDefaultBudget, bool keep_indices = false)
      : budget_(budget), keep_indices_(keep_indices) {}

  void record(Nat index) {
    if (++count_ > budget_) {
      throw BudgetExceeded("more than " + std::to_string(budget_) + " queries");
    }
    max_ = max_ ? std::max(*max_, index) : index;
    if (keep_indices_) indices_.insert(index);
  }

  std::optional<Nat> max_index() const { return max_; }
  Nat count() const { return count_; }
  const std::set<Nat>& indices() const { return indices_; }

  /// One past the largest index read, or 0 when nothing was read.
  Nat bound() const { return max_ ? *max_ + 1 : 0; }

 private:
  Nat budget_;
  bool keep_indices_;
  Nat count_ = 0;
  std::optional<Nat> max_;
  std::set<Nat> indices_;
};

/// Callback invoked with each code index an instrumented object reads.
using Observer = std::function<void(Nat)>;

inline Observer observer_for(const std::shared_ptr<QueryLog>& log) {
  return [log](Nat index) { log->record(index); };
}

}  // namespace mubench
