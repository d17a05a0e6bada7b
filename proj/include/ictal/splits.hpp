#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ictal {

enum class SplitKind { kHoldout, kKfold, kLeaveOneOut };

struct Fold {
  std::vector<int> train;
  std::vector<int> test;
};

// Parsed form of "holdout:<frac>" | "kfold:<k>" | "loo".
struct SplitSpec {
  SplitKind kind = SplitKind::kHoldout;
  double train_fraction = 0.8;  // holdout only
  int k = 10;                   // kfold only

  static SplitSpec parse(const std::string& text);
  std::string to_string() const;
  // Table-row label, e.g. "Hold-out (80.00-20.00%)" or
  // "10-folds cross-validation".
  std::string protocol_label() const;
};

struct SplitPlan {
  SplitSpec spec;
  std::uint64_t seed = 0;
  std::vector<Fold> folds;
};

// Stratified, deterministic split generation. Within every fold the train
// and test sets are disjoint and cover the dataset; per-class test counts
// deviate from exact proportionality by at most one example.
SplitPlan make_splits(const std::vector<int>& labels, const SplitSpec& spec,
                      std::uint64_t seed);

}  // namespace ictal
