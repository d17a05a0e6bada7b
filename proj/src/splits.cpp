#include "ictal/splits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "ictal/errors.hpp"
#include "ictal/rng.hpp"

namespace ictal {

namespace {

// Per-class index lists in class order, each shuffled with its own
// deterministic stream.
std::map<int, std::vector<int>> shuffled_class_indices(
    const std::vector<int>& labels, std::uint64_t seed) {
  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(static_cast<int>(i));
  }
  for (auto& [label, indices] : by_class) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(label) + 1));
    shuffle(indices, rng);
  }
  return by_class;
}

// Largest-remainder apportionment of `total` across classes, proportional
// to class sizes; every count lands within one of its exact share.
std::map<int, int> apportion(const std::map<int, std::vector<int>>& by_class,
                             std::size_t dataset_size, int total) {
  std::map<int, int> counts;
  std::vector<std::pair<double, int>> remainders;  // (-remainder, class)
  int assigned = 0;
  for (const auto& [label, indices] : by_class) {
    const double exact = static_cast<double>(total) *
                         static_cast<double>(indices.size()) /
                         static_cast<double>(dataset_size);
    const int floor_count = static_cast<int>(std::floor(exact));
    counts[label] = floor_count;
    assigned += floor_count;
    remainders.emplace_back(-(exact - floor_count), label);
  }
  std::sort(remainders.begin(), remainders.end());
  for (auto& [neg_remainder, label] : remainders) {
    (void)neg_remainder;
    if (assigned >= total) {
      break;
    }
    counts[label] += 1;
    ++assigned;
  }
  return counts;
}

}  // namespace

SplitSpec SplitSpec::parse(const std::string& text) {
  SplitSpec spec;
  if (text == "loo") {
    spec.kind = SplitKind::kLeaveOneOut;
    return spec;
  }
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail =
      colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (head == "holdout") {
      spec.kind = SplitKind::kHoldout;
      spec.train_fraction = std::stod(tail);
      return spec;
    }
    if (head == "kfold") {
      spec.kind = SplitKind::kKfold;
      spec.k = std::stoi(tail);
      return spec;
    }
  } catch (const std::exception&) {
    // fall through to the shared error below
  }
  throw ConfigError("bad split '" + text +
                    "' (expected holdout:<frac>, kfold:<k>, or loo)");
}

std::string SplitSpec::to_string() const {
  char buf[64];
  switch (kind) {
    case SplitKind::kHoldout:
      std::snprintf(buf, sizeof(buf), "holdout:%g", train_fraction);
      return buf;
    case SplitKind::kKfold:
      std::snprintf(buf, sizeof(buf), "kfold:%d", k);
      return buf;
    case SplitKind::kLeaveOneOut:
      return "loo";
  }
  return "";
}

std::string SplitSpec::protocol_label() const {
  char buf[80];
  switch (kind) {
    case SplitKind::kHoldout:
      std::snprintf(buf, sizeof(buf), "Hold-out (%.2f-%.2f%%)",
                    100.0 * train_fraction, 100.0 * (1.0 - train_fraction));
      return buf;
    case SplitKind::kKfold:
      std::snprintf(buf, sizeof(buf), "%d-folds cross-validation", k);
      return buf;
    case SplitKind::kLeaveOneOut:
      return "Leave-one-out CV";
  }
  return "";
}

SplitPlan make_splits(const std::vector<int>& labels, const SplitSpec& spec,
                      std::uint64_t seed) {
  const int n = static_cast<int>(labels.size());
  if (n == 0) {
    throw std::invalid_argument("make_splits: empty dataset");
  }
  SplitPlan plan;
  plan.spec = spec;
  plan.seed = seed;

  switch (spec.kind) {
    case SplitKind::kLeaveOneOut: {
      plan.folds.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        auto& fold = plan.folds[static_cast<std::size_t>(i)];
        fold.test.push_back(i);
        fold.train.reserve(static_cast<std::size_t>(n - 1));
        for (int j = 0; j < n; ++j) {
          if (j != i) {
            fold.train.push_back(j);
          }
        }
      }
      return plan;
    }

    case SplitKind::kHoldout: {
      if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw std::invalid_argument(
            "make_splits: train fraction must lie in (0, 1)");
      }
      const auto by_class = shuffled_class_indices(labels, seed);
      const int train_total = static_cast<int>(
          std::lround(spec.train_fraction * static_cast<double>(n)));
      const auto train_counts =
          apportion(by_class, labels.size(), train_total);
      Fold fold;
      for (const auto& [label, indices] : by_class) {
        const int take = train_counts.at(label);
        for (std::size_t j = 0; j < indices.size(); ++j) {
          if (static_cast<int>(j) < take) {
            fold.train.push_back(indices[j]);
          } else {
            fold.test.push_back(indices[j]);
          }
        }
      }
      std::sort(fold.train.begin(), fold.train.end());
      std::sort(fold.test.begin(), fold.test.end());
      plan.folds.push_back(std::move(fold));
      return plan;
    }

    case SplitKind::kKfold: {
      if (spec.k < 2 || spec.k > n) {
        throw std::invalid_argument(
            "make_splits: k must lie in [2, dataset size]");
      }
      const auto by_class = shuffled_class_indices(labels, seed);
      std::vector<std::vector<int>> test_sets(
          static_cast<std::size_t>(spec.k));
      // Deal each class round-robin; rotating the starting fold per class
      // keeps fold sizes balanced when classes leave remainders.
      int start = 0;
      for (const auto& [label, indices] : by_class) {
        (void)label;
        for (std::size_t j = 0; j < indices.size(); ++j) {
          const int fold_id =
              (start + static_cast<int>(j)) % spec.k;
          test_sets[static_cast<std::size_t>(fold_id)].push_back(indices[j]);
        }
        start = (start + static_cast<int>(indices.size())) % spec.k;
      }
      plan.folds.resize(static_cast<std::size_t>(spec.k));
      for (int f = 0; f < spec.k; ++f) {
        auto& fold = plan.folds[static_cast<std::size_t>(f)];
        fold.test = test_sets[static_cast<std::size_t>(f)];
        std::sort(fold.test.begin(), fold.test.end());
        for (int g = 0; g < spec.k; ++g) {
          if (g == f) {
            continue;
          }
          fold.train.insert(fold.train.end(),
                            test_sets[static_cast<std::size_t>(g)].begin(),
                            test_sets[static_cast<std::size_t>(g)].end());
        }
        std::sort(fold.train.begin(), fold.train.end());
      }
      return plan;
    }
  }
  throw std::invalid_argument("make_splits: unknown split kind");
}

}  // namespace ictal
