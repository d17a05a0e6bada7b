#include "ictal/metrics.hpp"

#include <cmath>
#include <limits>

#include "ictal/errors.hpp"

namespace ictal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of_defined(const std::vector<double>& values) {
  double sum = 0.0;
  int n = 0;
  for (double v : values) {
    if (!std::isnan(v)) {
      sum += v;
      ++n;
    }
  }
  return n > 0 ? sum / n : kNaN;
}

}  // namespace

MetricsReport metrics_from_confusion(const ConfusionMatrix& confusion,
                                     int seizure_class, int fold_index) {
  const int k = confusion.classes();
  const int total = confusion.total();
  if (k < 2 || total < 1) {
    throw std::invalid_argument("metrics: need >= 2 classes and >= 1 count");
  }

  MetricsReport report;
  report.confusion = confusion;
  report.fold_index = fold_index;
  report.accuracy =
      static_cast<double>(confusion.counts.trace()) / total;

  report.per_class_sensitivity.assign(static_cast<std::size_t>(k), kNaN);
  report.per_class_specificity.assign(static_cast<std::size_t>(k), kNaN);
  for (int c = 0; c < k; ++c) {
    const int tp = confusion.counts(c, c);
    const int actual = confusion.counts.row(c).sum();
    const int predicted = confusion.counts.col(c).sum();
    const int fp = predicted - tp;
    const int tn = total - actual - fp;
    if (actual > 0) {
      report.per_class_sensitivity[static_cast<std::size_t>(c)] =
          static_cast<double>(tp) / actual;
    } else {
      report.warnings.push_back("class " + std::to_string(c) +
                                " absent from the test set; its metrics are "
                                "undefined and excluded from macro averages");
    }
    if (total - actual > 0) {
      report.per_class_specificity[static_cast<std::size_t>(c)] =
          static_cast<double>(tn) / (total - actual);
    }
  }

  if (k == 2 && seizure_class >= 0) {
    report.sensitivity =
        report.per_class_sensitivity[static_cast<std::size_t>(seizure_class)];
    report.specificity =
        report.per_class_specificity[static_cast<std::size_t>(seizure_class)];
  } else {
    report.sensitivity = mean_of_defined(report.per_class_sensitivity);
    report.specificity = mean_of_defined(report.per_class_specificity);
  }
  return report;
}

MetricsReport evaluate(const ModelParams<double>& model,
                       const std::vector<SegmentedExample>& examples,
                       const std::vector<int>& test_indices,
                       int seizure_class, int fold_index) {
  if (test_indices.empty()) {
    throw ConfigError("evaluate: empty test set");
  }
  ConfusionMatrix confusion(static_cast<int>(model.classes()));
  for (int index : test_indices) {
    const auto& example = examples.at(static_cast<std::size_t>(index));
    if (example.label < 0 || example.label >= confusion.classes()) {
      throw std::invalid_argument("evaluate: label out of range");
    }
    confusion.add(example.label, predict(model, example.segments));
  }
  return metrics_from_confusion(confusion, seizure_class, fold_index);
}

}  // namespace ictal
