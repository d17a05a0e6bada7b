#pragma once

#include <string>
#include <vector>

#include "ictal/dataio.hpp"
#include "ictal/nn/model.hpp"
#include "ictal/types.hpp"

namespace ictal {

// Rows are true classes, columns are predictions.
struct ConfusionMatrix {
  Eigen::MatrixXi counts;

  explicit ConfusionMatrix(int classes = 0) {
    counts = Eigen::MatrixXi::Zero(classes, classes);
  }
  int classes() const { return static_cast<int>(counts.rows()); }
  int total() const { return counts.sum(); }
  void add(int truth, int predicted) { counts(truth, predicted) += 1; }
};

// Per-class values are one-vs-rest; entries are NaN when the test fold has
// no examples (sensitivity) or no counter-examples (specificity) for that
// class, and such classes are excluded from the macro averages.
struct MetricsReport {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  double sensitivity = 0.0;  // binary: seizure class; multi-class: macro
  double specificity = 0.0;
  std::vector<double> per_class_sensitivity;
  std::vector<double> per_class_specificity;
  int fold_index = -1;
  std::vector<std::string> warnings;
};

MetricsReport metrics_from_confusion(const ConfusionMatrix& confusion,
                                     int seizure_class, int fold_index = -1);

// Builds the confusion matrix by running predict over the test indices.
MetricsReport evaluate(const ModelParams<double>& model,
                       const std::vector<SegmentedExample>& examples,
                       const std::vector<int>& test_indices,
                       int seizure_class, int fold_index = -1);

}  // namespace ictal
