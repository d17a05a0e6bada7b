#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ictal/dataio.hpp"
#include "ictal/metrics.hpp"
#include "ictal/splits.hpp"
#include "ictal/train.hpp"

namespace ictal {

// Dataset views after corruption, normalization and segmentation.
// eval_examples is what fold test indices refer to. train_examples holds
// `copies` corrupted replicas back to back (copies == 1 when the training
// pool is not augmented); training index i of copy s lives at s*N + i.
struct PreparedData {
  std::vector<SegmentedExample> eval_examples;
  std::vector<SegmentedExample> train_examples;
  int copies = 1;
  std::vector<std::string> warnings;
};

PreparedData prepare_data(const LabeledDataset& data,
                          const TrainConfig& config);

struct FoldResult {
  MetricsReport metrics;
  TrainingHistory history;
};

struct ProtocolResult {
  std::vector<FoldResult> folds;
  MetricsReport aggregate;  // metric means over folds; confusion pooled
  SplitPlan plan;
};

// Trains and evaluates one model per fold. Fold seeds derive from
// config.seed and the fold index, so results are identical for any `jobs`.
// When checkpoint_dir is set, each fold's model is written there.
ProtocolResult run_protocol(const LabeledDataset& data,
                            const TrainConfig& config, const SplitSpec& split,
                            int jobs = 1,
                            const std::optional<std::string>& checkpoint_dir =
                                std::nullopt);

MetricsReport aggregate_metrics(const std::vector<FoldResult>& folds,
                                int classes);

enum class SweepMode { kRetrainPerPoint, kReuseAugmentedModel };

SweepMode sweep_mode_from_string(const std::string& text);
std::string to_string(SweepMode mode);

struct SweepPoint {
  double axis_value = 0.0;
  std::optional<NoiseKind> kind;  // empty for clean runs
  MetricsReport aggregate;
  std::vector<MetricsReport> folds;
};

struct SweepResult {
  std::string axis_name;  // "snr_db" or "segment_length"
  std::vector<SweepPoint> points;
};

const std::vector<double>& default_snr_axis_db();       // -20..20 in 5 dB steps
const std::vector<Index>& default_segment_lengths();    // powers of two to 4096

// One protocol run per (kind, snr) with matched corruption. Retrain mode
// trains a fresh model per point; reuse mode trains one model per kind on
// the union of all swept SNRs and evaluates it at each point.
SweepResult snr_sweep(const LabeledDataset& data, const TrainConfig& config,
                      const SplitSpec& split,
                      const std::vector<NoiseKind>& kinds,
                      const std::vector<double>& snr_values_db,
                      SweepMode mode = SweepMode::kRetrainPerPoint,
                      int jobs = 1);

// One protocol run per segment length.
SweepResult segment_length_sweep(const LabeledDataset& data,
                                 const TrainConfig& config,
                                 const SplitSpec& split,
                                 const std::vector<Index>& lengths,
                                 int jobs = 1);

}  // namespace ictal
