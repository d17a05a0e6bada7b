#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ictal/dataio.hpp"
#include "ictal/nn/model.hpp"
#include "ictal/noise.hpp"
#include "ictal/optim.hpp"

namespace ictal {

enum class OptimizerKind { kAdam, kSgd };

OptimizerKind optimizer_from_string(const std::string& text);
std::string to_string(OptimizerKind kind);

// How corrupted data is used when noise specs are present. Matched trains
// and tests on the corrupted signals; clean-train keeps the training folds
// clean and corrupts only the test folds (ablation).
enum class NoiseProtocol { kMatched, kCleanTrain };

NoiseProtocol noise_protocol_from_string(const std::string& text);
std::string to_string(NoiseProtocol protocol);

struct TrainConfig {
  Index segment_length = 2;
  Index lstm_units = 100;
  Index dense_units = 50;
  int num_classes = 2;
  int batch_size = 64;
  int epochs = 40;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  AdamConfig adam;  // learning_rate is shared with SGD
  std::uint64_t seed = 1;
  Normalization normalization = Normalization::kPerSignalZscore;
  std::vector<NoiseSpec> noise;  // empty: clean data
  NoiseProtocol noise_protocol = NoiseProtocol::kMatched;
  double grad_clip_norm = 0.0;  // 0 disables clipping

  void validate() const;  // throws ConfigError
};

// Entry 0 of loss/accuracy is measured over the training set before any
// update; entry e covers the examples as visited during epoch e.
struct TrainingHistory {
  std::vector<double> loss;
  std::vector<double> accuracy;
  long iterations = 0;  // optimizer steps taken
};

struct TrainOutput {
  ModelParams<double> model;
  TrainingHistory history;
};

// Seeded shuffles, batches of at most batch_size (the final partial batch
// is used), per-example gradients averaged over the batch, one optimizer
// update per batch. Deterministic for a fixed seed regardless of `jobs`;
// batch members may evaluate in parallel but gradients reduce in index
// order. Throws DivergenceError naming epoch and batch on non-finite loss.
TrainOutput train(const TrainConfig& config,
                  const std::vector<SegmentedExample>& examples,
                  const std::vector<int>& train_indices, int jobs = 1);

}  // namespace ictal
