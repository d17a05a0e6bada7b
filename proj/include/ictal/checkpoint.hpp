#pragma once

#include <string>

#include "ictal/nn/model.hpp"
#include "ictal/train.hpp"

namespace ictal {

struct Checkpoint {
  ModelParams<double> model;
  TrainConfig config;
};

// Versioned binary container: dimensions, the producing TrainConfig as
// JSON, then raw little-endian coefficients in tensor_list order.
// Write-then-read restores every coefficient bit-exactly.
void save_checkpoint(const std::string& path, const ModelParams<double>& model,
                     const TrainConfig& config);

Checkpoint load_checkpoint(const std::string& path);

}  // namespace ictal
