#include "ictal/train.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ictal/errors.hpp"
#include "ictal/nn/init.hpp"
#include "ictal/parallel.hpp"
#include "ictal/rng.hpp"

namespace ictal {

namespace {

// Sub-stream tags for deriving independent RNG streams from the run seed.
constexpr std::uint64_t kInitStream = 0x696E6974;     // "init"
constexpr std::uint64_t kShuffleStream = 0x73687566;  // "shuf"

bool is_power_of_two(Index x) { return x > 0 && (x & (x - 1)) == 0; }

double global_grad_norm(const ModelParams<double>& grads) {
  double sum = 0.0;
  for (const auto& t : tensor_list(grads)) {
    sum += Eigen::Map<const Vectord>(t.data, t.size).squaredNorm();
  }
  return std::sqrt(sum);
}

void scale_params(ModelParams<double>& p, double factor) {
  for (auto& t : tensor_list(p)) {
    Eigen::Map<Vectord>(t.data, t.size) *= factor;
  }
}

void add_params(ModelParams<double>& dst, const ModelParams<double>& src) {
  auto td = tensor_list(dst);
  const auto ts = tensor_list(src);
  for (std::size_t k = 0; k < td.size(); ++k) {
    Eigen::Map<Vectord>(td[k].data, td[k].size) +=
        Eigen::Map<const Vectord>(ts[k].data, ts[k].size);
  }
}

}  // namespace

OptimizerKind optimizer_from_string(const std::string& text) {
  if (text == "adam") {
    return OptimizerKind::kAdam;
  }
  if (text == "sgd") {
    return OptimizerKind::kSgd;
  }
  throw ConfigError("unknown optimizer: " + text);
}

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

NoiseProtocol noise_protocol_from_string(const std::string& text) {
  if (text == "matched") {
    return NoiseProtocol::kMatched;
  }
  if (text == "clean_train") {
    return NoiseProtocol::kCleanTrain;
  }
  throw ConfigError("unknown noise protocol: " + text);
}

std::string to_string(NoiseProtocol protocol) {
  return protocol == NoiseProtocol::kMatched ? "matched" : "clean_train";
}

void TrainConfig::validate() const {
  if (!is_power_of_two(segment_length) || segment_length > 4096) {
    throw ConfigError("segment_length must be a power of two dividing 4096");
  }
  if (lstm_units < 1 || dense_units < 1 || num_classes < 2 ||
      batch_size < 1 || epochs < 1) {
    throw ConfigError("lstm_units, dense_units, batch_size and epochs must "
                      "be positive and num_classes >= 2");
  }
  if (grad_clip_norm < 0.0) {
    throw ConfigError("grad_clip_norm must be >= 0");
  }
  try {
    adam.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (const auto& spec : noise) {
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
}

TrainOutput train(const TrainConfig& config,
                  const std::vector<SegmentedExample>& examples,
                  const std::vector<int>& train_indices, int jobs) {
  config.validate();
  if (train_indices.empty()) {
    throw ConfigError("train: empty training set");
  }
  for (int index : train_indices) {
    const auto& ex = examples.at(static_cast<std::size_t>(index));
    if (ex.segments.cols() != config.segment_length) {
      throw ShapeError("train: examples are not segmented with the "
                       "configured segment length");
    }
    if (ex.label < 0 || ex.label >= config.num_classes) {
      throw std::invalid_argument("train: label out of range");
    }
  }

  Rng init_rng(derive_seed(config.seed, kInitStream));
  TrainOutput out;
  out.model = init_params<double>(config.lstm_units, config.segment_length,
                                  config.dense_units, config.num_classes,
                                  init_rng);
  OptimizerState<double> state = OptimizerState<double>::like(out.model);

  const int n = static_cast<int>(train_indices.size());
  const int batch = std::min(config.batch_size, n);

  struct MemberResult {
    ModelParams<double> grad;
    double loss = 0.0;
    bool correct = false;
  };
  std::vector<MemberResult> members(static_cast<std::size_t>(batch));

  const auto pass_over_batch = [&](const std::vector<int>& order, int begin,
                                   int end) {
    parallel_for(end - begin, jobs, [&](int offset) {
      const auto& example = examples[static_cast<std::size_t>(
          order[static_cast<std::size_t>(begin + offset)])];
      const ForwardTrace<double> trace =
          model_forward(out.model, example.segments);
      auto& slot = members[static_cast<std::size_t>(offset)];
      slot.loss = loss_from_trace(trace, example.label);
      slot.correct =
          predict_from_posterior(trace.posterior) == example.label;
      slot.grad = model_backward(out.model, trace, example.label);
    });
  };

  // Pre-update baseline over the whole training set (epoch 0 entry).
  {
    double loss_sum = 0.0;
    int correct = 0;
    std::vector<double> losses(static_cast<std::size_t>(n));
    std::vector<char> hits(static_cast<std::size_t>(n));
    parallel_for(n, jobs, [&](int i) {
      const auto& example =
          examples[static_cast<std::size_t>(train_indices[
              static_cast<std::size_t>(i)])];
      const ForwardTrace<double> trace =
          model_forward(out.model, example.segments);
      losses[static_cast<std::size_t>(i)] =
          loss_from_trace(trace, example.label);
      hits[static_cast<std::size_t>(i)] =
          predict_from_posterior(trace.posterior) == example.label;
    });
    for (int i = 0; i < n; ++i) {
      loss_sum += losses[static_cast<std::size_t>(i)];
      correct += hits[static_cast<std::size_t>(i)] ? 1 : 0;
    }
    out.history.loss.push_back(loss_sum / n);
    out.history.accuracy.push_back(static_cast<double>(correct) / n);
  }

  Rng shuffle_rng(derive_seed(config.seed, kShuffleStream));
  std::vector<int> order = train_indices;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(order, shuffle_rng);
    double epoch_loss_sum = 0.0;
    int epoch_correct = 0;
    int batch_id = 0;

    for (int begin = 0; begin < n; begin += batch, ++batch_id) {
      const int end = std::min(begin + batch, n);
      const int size = end - begin;
      pass_over_batch(order, begin, end);

      double batch_loss = 0.0;
      for (int k = 0; k < size; ++k) {
        const auto& slot = members[static_cast<std::size_t>(k)];
        batch_loss += slot.loss;
        epoch_correct += slot.correct ? 1 : 0;
      }
      batch_loss /= size;
      epoch_loss_sum += batch_loss * size;
      if (!std::isfinite(batch_loss)) {
        throw DivergenceError("non-finite training loss at epoch " +
                              std::to_string(epoch) + ", batch " +
                              std::to_string(batch_id));
      }

      // Ordered reduction keeps results identical for any `jobs`.
      ModelParams<double> grad = std::move(members[0].grad);
      for (int k = 1; k < size; ++k) {
        add_params(grad, members[static_cast<std::size_t>(k)].grad);
      }
      scale_params(grad, 1.0 / size);
      if (config.grad_clip_norm > 0.0) {
        const double norm = global_grad_norm(grad);
        if (norm > config.grad_clip_norm) {
          scale_params(grad, config.grad_clip_norm / norm);
        }
      }

      if (config.optimizer == OptimizerKind::kAdam) {
        adam_step(out.model, grad, config.adam, state);
      } else {
        sgd_step(out.model, grad, config.adam.learning_rate);
      }
      out.history.iterations += 1;
    }

    out.history.loss.push_back(epoch_loss_sum / n);
    out.history.accuracy.push_back(static_cast<double>(epoch_correct) / n);
  }
  return out;
}

}  // namespace ictal
