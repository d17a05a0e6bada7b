#include "ictal/protocol.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "ictal/checkpoint.hpp"
#include "ictal/errors.hpp"
#include "ictal/noise.hpp"
#include "ictal/parallel.hpp"
#include "ictal/rng.hpp"

namespace ictal {

namespace {

constexpr std::uint64_t kFoldStream = 0x666F6C64;  // "fold"

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<SegmentedExample> normalize_and_segment(
    const LabeledDataset& data, const TrainConfig& config,
    std::vector<std::string>* warnings) {
  return segment_dataset(normalize(data, config.normalization, warnings),
                         config.segment_length);
}

}  // namespace

PreparedData prepare_data(const LabeledDataset& data,
                          const TrainConfig& config) {
  PreparedData out;
  if (config.noise.empty()) {
    out.eval_examples = normalize_and_segment(data, config, &out.warnings);
    out.train_examples = out.eval_examples;
    out.copies = 1;
    return out;
  }
  if (config.noise.size() == 1) {
    const LabeledDataset corrupted = corrupt_dataset(data, config.noise[0]);
    out.eval_examples =
        normalize_and_segment(corrupted, config, &out.warnings);
    if (config.noise_protocol == NoiseProtocol::kMatched) {
      out.train_examples = out.eval_examples;
    } else {
      out.train_examples = normalize_and_segment(data, config, &out.warnings);
    }
    out.copies = 1;
    return out;
  }
  // Several specs: the training pool is the corrupted copies back to back
  // (augmentation); evaluation stays on the clean data.
  out.eval_examples = normalize_and_segment(data, config, &out.warnings);
  out.copies = static_cast<int>(config.noise.size());
  for (const auto& spec : config.noise) {
    const auto copy =
        normalize_and_segment(corrupt_dataset(data, spec), config,
                              &out.warnings);
    out.train_examples.insert(out.train_examples.end(), copy.begin(),
                              copy.end());
  }
  return out;
}

MetricsReport aggregate_metrics(const std::vector<FoldResult>& folds,
                                int classes) {
  MetricsReport agg;
  agg.confusion = ConfusionMatrix(classes);
  agg.fold_index = -1;

  const auto fold_mean = [&](auto&& getter) {
    double sum = 0.0;
    int defined = 0;
    for (const auto& fold : folds) {
      const double v = getter(fold.metrics);
      if (!std::isnan(v)) {
        sum += v;
        ++defined;
      }
    }
    return defined > 0 ? sum / defined : kNaN;
  };

  agg.accuracy = fold_mean([](const MetricsReport& m) { return m.accuracy; });
  agg.sensitivity =
      fold_mean([](const MetricsReport& m) { return m.sensitivity; });
  agg.specificity =
      fold_mean([](const MetricsReport& m) { return m.specificity; });
  agg.per_class_sensitivity.resize(static_cast<std::size_t>(classes));
  agg.per_class_specificity.resize(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    const auto cs = static_cast<std::size_t>(c);
    agg.per_class_sensitivity[cs] = fold_mean(
        [cs](const MetricsReport& m) { return m.per_class_sensitivity[cs]; });
    agg.per_class_specificity[cs] = fold_mean(
        [cs](const MetricsReport& m) { return m.per_class_specificity[cs]; });
  }
  for (const auto& fold : folds) {
    agg.confusion.counts += fold.metrics.confusion.counts;
  }
  return agg;
}

ProtocolResult run_protocol(const LabeledDataset& data,
                            const TrainConfig& config, const SplitSpec& split,
                            int jobs,
                            const std::optional<std::string>& checkpoint_dir) {
  config.validate();
  if (config.num_classes != data.problem.num_classes) {
    throw ConfigError("run_protocol: config num_classes does not match the "
                      "problem");
  }

  ProtocolResult result;
  result.plan = make_splits(data.labels, split, config.seed);
  const PreparedData prepared = prepare_data(data, config);
  const int n = static_cast<int>(data.size());
  const int folds = static_cast<int>(result.plan.folds.size());
  result.folds.resize(static_cast<std::size_t>(folds));

  const int fold_jobs = std::min(jobs, folds);
  const int inner_jobs = folds == 1 ? jobs : 1;

  parallel_for(folds, fold_jobs, [&](int f) {
    const Fold& fold = result.plan.folds[static_cast<std::size_t>(f)];
    TrainConfig fold_config = config;
    fold_config.seed =
        derive_seed(config.seed,
                    kFoldStream + static_cast<std::uint64_t>(f));

    std::vector<int> train_idx;
    train_idx.reserve(fold.train.size() *
                      static_cast<std::size_t>(prepared.copies));
    for (int copy = 0; copy < prepared.copies; ++copy) {
      for (int i : fold.train) {
        train_idx.push_back(copy * n + i);
      }
    }

    TrainOutput trained =
        train(fold_config, prepared.train_examples, train_idx, inner_jobs);
    auto& slot = result.folds[static_cast<std::size_t>(f)];
    slot.metrics = evaluate(trained.model, prepared.eval_examples, fold.test,
                            data.problem.seizure_class, f);
    slot.history = std::move(trained.history);

    if (checkpoint_dir) {
      char name[32];
      std::snprintf(name, sizeof(name), "fold_%03d.ckpt", f);
      const auto path = std::filesystem::path(*checkpoint_dir) / name;
      save_checkpoint(path.string(), trained.model, fold_config);
    }
  });

  result.aggregate = aggregate_metrics(result.folds, config.num_classes);
  return result;
}

SweepMode sweep_mode_from_string(const std::string& text) {
  if (text == "retrain") {
    return SweepMode::kRetrainPerPoint;
  }
  if (text == "reuse") {
    return SweepMode::kReuseAugmentedModel;
  }
  throw ConfigError("unknown sweep mode: " + text);
}

std::string to_string(SweepMode mode) {
  return mode == SweepMode::kRetrainPerPoint ? "retrain" : "reuse";
}

const std::vector<double>& default_snr_axis_db() {
  static const std::vector<double> axis = {-20, -15, -10, -5, 0,
                                           5,   10,  15,  20};
  return axis;
}

const std::vector<Index>& default_segment_lengths() {
  static const std::vector<Index> lengths = {1,   2,   4,    8,    16,  32, 64,
                                             128, 256, 512, 1024, 2048, 4096};
  return lengths;
}

SweepResult snr_sweep(const LabeledDataset& data, const TrainConfig& config,
                      const SplitSpec& split,
                      const std::vector<NoiseKind>& kinds,
                      const std::vector<double>& snr_values_db,
                      SweepMode mode, int jobs) {
  if (snr_values_db.empty() || kinds.empty()) {
    throw ConfigError("snr_sweep: need at least one SNR value and one kind");
  }
  SweepResult result;
  result.axis_name = "snr_db";

  const auto point_seed = [&](std::size_t kind_idx, std::size_t snr_idx) {
    return derive_seed(config.seed,
                       0x736E7200ULL + kind_idx * 1000 + snr_idx);  // "snr"
  };

  if (mode == SweepMode::kRetrainPerPoint) {
    for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
      for (std::size_t si = 0; si < snr_values_db.size(); ++si) {
        TrainConfig point_config = config;
        point_config.noise = {
            NoiseSpec{kinds[ki], snr_values_db[si], point_seed(ki, si)}};
        point_config.noise_protocol = NoiseProtocol::kMatched;
        ProtocolResult run = run_protocol(data, point_config, split, jobs);
        SweepPoint point;
        point.axis_value = snr_values_db[si];
        point.kind = kinds[ki];
        point.aggregate = run.aggregate;
        for (const auto& fold : run.folds) {
          point.folds.push_back(fold.metrics);
        }
        result.points.push_back(std::move(point));
      }
    }
    return result;
  }

  // Reuse mode: one model per kind trained on all swept SNRs, evaluated on
  // each SNR's corrupted test folds.
  for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
    TrainConfig train_config = config;
    train_config.noise.clear();
    for (std::size_t si = 0; si < snr_values_db.size(); ++si) {
      train_config.noise.push_back(
          NoiseSpec{kinds[ki], snr_values_db[si], point_seed(ki, si)});
    }
    const SplitPlan plan = make_splits(data.labels, split, config.seed);
    const PreparedData prepared = prepare_data(data, train_config);
    const int n = static_cast<int>(data.size());

    std::vector<ModelParams<double>> fold_models;
    fold_models.reserve(plan.folds.size());
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
      TrainConfig fold_config = train_config;
      fold_config.seed =
          derive_seed(config.seed, kFoldStream + static_cast<std::uint64_t>(f));
      std::vector<int> train_idx;
      for (int copy = 0; copy < prepared.copies; ++copy) {
        for (int i : plan.folds[f].train) {
          train_idx.push_back(copy * n + i);
        }
      }
      fold_models.push_back(
          train(fold_config, prepared.train_examples, train_idx, jobs).model);
    }

    for (std::size_t si = 0; si < snr_values_db.size(); ++si) {
      TrainConfig eval_config = config;
      eval_config.noise = {
          NoiseSpec{kinds[ki], snr_values_db[si], point_seed(ki, si)}};
      eval_config.noise_protocol = NoiseProtocol::kMatched;
      const PreparedData eval_data = prepare_data(data, eval_config);

      SweepPoint point;
      point.axis_value = snr_values_db[si];
      point.kind = kinds[ki];
      std::vector<FoldResult> fold_results(plan.folds.size());
      for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        fold_results[f].metrics =
            evaluate(fold_models[f], eval_data.eval_examples,
                     plan.folds[f].test, data.problem.seizure_class,
                     static_cast<int>(f));
        point.folds.push_back(fold_results[f].metrics);
      }
      point.aggregate = aggregate_metrics(fold_results, config.num_classes);
      result.points.push_back(std::move(point));
    }
  }
  return result;
}

SweepResult segment_length_sweep(const LabeledDataset& data,
                                 const TrainConfig& config,
                                 const SplitSpec& split,
                                 const std::vector<Index>& lengths,
                                 int jobs) {
  if (lengths.empty()) {
    throw ConfigError("segment_length_sweep: need at least one length");
  }
  SweepResult result;
  result.axis_name = "segment_length";
  for (Index length : lengths) {
    TrainConfig point_config = config;
    point_config.segment_length = length;
    ProtocolResult run = run_protocol(data, point_config, split, jobs);
    SweepPoint point;
    point.axis_value = static_cast<double>(length);
    if (!config.noise.empty()) {
      point.kind = config.noise.front().kind;
    }
    point.aggregate = run.aggregate;
    for (const auto& fold : run.folds) {
      point.folds.push_back(fold.metrics);
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

}  // namespace ictal
