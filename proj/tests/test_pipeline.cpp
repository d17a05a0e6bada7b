#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "ictal/checkpoint.hpp"
#include "ictal/errors.hpp"
#include "ictal/fixture.hpp"
#include "ictal/metrics.hpp"
#include "ictal/nn/init.hpp"
#include "ictal/protocol.hpp"
#include "ictal/results_io.hpp"
#include "ictal/rng.hpp"
#include "ictal/run_config.hpp"
#include "ictal/train.hpp"
#include "support/testenv.hpp"

using namespace ictal;

namespace {

// Small fast defaults for in-test training runs.
TrainConfig tiny_config() {
  TrainConfig config;
  config.segment_length = 16;
  config.lstm_units = 4;
  config.dense_units = 3;
  config.num_classes = 2;
  config.batch_size = 64;
  config.epochs = 2;
  config.seed = 2;
  return config;
}

LabeledDataset subset(const LabeledDataset& data,
                      const std::vector<int>& indices) {
  LabeledDataset out;
  out.problem = data.problem;
  for (int i : indices) {
    out.signals.push_back(data.signals[static_cast<std::size_t>(i)]);
    out.labels.push_back(data.labels[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<int> iota_indices(int n) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    idx[static_cast<std::size_t>(i)] = i;
  }
  return idx;
}

}  // namespace

TEST_CASE("synthetic fixture structure and determinism") {
  const LabeledDataset a = make_synthetic_fixture(1);
  CHECK(a.size() == 200);
  const auto counts = a.class_counts();
  CHECK(counts[0] == 100);
  CHECK(counts[1] == 100);
  CHECK(a.problem.seizure_class == 1);
  for (const auto& signal : a.signals) {
    CHECK(signal.samples.size() == kFixtureSamples);
    CHECK(signal.samples.allFinite());
  }
  // Burst power matches noise power over the window, so class-1 signals
  // carry roughly twice the energy before normalization.
  double p0 = 0.0;
  double p1 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    (a.labels[i] == 0 ? p0 : p1) += a.signals[i].samples.squaredNorm();
  }
  CHECK(p1 / p0 == doctest::Approx(2.0).epsilon(0.1));

  const LabeledDataset b = make_synthetic_fixture(1);
  const LabeledDataset c = make_synthetic_fixture(2);
  CHECK(a.signals[5].samples == b.signals[5].samples);
  CHECK(a.signals[5].samples != c.signals[5].samples);
}

TEST_CASE("train history starts near ln K and counts iterations") {
  const LabeledDataset data = make_synthetic_fixture(1);
  TrainConfig config = tiny_config();
  config.epochs = 1;
  const PreparedData prepared = prepare_data(data, config);
  const auto out =
      train(config, prepared.train_examples, iota_indices(200), 1);
  // 200 examples, batch 64 -> 4 optimizer steps per epoch.
  CHECK(out.history.iterations == 4);
  REQUIRE(out.history.loss.size() == 2);
  CHECK(std::abs(out.history.loss[0] - std::log(2.0)) <= 0.1);
  CHECK(out.history.accuracy[0] >= 0.0);
}

TEST_CASE("train batch accounting uses the final partial batch") {
  const LabeledDataset data = make_synthetic_fixture(1);
  TrainConfig config = tiny_config();
  config.epochs = 3;
  const PreparedData prepared = prepare_data(data, config);
  // 100 training examples, batch 64 -> ceil(100/64) = 2 iterations/epoch.
  const auto out =
      train(config, prepared.train_examples, iota_indices(100), 1);
  CHECK(out.history.iterations == 3 * 2);
}

TEST_CASE("train iteration arithmetic at protocol scale") {
  // 500 examples split 80/20: 400 training examples in batches of 64 make
  // ceil(400/64) = 7 optimizer steps per epoch, 280 over 40 epochs. Tiny
  // two-timestep examples keep this a pure accounting check.
  std::vector<SegmentedExample> examples(400);
  Rng rng(6);
  for (auto& ex : examples) {
    ex.segments = Matrixd(2, 2);
    for (Index k = 0; k < 4; ++k) {
      ex.segments.data()[k] = rng.uniform(-1.0, 1.0);
    }
    ex.label = static_cast<int>(rng.below(2));
  }
  TrainConfig config = tiny_config();
  config.segment_length = 2;
  config.lstm_units = 2;
  config.dense_units = 2;
  config.epochs = 40;
  const auto out = train(config, examples, iota_indices(400), 1);
  CHECK(out.history.iterations == 280);
}

TEST_CASE("run_protocol three-class three-fold table shape") {
  // Twelve signals relabeled over three classes; the protocol emits one
  // report per fold and the cross-validation table label.
  LabeledDataset data;
  data.problem = ClassProblem::named("A-C-E");
  const LabeledDataset fixture = make_synthetic_fixture(1);
  for (int i = 0; i < 12; ++i) {
    data.signals.push_back(fixture.signals[static_cast<std::size_t>(
        i * 8)]);
    data.labels.push_back(i % 3);
  }
  TrainConfig config = tiny_config();
  config.num_classes = 3;
  config.epochs = 1;
  SplitSpec split;
  split.kind = SplitKind::kKfold;
  split.k = 3;
  const ProtocolResult result = run_protocol(data, config, split, 1);
  REQUIRE(result.folds.size() == 3);
  CHECK(result.plan.spec.protocol_label() == "3-folds cross-validation");
  CHECK(result.aggregate.confusion.total() == 12);
  CHECK(result.aggregate.per_class_sensitivity.size() == 3);
  const std::string csv = metrics_table_csv(result, "ictal");
  CHECK(csv.find("3-folds cross-validation") != std::string::npos);
}

TEST_CASE("train error paths") {
  const LabeledDataset data = make_synthetic_fixture(1);
  TrainConfig config = tiny_config();
  const PreparedData prepared = prepare_data(data, config);

  SUBCASE("empty training set") {
    CHECK_THROWS_AS(train(config, prepared.train_examples, {}, 1),
                    ConfigError);
  }
  SUBCASE("segment length mismatch") {
    TrainConfig other = config;
    other.segment_length = 8;
    CHECK_THROWS_AS(train(other, prepared.train_examples, iota_indices(10), 1),
                    ShapeError);
  }
  SUBCASE("invalid segment length in config") {
    TrainConfig other = config;
    other.segment_length = 24;
    CHECK_THROWS_AS(other.validate(), ConfigError);
    other.segment_length = 8192;
    CHECK_THROWS_AS(other.validate(), ConfigError);
  }
  SUBCASE("non-finite input raises a divergence error naming the batch") {
    auto poisoned = prepared.train_examples;
    poisoned[3].segments(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(
        train(config, poisoned, iota_indices(8), 1),
        doctest::Contains("epoch 1"), DivergenceError);
  }
}

TEST_CASE("training on the fixture reduces the loss over 40 epochs") {
  const LabeledDataset data = make_synthetic_fixture(1);
  TrainConfig config;
  config.segment_length = 2;
  config.lstm_units = 16;
  config.dense_units = 8;
  config.num_classes = 2;
  config.batch_size = 64;
  config.epochs = 40;
  config.seed = 2;
  SplitSpec split;
  split.kind = SplitKind::kHoldout;
  split.train_fraction = 0.8;
  const SplitPlan plan = make_splits(data.labels, split, config.seed);
  const PreparedData prepared = prepare_data(data, config);
  const auto out =
      train(config, prepared.train_examples, plan.folds[0].train, 2);
  REQUIRE(out.history.loss.size() == 41);
  CHECK(out.history.loss[40] < out.history.loss[1]);
  CHECK(out.history.accuracy[40] >= 0.99);

  // The trained model separates the held-out examples.
  const MetricsReport report =
      evaluate(out.model, prepared.eval_examples, plan.folds[0].test,
               data.problem.seizure_class);
  CHECK(report.accuracy >= 0.95);
  for (int index : plan.folds[0].test) {
    const auto& example =
        prepared.eval_examples[static_cast<std::size_t>(index)];
    const int predicted = predict(out.model, example.segments);
    CHECK(predicted >= 0);
    CHECK(predicted < 2);
  }
}

TEST_CASE("metrics_from_confusion") {
  SUBCASE("binary formulas with the seizure class positive") {
    ConfusionMatrix confusion(2);
    confusion.counts << 90, 10, 0, 100;
    const MetricsReport report = metrics_from_confusion(confusion, 1);
    CHECK(report.sensitivity == doctest::Approx(1.0));
    CHECK(report.specificity == doctest::Approx(0.9));
    CHECK(report.accuracy == doctest::Approx(0.95));
  }
  SUBCASE("all-correct predictions") {
    ConfusionMatrix confusion(3);
    confusion.counts.setZero();
    confusion.counts(0, 0) = 5;
    confusion.counts(1, 1) = 7;
    confusion.counts(2, 2) = 2;
    const MetricsReport report = metrics_from_confusion(confusion, 2);
    CHECK(report.accuracy == 1.0);
    CHECK(report.sensitivity == 1.0);
    CHECK(report.specificity == 1.0);
  }
  SUBCASE("constant predictor on an unbalanced fold") {
    // 80 non-seizure + 20 seizure, everything predicted class 0.
    ConfusionMatrix confusion(2);
    confusion.counts << 80, 0, 20, 0;
    const MetricsReport report = metrics_from_confusion(confusion, 1);
    CHECK(report.accuracy == doctest::Approx(0.8));
    CHECK(report.sensitivity == doctest::Approx(0.0));
    CHECK(report.specificity == doctest::Approx(1.0));
  }
  SUBCASE("absent class is undefined, warned, and excluded from the macro") {
    ConfusionMatrix confusion(3);
    confusion.counts.setZero();
    confusion.counts(0, 0) = 4;
    confusion.counts(1, 0) = 1;
    confusion.counts(1, 1) = 3;  // class 2 absent
    const MetricsReport report = metrics_from_confusion(confusion, 2);
    CHECK(std::isnan(report.per_class_sensitivity[2]));
    REQUIRE(!report.warnings.empty());
    CHECK(report.warnings[0].find("class 2") != std::string::npos);
    const double macro =
        (report.per_class_sensitivity[0] + report.per_class_sensitivity[1]) /
        2.0;
    CHECK(report.sensitivity == doctest::Approx(macro).epsilon(1e-12));
  }
  SUBCASE("metric algebra: accuracy equals trace over total") {
    ConfusionMatrix confusion(2);
    confusion.counts << 37, 5, 11, 47;
    const MetricsReport report = metrics_from_confusion(confusion, 1);
    const double recomputed =
        static_cast<double>(confusion.counts.trace()) /
        confusion.counts.sum();
    CHECK(std::abs(report.accuracy - recomputed) <= 1e-12);
  }
}

TEST_CASE("evaluate requires a non-empty test set") {
  const auto model = ModelParams<double>::zeros(2, 16, 2, 2);
  CHECK_THROWS_AS(evaluate(model, {}, {}, 1), ConfigError);
}

TEST_CASE("run_protocol kfold covers every example once and aggregates") {
  const LabeledDataset data =
      subset(make_synthetic_fixture(1), [] {
        std::vector<int> idx;
        for (int i = 0; i < 20; ++i) {
          idx.push_back(i);        // class 0
          idx.push_back(100 + i);  // class 1
        }
        return idx;
      }());
  TrainConfig config = tiny_config();
  config.epochs = 1;
  SplitSpec split;
  split.kind = SplitKind::kKfold;
  split.k = 4;
  const ProtocolResult result = run_protocol(data, config, split, 2);
  REQUIRE(result.folds.size() == 4);
  CHECK(result.aggregate.confusion.total() == 40);

  std::set<int> tested;
  for (const auto& fold : result.plan.folds) {
    for (int i : fold.test) {
      CHECK(tested.insert(i).second);
    }
  }
  CHECK(tested.size() == 40);

  double mean_acc = 0.0;
  for (const auto& fold : result.folds) {
    CHECK(fold.metrics.confusion.total() ==
          static_cast<int>(result.plan
                               .folds[static_cast<std::size_t>(
                                   fold.metrics.fold_index)]
                               .test.size()));
    mean_acc += fold.metrics.accuracy;
  }
  CHECK(result.aggregate.accuracy ==
        doctest::Approx(mean_acc / 4.0).epsilon(1e-12));
}

TEST_CASE("run_protocol leave-one-out on ten examples") {
  const LabeledDataset data = subset(
      make_synthetic_fixture(1), {0, 1, 2, 3, 4, 100, 101, 102, 103, 104});
  TrainConfig config = tiny_config();
  config.epochs = 1;
  SplitSpec split;
  split.kind = SplitKind::kLeaveOneOut;
  const ProtocolResult result = run_protocol(data, config, split, 2);
  REQUIRE(result.folds.size() == 10);
  int correct = 0;
  for (const auto& fold : result.folds) {
    CHECK(fold.metrics.confusion.total() == 1);
    correct += fold.metrics.accuracy > 0.5 ? 1 : 0;
  }
  CHECK(result.aggregate.accuracy ==
        doctest::Approx(static_cast<double>(correct) / 10.0).epsilon(1e-12));
}

TEST_CASE("run_protocol is deterministic and jobs-invariant") {
  const LabeledDataset data = subset(make_synthetic_fixture(1), [] {
    std::vector<int> idx;
    for (int i = 0; i < 12; ++i) {
      idx.push_back(i);
      idx.push_back(100 + i);
    }
    return idx;
  }());
  TrainConfig config = tiny_config();
  config.epochs = 1;
  SplitSpec split;
  split.kind = SplitKind::kKfold;
  split.k = 3;
  const auto a = run_protocol(data, config, split, 1);
  const auto b = run_protocol(data, config, split, 2);
  CHECK(protocol_to_json(a, config, "x").dump() ==
        protocol_to_json(b, config, "x").dump());
}

TEST_CASE("prepare_data noise plumbing") {
  const LabeledDataset data = subset(make_synthetic_fixture(1),
                                     {0, 1, 100, 101});
  TrainConfig config = tiny_config();

  SUBCASE("no noise shares one example set") {
    const PreparedData prepared = prepare_data(data, config);
    CHECK(prepared.copies == 1);
    CHECK(prepared.train_examples.size() == 4);
    CHECK(prepared.eval_examples.size() == 4);
  }
  SUBCASE("matched corruption trains and tests on the same noisy data") {
    config.noise = {NoiseSpec{NoiseKind::kWhite, 5.0, 11}};
    const PreparedData prepared = prepare_data(data, config);
    CHECK(prepared.copies == 1);
    CHECK(prepared.train_examples[0].segments ==
          prepared.eval_examples[0].segments);
  }
  SUBCASE("clean_train keeps the training pool clean") {
    config.noise = {NoiseSpec{NoiseKind::kWhite, 5.0, 11}};
    config.noise_protocol = NoiseProtocol::kCleanTrain;
    const PreparedData prepared = prepare_data(data, config);
    CHECK(prepared.train_examples[0].segments !=
          prepared.eval_examples[0].segments);
  }
  SUBCASE("multiple specs augment the training pool") {
    config.noise = {NoiseSpec{NoiseKind::kWhite, 5.0, 11},
                    NoiseSpec{NoiseKind::kWhite, 0.0, 12}};
    const PreparedData prepared = prepare_data(data, config);
    CHECK(prepared.copies == 2);
    CHECK(prepared.train_examples.size() == 8);
    CHECK(prepared.eval_examples.size() == 4);
  }
}

TEST_CASE("snr_sweep emits one point per kind and value") {
  const LabeledDataset data = subset(make_synthetic_fixture(1), [] {
    std::vector<int> idx;
    for (int i = 0; i < 10; ++i) {
      idx.push_back(i);
      idx.push_back(100 + i);
    }
    return idx;
  }());
  TrainConfig config = tiny_config();
  config.epochs = 1;
  SplitSpec split;
  split.kind = SplitKind::kHoldout;
  split.train_fraction = 0.8;
  const std::vector<double> snrs = {0.0, 10.0};

  for (SweepMode mode :
       {SweepMode::kRetrainPerPoint, SweepMode::kReuseAugmentedModel}) {
    const SweepResult result = snr_sweep(
        data, config, split, {NoiseKind::kWhite}, snrs, mode, 2);
    REQUIRE(result.points.size() == 2);
    CHECK(result.axis_name == "snr_db");
    CHECK(result.points[0].axis_value == 0.0);
    CHECK(result.points[1].axis_value == 10.0);
    for (const auto& point : result.points) {
      CHECK(point.kind == NoiseKind::kWhite);
      CHECK(point.folds.size() == 1);
    }
    // CSV: header plus one row per point.
    const std::string csv = sweep_csv(result);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  }
}

TEST_CASE("default sweep axes") {
  CHECK(default_snr_axis_db() ==
        std::vector<double>{-20, -15, -10, -5, 0, 5, 10, 15, 20});
  CHECK(default_segment_lengths().front() == 1);
  CHECK(default_segment_lengths().back() == 4096);
  CHECK(default_segment_lengths().size() == 13);
}

TEST_CASE("segment_length_sweep covers the degenerate single-step case") {
  const LabeledDataset data = subset(make_synthetic_fixture(1), [] {
    std::vector<int> idx;
    for (int i = 0; i < 10; ++i) {
      idx.push_back(i);
      idx.push_back(100 + i);
    }
    return idx;
  }());
  TrainConfig config = tiny_config();
  config.epochs = 1;
  SplitSpec split;
  split.kind = SplitKind::kHoldout;
  split.train_fraction = 0.8;
  // 256 = the fixture signal length, so the last point runs with M = 1.
  const SweepResult result =
      segment_length_sweep(data, config, split, {16, 256}, 1);
  REQUIRE(result.points.size() == 2);
  CHECK(result.points[1].axis_value == 256.0);
  CHECK(!result.points[1].kind.has_value());
  CHECK(result.points[1].aggregate.confusion.total() == 4);
}

TEST_CASE("checkpoint round-trip is bit-exact") {
  testenv::TempDir tmp;
  Rng rng(31);
  const auto model = init_params<double>(5, 4, 3, 3, rng);
  TrainConfig config = tiny_config();
  config.noise = {NoiseSpec{NoiseKind::kMuscle, -7.5, 99}};
  const std::string path = tmp.str("model.ckpt");
  save_checkpoint(path, model, config);

  const Checkpoint loaded = load_checkpoint(path);
  const auto ta = tensor_list(model);
  const auto tb = tensor_list(loaded.model);
  for (std::size_t k = 0; k < ta.size(); ++k) {
    REQUIRE(ta[k].size == tb[k].size);
    for (Index i = 0; i < ta[k].size; ++i) {
      CHECK(ta[k].data[i] == tb[k].data[i]);
    }
  }
  CHECK(loaded.config.segment_length == config.segment_length);
  CHECK(loaded.config.noise.size() == 1);
  CHECK(loaded.config.noise[0].snr_db == -7.5);
  CHECK(train_config_to_json(loaded.config).dump() ==
        train_config_to_json(config).dump());

  CHECK_THROWS_AS(load_checkpoint(tmp.str("missing.ckpt")), DataError);
}

TEST_CASE("run_config parsing") {
  testenv::TempDir tmp;

  SUBCASE("unknown keys are rejected by name") {
    testenv::write_file(tmp.str("bad.json"), R"({"epochz": 3})");
    CHECK_THROWS_WITH_AS(load_run_config(tmp.str("bad.json")),
                         doctest::Contains("epochz"), ConfigError);
  }
  SUBCASE("values land in the right fields") {
    testenv::write_file(tmp.str("ok.json"), R"({
      "manifest": "synthetic",
      "problem": "A-E",
      "segment_length": 8,
      "epochs": 3,
      "split": "kfold:5",
      "noise": ["muscle:-5", {"kind": "white", "snr_db": 2.5, "seed": 7}],
      "out_dir": "runs/x",
      "jobs": 2
    })");
    RunConfig rc = load_run_config(tmp.str("ok.json"));
    finalize_run_config(rc);
    CHECK(rc.train.segment_length == 8);
    CHECK(rc.train.epochs == 3);
    CHECK(rc.split.kind == SplitKind::kKfold);
    CHECK(rc.split.k == 5);
    REQUIRE(rc.train.noise.size() == 2);
    CHECK(rc.train.noise[0].kind == NoiseKind::kMuscle);
    CHECK(rc.train.noise[0].snr_db == -5.0);
    CHECK(rc.train.noise[0].seed != 0);  // derived
    CHECK(rc.train.noise[1].seed == 7);  // explicit
    CHECK(rc.out_dir == "runs/x");
    CHECK(rc.jobs == 2);
  }
  SUBCASE("bad noise entry") {
    testenv::write_file(tmp.str("bad2.json"), R"({"noise": ["muscle"]})");
    CHECK_THROWS_AS(load_run_config(tmp.str("bad2.json")), ConfigError);
  }
}
