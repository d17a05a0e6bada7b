// Batch CLI for the EEG seizure-detection pipeline: dataset ingestion,
// artifact synthesis, training, evaluation, sweeps, and gradient checks.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 training divergence, 1 anything else.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ictal/checkpoint.hpp"
#include "ictal/dataio.hpp"
#include "ictal/errors.hpp"
#include "ictal/fixture.hpp"
#include "ictal/metrics.hpp"
#include "ictal/nn/gradcheck.hpp"
#include "ictal/nn/init.hpp"
#include "ictal/noise.hpp"
#include "ictal/protocol.hpp"
#include "ictal/results_io.hpp"
#include "ictal/run_config.hpp"
#include "ictal/splits.hpp"
#include "ictal/train.hpp"

namespace fs = std::filesystem;
using namespace ictal;

namespace {

constexpr const char* kMethodLabel = "ictal";

// Flag storage plus the CLI11 options, so explicitly passed flags can
// override config-file values afterwards.
struct CommonFlags {
  std::string config_path;
  std::string manifest;
  std::string problem;
  std::string split;
  std::string out_dir;
  std::string normalization;
  std::string noise_protocol;
  std::string optimizer;
  std::uint64_t seed = 0;
  std::uint64_t fixture_seed = 0;
  int jobs = 0;
  int epochs = 0;
  int batch_size = 0;
  long segment_length = 0;
  long lstm_units = 0;
  long dense_units = 0;
  double learning_rate = 0.0;
  double grad_clip = 0.0;
  std::vector<std::string> noise;
  bool save_checkpoints = false;

  CLI::Option* manifest_opt = nullptr;
  CLI::Option* problem_opt = nullptr;
  CLI::Option* split_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* normalization_opt = nullptr;
  CLI::Option* noise_protocol_opt = nullptr;
  CLI::Option* optimizer_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* fixture_seed_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
  CLI::Option* epochs_opt = nullptr;
  CLI::Option* batch_opt = nullptr;
  CLI::Option* segment_opt = nullptr;
  CLI::Option* lstm_opt = nullptr;
  CLI::Option* dense_opt = nullptr;
  CLI::Option* lr_opt = nullptr;
  CLI::Option* clip_opt = nullptr;
  CLI::Option* noise_opt = nullptr;
  CLI::Option* ckpt_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration file");
    manifest_opt = cmd->add_option(
        "--manifest", manifest,
        "dataset manifest path, or 'synthetic' for the built-in fixture");
    problem_opt = cmd->add_option(
        "--problem", problem,
        "class problem: A-E, ABCD-E, A-C-E, or A-B-C-D-E");
    split_opt = cmd->add_option("--split", split,
                                "holdout:<frac> | kfold:<k> | loo");
    seed_opt = cmd->add_option("--seed", seed, "run seed");
    out_opt = cmd->add_option("--out", out_dir, "output directory");
    jobs_opt = cmd->add_option("--jobs", jobs,
                               "max parallel folds/sweep points");
    noise_opt = cmd->add_option("--noise", noise,
                                "noise spec kind:snr_db (repeatable)");
    segment_opt = cmd->add_option("--segment-length", segment_length,
                                  "segment length L (power of two)");
    normalization_opt = cmd->add_option("--normalization", normalization,
                                        "raw | zscore");
    epochs_opt = cmd->add_option("--epochs", epochs, "training epochs");
    batch_opt = cmd->add_option("--batch-size", batch_size, "batch size");
    lstm_opt = cmd->add_option("--lstm-units", lstm_units, "LSTM units");
    dense_opt = cmd->add_option("--dense-units", dense_units, "dense units");
    optimizer_opt = cmd->add_option("--optimizer", optimizer, "adam | sgd");
    lr_opt = cmd->add_option("--learning-rate", learning_rate,
                             "optimizer learning rate");
    clip_opt = cmd->add_option("--grad-clip", grad_clip,
                               "global-norm gradient clip (0 disables)");
    noise_protocol_opt = cmd->add_option("--noise-protocol", noise_protocol,
                                         "matched | clean_train");
    fixture_seed_opt = cmd->add_option("--fixture-seed", fixture_seed,
                                       "seed for the synthetic fixture");
    ckpt_opt = cmd->add_flag("--save-checkpoints", save_checkpoints,
                             "write one checkpoint per fold");
  }

  // Defaults < config file < explicit flags.
  RunConfig resolve() const {
    RunConfig rc;
    if (!config_path.empty()) {
      rc = load_run_config(config_path);
    }
    if (manifest_opt->count() > 0) rc.manifest = manifest;
    if (problem_opt->count() > 0) rc.problem = problem;
    if (split_opt->count() > 0) rc.split = SplitSpec::parse(split);
    if (seed_opt->count() > 0) rc.train.seed = seed;
    if (out_opt->count() > 0) rc.out_dir = out_dir;
    if (jobs_opt->count() > 0) rc.jobs = jobs;
    if (noise_opt->count() > 0) {
      rc.train.noise.clear();
      for (const auto& entry : noise) {
        rc.train.noise.push_back(parse_noise_flag(entry));
      }
    }
    if (segment_opt->count() > 0) rc.train.segment_length = segment_length;
    if (normalization_opt->count() > 0) {
      rc.train.normalization = normalization_from_string(normalization);
    }
    if (epochs_opt->count() > 0) rc.train.epochs = epochs;
    if (batch_opt->count() > 0) rc.train.batch_size = batch_size;
    if (lstm_opt->count() > 0) rc.train.lstm_units = lstm_units;
    if (dense_opt->count() > 0) rc.train.dense_units = dense_units;
    if (optimizer_opt->count() > 0) {
      rc.train.optimizer = optimizer_from_string(optimizer);
    }
    if (lr_opt->count() > 0) rc.train.adam.learning_rate = learning_rate;
    if (clip_opt->count() > 0) rc.train.grad_clip_norm = grad_clip;
    if (noise_protocol_opt->count() > 0) {
      rc.train.noise_protocol = noise_protocol_from_string(noise_protocol);
    }
    if (fixture_seed_opt->count() > 0) rc.fixture_seed = fixture_seed;
    if (ckpt_opt->count() > 0) rc.save_checkpoints = save_checkpoints;
    finalize_run_config(rc);
    return rc;
  }
};

LabeledDataset resolve_dataset(const RunConfig& rc) {
  if (rc.manifest.empty()) {
    throw ConfigError("no dataset configured: pass --manifest <path> or "
                      "--manifest synthetic");
  }
  if (rc.manifest == "synthetic") {
    return make_synthetic_fixture(rc.fixture_seed);
  }
  return build_problem(load_dataset(rc.manifest),
                       ClassProblem::named(rc.problem));
}

fs::path ensure_out_dir(const std::string& out_dir) {
  fs::path dir(out_dir);
  fs::create_directories(dir);
  return dir;
}

int cmd_ingest(const std::string& manifest, const std::string& out_dir) {
  const Dataset data = load_dataset(manifest);
  const fs::path dir = ensure_out_dir(out_dir);

  OrderedJson summary;
  summary["schema_version"] = 1;
  summary["manifest"] = manifest;
  summary["samples_per_signal"] = kSamplesPerSignal;
  summary["sampling_rate_hz"] = kBonnSamplingRateHz;
  OrderedJson sets;
  for (const auto& [set, count] : data.count_by_set()) {
    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (const auto& signal : data.signals) {
      if (signal.set_label != set) {
        continue;
      }
      const double s_lo = signal.samples.minCoeff();
      const double s_hi = signal.samples.maxCoeff();
      lo = first ? s_lo : std::min(lo, s_lo);
      hi = first ? s_hi : std::max(hi, s_hi);
      first = false;
    }
    OrderedJson entry;
    entry["count"] = count;
    entry["min_amplitude"] = lo;
    entry["max_amplitude"] = hi;
    sets[std::string(1, set)] = entry;
  }
  summary["sets"] = sets;
  summary["total_signals"] = static_cast<int>(data.signals.size());

  const std::string text = summary.dump(2) + "\n";
  write_text_file((dir / "ingest_summary.json").string(), text);
  std::cout << text;
  return 0;
}

int cmd_synth(const std::string& kind_name, double snr_db,
              std::uint64_t seed, const std::string& input,
              const std::string& output, const std::string& dump_noise) {
  const NoiseKind kind = noise_kind_from_string(kind_name);
  const Vectord clean = parse_signal_file(input);
  NoiseSpec spec{kind, snr_db, seed};
  spec.validate();

  Rng rng(seed);
  const Vectord noise =
      synthesize_noise(kind, clean.size(), kBonnSamplingRateHz, rng);
  const MixResult mixed = mix_at_snr(clean, noise, snr_db);

  const auto write_samples = [](const std::string& path, const Vectord& x) {
    std::string text;
    text.reserve(static_cast<std::size_t>(x.size()) * 12);
    char buf[40];
    for (Index k = 0; k < x.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", x[k]);
      text += buf;
    }
    write_text_file(path, text);
  };
  write_samples(output, mixed.noisy);
  if (!dump_noise.empty()) {
    write_samples(dump_noise, mixed.noise_scale * noise);
  }
  std::cout << "wrote " << output << " (" << to_string(kind) << ", "
            << snr_db << " dB, scale " << mixed.noise_scale << ")\n";
  return 0;
}

int cmd_train(const RunConfig& rc) {
  const LabeledDataset data = resolve_dataset(rc);
  const fs::path dir = ensure_out_dir(rc.out_dir);
  std::optional<std::string> ckpt_dir;
  if (rc.save_checkpoints) {
    ckpt_dir = (dir / "checkpoints").string();
    fs::create_directories(*ckpt_dir);
  }
  const ProtocolResult result =
      run_protocol(data, rc.train, rc.split, rc.jobs, ckpt_dir);

  const std::string problem_name = data.problem.name;
  write_text_file((dir / "results.json").string(),
                  protocol_to_json(result, rc.train, problem_name).dump(2) +
                      "\n");
  write_text_file((dir / "table.csv").string(),
                  metrics_table_csv(result, kMethodLabel));
  std::printf("%s %s: acc %.4f sens %.4f spec %.4f (%zu folds)\n",
              problem_name.c_str(),
              result.plan.spec.protocol_label().c_str(),
              result.aggregate.accuracy, result.aggregate.sensitivity,
              result.aggregate.specificity, result.folds.size());
  return 0;
}

int cmd_eval(const RunConfig& rc, const std::string& model_path,
             const std::string& eval_on) {
  Checkpoint ckpt = load_checkpoint(model_path);
  RunConfig effective = rc;
  // The checkpoint fixes the preprocessing the model was trained with.
  effective.train.segment_length = ckpt.config.segment_length;
  effective.train.normalization = ckpt.config.normalization;
  const LabeledDataset data = resolve_dataset(effective);
  if (data.problem.num_classes !=
      static_cast<int>(ckpt.model.classes())) {
    throw ConfigError("eval: problem has " +
                      std::to_string(data.problem.num_classes) +
                      " classes but the checkpoint was trained with " +
                      std::to_string(ckpt.model.classes()));
  }

  const PreparedData prepared = prepare_data(data, effective.train);
  std::vector<int> indices;
  if (eval_on == "test") {
    const SplitPlan plan =
        make_splits(data.labels, effective.split, effective.train.seed);
    indices = plan.folds.front().test;
  } else {
    indices.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      indices[i] = static_cast<int>(i);
    }
  }
  const MetricsReport report =
      evaluate(ckpt.model, prepared.eval_examples, indices,
               data.problem.seizure_class, 0);

  const fs::path dir = ensure_out_dir(rc.out_dir);
  OrderedJson j;
  j["schema_version"] = 1;
  j["kind"] = "eval";
  j["model"] = model_path;
  j["problem"] = data.problem.name;
  j["eval_on"] = eval_on;
  j["config"] = train_config_to_json(effective.train);
  j["metrics"] = metrics_to_json(report);
  write_text_file((dir / "eval.json").string(), j.dump(2) + "\n");

  char row[160];
  std::snprintf(row, sizeof(row), "%s,Softmax,eval (%s),%.2f,%.2f,%.2f\n",
                kMethodLabel, eval_on.c_str(), 100.0 * report.sensitivity,
                100.0 * report.specificity, 100.0 * report.accuracy);
  write_text_file((dir / "eval.csv").string(),
                  std::string("Method,Classifier,Training/Testing,"
                              "Sens (%),Spec (%),Acc (%)\n") +
                      row);
  std::printf("eval %s: acc %.4f sens %.4f spec %.4f (%d examples)\n",
              data.problem.name.c_str(), report.accuracy, report.sensitivity,
              report.specificity, report.confusion.total());
  return 0;
}

int cmd_sweep(const RunConfig& rc, const std::string& axis_flag) {
  const std::string axis = axis_flag.empty() ? rc.sweep_axis : axis_flag;
  const LabeledDataset data = resolve_dataset(rc);
  SweepResult result;
  if (axis == "snr") {
    result = snr_sweep(data, rc.train, rc.split, rc.sweep_kinds,
                       rc.snr_values_db, rc.sweep_mode, rc.jobs);
  } else if (axis == "segment_length" || axis == "segment-length") {
    result = segment_length_sweep(data, rc.train, rc.split,
                                  rc.segment_lengths, rc.jobs);
  } else {
    throw ConfigError("sweep axis must be snr or segment_length, got " +
                      axis);
  }
  const fs::path dir = ensure_out_dir(rc.out_dir);
  write_text_file((dir / "sweep.json").string(),
                  sweep_to_json(result, rc.train, data.problem.name).dump(2) +
                      "\n");
  write_text_file((dir / "sweep.csv").string(), sweep_csv(result));
  std::printf("sweep over %s: %zu points written to %s\n",
              result.axis_name.c_str(), result.points.size(),
              rc.out_dir.c_str());
  return 0;
}

int cmd_gradcheck(int models, double step, double tolerance,
                  std::uint64_t seed, const std::string& out_dir) {
  const int class_cycle[3] = {2, 3, 5};
  double worst_rel = 0.0;
  double worst_abs = 0.0;
  int coords = 0;
  for (int m = 0; m < models; ++m) {
    const int classes = class_cycle[m % 3];
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(m)));
    const auto params = init_params<double>(4, 2, 3, classes, rng);
    Matrixd segments(5, 2);
    for (Index k = 0; k < segments.size(); ++k) {
      segments.data()[k] = rng.uniform(-1.0, 1.0);
    }
    const int label = static_cast<int>(rng.below(classes));
    const GradCheckReport report =
        gradient_check(params, segments, label, step, tolerance);
    worst_rel = std::max(worst_rel, report.max_relative_error);
    worst_abs = std::max(worst_abs, report.max_absolute_error);
    coords += report.coordinates_checked;
  }
  const bool passed = worst_rel <= tolerance && worst_abs <= tolerance;
  std::printf("gradcheck: %d models, %d coordinates, max relative error "
              "%.3e, max absolute fallback %.3e -> %s (tolerance %.1e)\n",
              models, coords, worst_rel, worst_abs,
              passed ? "PASS" : "FAIL", tolerance);

  const fs::path dir = ensure_out_dir(out_dir);
  OrderedJson j;
  j["schema_version"] = 1;
  j["kind"] = "gradcheck";
  j["models"] = models;
  j["coordinates"] = coords;
  j["step"] = step;
  j["tolerance"] = tolerance;
  j["max_relative_error"] = worst_rel;
  j["max_absolute_error"] = worst_abs;
  j["passed"] = passed;
  write_text_file((dir / "gradcheck.json").string(), j.dump(2) + "\n");
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG seizure detection: segmentation, peephole LSTM "
               "training, artifact synthesis, and experiment sweeps"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "load a dataset and write a "
                                              "summary report");
  std::string ingest_manifest;
  std::string ingest_out = "out";
  ingest->add_option("--manifest", ingest_manifest, "manifest JSON path")
      ->required();
  ingest->add_option("--out", ingest_out, "output directory");

  // synth
  auto* synth = app.add_subcommand("synth", "corrupt one signal file at a "
                                            "target SNR");
  std::string synth_kind = "white";
  double synth_snr = 0.0;
  std::uint64_t synth_seed = 1;
  std::string synth_input;
  std::string synth_output;
  std::string synth_dump;
  synth->add_option("--kind", synth_kind, "muscle | eyeblink | white");
  synth->add_option("--snr", synth_snr, "target SNR in dB");
  synth->add_option("--seed", synth_seed, "noise seed");
  synth->add_option("--input", synth_input, "input signal file")->required();
  synth->add_option("--output", synth_output, "output signal file")
      ->required();
  synth->add_option("--dump-noise", synth_dump,
                    "also write the scaled noise realization here");

  // train / eval / sweep share the common flags
  auto* train_cmd = app.add_subcommand("train", "train and evaluate per the "
                                                "split protocol");
  CommonFlags train_flags;
  train_flags.attach(train_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  CommonFlags eval_flags;
  eval_flags.attach(eval_cmd);
  std::string eval_model;
  std::string eval_on = "all";
  eval_cmd->add_option("--model", eval_model, "checkpoint path")->required();
  eval_cmd->add_option("--eval-on", eval_on,
                       "all | test (test fold of the configured split)");

  auto* sweep_cmd = app.add_subcommand("sweep", "SNR or segment-length "
                                                "sweep");
  CommonFlags sweep_flags;
  sweep_flags.attach(sweep_cmd);
  std::string sweep_axis;
  sweep_cmd->add_option("--axis", sweep_axis, "snr | segment_length");

  // gradcheck
  auto* gradcheck_cmd =
      app.add_subcommand("gradcheck", "finite-difference gradient check on "
                                      "tiny random models");
  int gc_models = 10;
  double gc_step = 1e-5;
  double gc_tolerance = 1e-4;
  std::uint64_t gc_seed = 1;
  std::string gc_out = "out";
  gradcheck_cmd->add_option("--models", gc_models, "number of random models");
  gradcheck_cmd->add_option("--step", gc_step, "finite-difference step");
  gradcheck_cmd->add_option("--tolerance", gc_tolerance,
                            "max relative error");
  gradcheck_cmd->add_option("--seed", gc_seed, "model seed");
  gradcheck_cmd->add_option("--out", gc_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (ingest->parsed()) {
      return cmd_ingest(ingest_manifest, ingest_out);
    }
    if (synth->parsed()) {
      return cmd_synth(synth_kind, synth_snr, synth_seed, synth_input,
                       synth_output, synth_dump);
    }
    if (train_cmd->parsed()) {
      return cmd_train(train_flags.resolve());
    }
    if (eval_cmd->parsed()) {
      if (eval_on != "all" && eval_on != "test") {
        throw ConfigError("--eval-on must be all or test");
      }
      return cmd_eval(eval_flags.resolve(), eval_model, eval_on);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep_flags.resolve(), sweep_axis);
    }
    if (gradcheck_cmd->parsed()) {
      return cmd_gradcheck(gc_models, gc_step, gc_tolerance, gc_seed, gc_out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
