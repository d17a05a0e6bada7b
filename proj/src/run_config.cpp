#include "ictal/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ictal/errors.hpp"
#include "ictal/rng.hpp"

namespace ictal {

namespace {

using Json = nlohmann::json;

constexpr std::uint64_t kNoiseStream = 0x6E6F6973;  // "nois"

NoiseSpec parse_noise_entry(const Json& entry, const std::string& origin) {
  NoiseSpec spec;
  spec.seed = 0;
  if (entry.is_string()) {
    const std::string text = entry.get<std::string>();
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
      throw ConfigError(origin + ": noise entry '" + text +
                        "' must look like kind:snr_db");
    }
    spec.kind = noise_kind_from_string(text.substr(0, colon));
    try {
      spec.snr_db = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError(origin + ": bad SNR in noise entry '" + text + "'");
    }
    return spec;
  }
  if (!entry.is_object()) {
    throw ConfigError(origin + ": noise entries must be strings or objects");
  }
  for (const auto& [key, value] : entry.items()) {
    (void)value;
    if (key != "kind" && key != "snr_db" && key != "seed") {
      throw ConfigError(origin + ": unknown noise key '" + key + "'");
    }
  }
  spec.kind = noise_kind_from_string(entry.at("kind").get<std::string>());
  spec.snr_db = entry.at("snr_db").get<double>();
  if (entry.contains("seed")) {
    spec.seed = entry.at("seed").get<std::uint64_t>();
  }
  return spec;
}

}  // namespace

RunConfig::RunConfig() {
  split.kind = SplitKind::kHoldout;
  split.train_fraction = 0.8;
  snr_values_db = default_snr_axis_db();
  sweep_kinds = {NoiseKind::kMuscle, NoiseKind::kEyeBlink, NoiseKind::kWhite};
  segment_lengths = default_segment_lengths();
}

void apply_config_json_text(RunConfig& config, const std::string& json_text,
                            const std::string& origin) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError(origin + ": config must be a JSON object");
  }

  static const std::set<std::string> known_keys = {
      "manifest",       "problem",        "segment_length",
      "lstm_units",     "dense_units",    "batch_size",
      "epochs",         "optimizer",      "learning_rate",
      "adam_beta1",     "adam_beta2",     "adam_epsilon",
      "seed",           "normalization",  "split",
      "noise",          "noise_protocol", "grad_clip_norm",
      "out_dir",        "jobs",           "save_checkpoints",
      "fixture_seed",   "sweep_axis",     "snr_values",
      "sweep_kinds",    "segment_lengths", "sweep_mode",
  };
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (known_keys.find(key) == known_keys.end()) {
      throw ConfigError(origin + ": unknown config key '" + key + "'");
    }
  }

  try {
    if (j.contains("manifest")) {
      config.manifest = j["manifest"].get<std::string>();
    }
    if (j.contains("problem")) {
      config.problem = j["problem"].get<std::string>();
    }
    if (j.contains("segment_length")) {
      config.train.segment_length = j["segment_length"].get<Index>();
    }
    if (j.contains("lstm_units")) {
      config.train.lstm_units = j["lstm_units"].get<Index>();
    }
    if (j.contains("dense_units")) {
      config.train.dense_units = j["dense_units"].get<Index>();
    }
    if (j.contains("batch_size")) {
      config.train.batch_size = j["batch_size"].get<int>();
    }
    if (j.contains("epochs")) {
      config.train.epochs = j["epochs"].get<int>();
    }
    if (j.contains("optimizer")) {
      config.train.optimizer =
          optimizer_from_string(j["optimizer"].get<std::string>());
    }
    if (j.contains("learning_rate")) {
      config.train.adam.learning_rate = j["learning_rate"].get<double>();
    }
    if (j.contains("adam_beta1")) {
      config.train.adam.beta1 = j["adam_beta1"].get<double>();
    }
    if (j.contains("adam_beta2")) {
      config.train.adam.beta2 = j["adam_beta2"].get<double>();
    }
    if (j.contains("adam_epsilon")) {
      config.train.adam.epsilon = j["adam_epsilon"].get<double>();
    }
    if (j.contains("seed")) {
      config.train.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("normalization")) {
      config.train.normalization =
          normalization_from_string(j["normalization"].get<std::string>());
    }
    if (j.contains("split")) {
      config.split = SplitSpec::parse(j["split"].get<std::string>());
    }
    if (j.contains("noise")) {
      config.train.noise.clear();
      for (const auto& entry : j["noise"]) {
        config.train.noise.push_back(parse_noise_entry(entry, origin));
      }
    }
    if (j.contains("noise_protocol")) {
      config.train.noise_protocol =
          noise_protocol_from_string(j["noise_protocol"].get<std::string>());
    }
    if (j.contains("grad_clip_norm")) {
      config.train.grad_clip_norm = j["grad_clip_norm"].get<double>();
    }
    if (j.contains("out_dir")) {
      config.out_dir = j["out_dir"].get<std::string>();
    }
    if (j.contains("jobs")) {
      config.jobs = j["jobs"].get<int>();
    }
    if (j.contains("save_checkpoints")) {
      config.save_checkpoints = j["save_checkpoints"].get<bool>();
    }
    if (j.contains("fixture_seed")) {
      config.fixture_seed = j["fixture_seed"].get<std::uint64_t>();
    }
    if (j.contains("sweep_axis")) {
      config.sweep_axis = j["sweep_axis"].get<std::string>();
      if (config.sweep_axis != "snr" &&
          config.sweep_axis != "segment_length") {
        throw ConfigError(origin + ": sweep_axis must be snr or "
                          "segment_length");
      }
    }
    if (j.contains("snr_values")) {
      config.snr_values_db = j["snr_values"].get<std::vector<double>>();
    }
    if (j.contains("sweep_kinds")) {
      config.sweep_kinds.clear();
      for (const auto& entry : j["sweep_kinds"]) {
        config.sweep_kinds.push_back(
            noise_kind_from_string(entry.get<std::string>()));
      }
    }
    if (j.contains("segment_lengths")) {
      config.segment_lengths = j["segment_lengths"].get<std::vector<Index>>();
    }
    if (j.contains("sweep_mode")) {
      config.sweep_mode =
          sweep_mode_from_string(j["sweep_mode"].get<std::string>());
    }
  } catch (const Json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

NoiseSpec parse_noise_flag(const std::string& text) {
  return parse_noise_entry(Json(text), "--noise");
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig config;
  apply_config_json_text(config, buf.str(), path);
  return config;
}

void finalize_run_config(RunConfig& config) {
  if (config.manifest == "synthetic") {
    config.train.num_classes = 2;
  } else {
    config.train.num_classes =
        ClassProblem::named(config.problem).num_classes;
  }
  for (std::size_t k = 0; k < config.train.noise.size(); ++k) {
    auto& spec = config.train.noise[k];
    if (spec.seed == 0) {
      spec.seed = derive_seed(config.train.seed,
                              kNoiseStream + static_cast<std::uint64_t>(k));
    }
  }
  if (config.jobs < 1) {
    throw ConfigError("jobs must be >= 1");
  }
}

}  // namespace ictal
