#include "ictal/results_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ictal/errors.hpp"

namespace ictal {

namespace {

// NaN (undefined metric) serializes as null.
OrderedJson metric_value(double v) {
  if (std::isnan(v)) {
    return nullptr;
  }
  return v;
}

OrderedJson metric_array(const std::vector<double>& values) {
  OrderedJson arr = OrderedJson::array();
  for (double v : values) {
    arr.push_back(metric_value(v));
  }
  return arr;
}

std::string percent(double fraction) {
  if (std::isnan(fraction)) {
    return "n/a";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
  return buf;
}

}  // namespace

OrderedJson train_config_to_json(const TrainConfig& config) {
  OrderedJson j;
  j["segment_length"] = config.segment_length;
  j["lstm_units"] = config.lstm_units;
  j["dense_units"] = config.dense_units;
  j["num_classes"] = config.num_classes;
  j["batch_size"] = config.batch_size;
  j["epochs"] = config.epochs;
  j["optimizer"] = to_string(config.optimizer);
  j["learning_rate"] = config.adam.learning_rate;
  j["adam_beta1"] = config.adam.beta1;
  j["adam_beta2"] = config.adam.beta2;
  j["adam_epsilon"] = config.adam.epsilon;
  j["seed"] = config.seed;
  j["normalization"] = to_string(config.normalization);
  j["noise_protocol"] = to_string(config.noise_protocol);
  j["grad_clip_norm"] = config.grad_clip_norm;
  OrderedJson noise = OrderedJson::array();
  for (const auto& spec : config.noise) {
    OrderedJson entry;
    entry["kind"] = to_string(spec.kind);
    entry["snr_db"] = spec.snr_db;
    entry["seed"] = spec.seed;
    noise.push_back(entry);
  }
  j["noise"] = noise;
  return j;
}

TrainConfig train_config_from_json(const OrderedJson& j) {
  TrainConfig config;
  config.segment_length = j.at("segment_length").get<Index>();
  config.lstm_units = j.at("lstm_units").get<Index>();
  config.dense_units = j.at("dense_units").get<Index>();
  config.num_classes = j.at("num_classes").get<int>();
  config.batch_size = j.at("batch_size").get<int>();
  config.epochs = j.at("epochs").get<int>();
  config.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
  config.adam.learning_rate = j.at("learning_rate").get<double>();
  config.adam.beta1 = j.at("adam_beta1").get<double>();
  config.adam.beta2 = j.at("adam_beta2").get<double>();
  config.adam.epsilon = j.at("adam_epsilon").get<double>();
  config.seed = j.at("seed").get<std::uint64_t>();
  config.normalization =
      normalization_from_string(j.at("normalization").get<std::string>());
  config.noise_protocol =
      noise_protocol_from_string(j.at("noise_protocol").get<std::string>());
  config.grad_clip_norm = j.at("grad_clip_norm").get<double>();
  for (const auto& entry : j.at("noise")) {
    NoiseSpec spec;
    spec.kind = noise_kind_from_string(entry.at("kind").get<std::string>());
    spec.snr_db = entry.at("snr_db").get<double>();
    spec.seed = entry.at("seed").get<std::uint64_t>();
    config.noise.push_back(spec);
  }
  return config;
}

OrderedJson metrics_to_json(const MetricsReport& report) {
  OrderedJson j;
  j["fold"] = report.fold_index;
  j["accuracy"] = metric_value(report.accuracy);
  j["sensitivity"] = metric_value(report.sensitivity);
  j["specificity"] = metric_value(report.specificity);
  j["per_class_sensitivity"] = metric_array(report.per_class_sensitivity);
  j["per_class_specificity"] = metric_array(report.per_class_specificity);
  OrderedJson confusion = OrderedJson::array();
  for (Index r = 0; r < report.confusion.counts.rows(); ++r) {
    OrderedJson row = OrderedJson::array();
    for (Index c = 0; c < report.confusion.counts.cols(); ++c) {
      row.push_back(report.confusion.counts(r, c));
    }
    confusion.push_back(row);
  }
  j["confusion"] = confusion;
  j["warnings"] = report.warnings;
  return j;
}

OrderedJson history_to_json(const TrainingHistory& history) {
  OrderedJson j;
  j["loss"] = history.loss;
  j["accuracy"] = history.accuracy;
  j["iterations"] = history.iterations;
  return j;
}

OrderedJson protocol_to_json(const ProtocolResult& result,
                             const TrainConfig& config,
                             const std::string& problem_name) {
  OrderedJson j;
  j["schema_version"] = 1;
  j["kind"] = "protocol";
  j["problem"] = problem_name;
  j["split"] = result.plan.spec.to_string();
  j["protocol"] = result.plan.spec.protocol_label();
  j["config"] = train_config_to_json(config);
  OrderedJson folds = OrderedJson::array();
  for (const auto& fold : result.folds) {
    OrderedJson entry = metrics_to_json(fold.metrics);
    entry["history"] = history_to_json(fold.history);
    folds.push_back(entry);
  }
  j["folds"] = folds;
  j["aggregate"] = metrics_to_json(result.aggregate);
  return j;
}

OrderedJson sweep_to_json(const SweepResult& result, const TrainConfig& config,
                          const std::string& problem_name) {
  OrderedJson j;
  j["schema_version"] = 1;
  j["kind"] = "sweep";
  j["axis"] = result.axis_name;
  j["problem"] = problem_name;
  j["config"] = train_config_to_json(config);
  OrderedJson points = OrderedJson::array();
  for (const auto& point : result.points) {
    OrderedJson entry;
    entry["value"] = point.axis_value;
    entry["noise_kind"] = point.kind ? OrderedJson(to_string(*point.kind))
                                     : OrderedJson(nullptr);
    entry["aggregate"] = metrics_to_json(point.aggregate);
    OrderedJson folds = OrderedJson::array();
    for (const auto& fold : point.folds) {
      folds.push_back(metrics_to_json(fold));
    }
    entry["folds"] = folds;
    points.push_back(entry);
  }
  j["points"] = points;
  return j;
}

std::string metrics_table_csv(const ProtocolResult& result,
                              const std::string& method_label) {
  std::ostringstream out;
  out << "Method,Classifier,Training/Testing,Sens (%),Spec (%),Acc (%)\n";
  out << method_label << ",Softmax," << result.plan.spec.protocol_label()
      << "," << percent(result.aggregate.sensitivity) << ","
      << percent(result.aggregate.specificity) << ","
      << percent(result.aggregate.accuracy) << "\n";
  return out.str();
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "value,kind,sens,spec,acc\n";
  for (const auto& point : result.points) {
    char value[32];
    if (result.axis_name == "segment_length") {
      std::snprintf(value, sizeof(value), "%d",
                    static_cast<int>(point.axis_value));
    } else {
      std::snprintf(value, sizeof(value), "%g", point.axis_value);
    }
    out << value << "," << (point.kind ? to_string(*point.kind) : "clean")
        << "," << percent(point.aggregate.sensitivity) << ","
        << percent(point.aggregate.specificity) << ","
        << percent(point.aggregate.accuracy) << "\n";
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw DataError("cannot write file: " + path);
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) {
    throw DataError("write failed: " + path);
  }
}

}  // namespace ictal
