#pragma once

#include <string>

#include "json.hpp"

#include "ictal/metrics.hpp"
#include "ictal/protocol.hpp"
#include "ictal/splits.hpp"
#include "ictal/train.hpp"

namespace ictal {

using OrderedJson = nlohmann::ordered_json;

// All serialization is key-ordered and value-deterministic: rerunning the
// same seeded experiment produces byte-identical documents.
OrderedJson train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const OrderedJson& j);

OrderedJson metrics_to_json(const MetricsReport& report);
OrderedJson history_to_json(const TrainingHistory& history);
OrderedJson protocol_to_json(const ProtocolResult& result,
                             const TrainConfig& config,
                             const std::string& problem_name);
OrderedJson sweep_to_json(const SweepResult& result, const TrainConfig& config,
                          const std::string& problem_name);

// CSV row in the reported-results layout:
// Method,Classifier,Training/Testing,Sens (%),Spec (%),Acc (%).
std::string metrics_table_csv(const ProtocolResult& result,
                              const std::string& method_label);

// value,kind,sens,spec,acc with percentages.
std::string sweep_csv(const SweepResult& result);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace ictal
