#include "ictal/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "ictal/errors.hpp"
#include "ictal/results_io.hpp"

namespace ictal {

namespace {

constexpr char kMagic[8] = {'I', 'C', 'T', 'A', 'L', 'C', 'K', '1'};

void write_u64(std::ostream& out, std::uint64_t value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t value = 0;
  in.read(reinterpret_cast<char*>(&value), sizeof(value));
  return value;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams<double>& model,
                     const TrainConfig& config) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw DataError("cannot write checkpoint: " + path);
  }
  out.write(kMagic, sizeof(kMagic));
  const std::string config_json = train_config_to_json(config).dump();
  write_u64(out, config_json.size());
  out.write(config_json.data(),
            static_cast<std::streamsize>(config_json.size()));
  write_u64(out, static_cast<std::uint64_t>(model.units()));
  write_u64(out, static_cast<std::uint64_t>(model.input_size()));
  write_u64(out, static_cast<std::uint64_t>(model.dense_units()));
  write_u64(out, static_cast<std::uint64_t>(model.classes()));
  for (const auto& tensor : tensor_list(model)) {
    out.write(reinterpret_cast<const char*>(tensor.data),
              static_cast<std::streamsize>(tensor.size *
                                           static_cast<Index>(sizeof(double))));
  }
  if (!out) {
    throw DataError("checkpoint write failed: " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open checkpoint: " + path);
  }
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a checkpoint file: " + path);
  }
  const std::uint64_t config_len = read_u64(in);
  std::string config_json(config_len, '\0');
  in.read(config_json.data(), static_cast<std::streamsize>(config_len));

  Checkpoint ckpt;
  try {
    ckpt.config =
        train_config_from_json(OrderedJson::parse(config_json));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint config corrupted: " + std::string(e.what()));
  }
  const auto units = static_cast<Index>(read_u64(in));
  const auto input_size = static_cast<Index>(read_u64(in));
  const auto dense_units = static_cast<Index>(read_u64(in));
  const auto classes = static_cast<Index>(read_u64(in));
  if (!in || units < 1 || input_size < 1 || dense_units < 1 || classes < 2) {
    throw DataError("checkpoint header corrupted: " + path);
  }
  ckpt.model =
      ModelParams<double>::zeros(units, input_size, dense_units, classes);
  for (auto& tensor : tensor_list(ckpt.model)) {
    in.read(reinterpret_cast<char*>(tensor.data),
            static_cast<std::streamsize>(tensor.size *
                                         static_cast<Index>(sizeof(double))));
  }
  if (!in) {
    throw DataError("checkpoint truncated: " + path);
  }
  return ckpt;
}

}  // namespace ictal
