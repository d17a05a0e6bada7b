#include "ictal/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ictal/errors.hpp"

namespace fs = std::filesystem;

namespace ictal {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

std::vector<double> parse_sample_lines(const std::string& text,
                                       const std::string& path) {
  std::vector<double> samples;
  samples.reserve(4200);
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) {
      eol = text.size();
    }
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (is_blank(line)) {
      continue;
    }
    const std::size_t first = line.find_first_not_of(" \t");
    const std::size_t last = line.find_last_not_of(" \t");
    const char* begin = line.data() + first;
    const char* end = line.data() + last + 1;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": not a numeric sample: '" + line + "'");
    }
    samples.push_back(value);
  }
  return samples;
}

}  // namespace

Vectord parse_signal_file(const std::string& path) {
  const std::vector<double> values = parse_sample_lines(read_file(path), path);
  Vectord samples(static_cast<Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) {
    samples[static_cast<Index>(k)] = values[k];
  }
  return samples;
}

std::map<char, int> Dataset::count_by_set() const {
  std::map<char, int> counts;
  for (const auto& s : signals) {
    counts[s.set_label] += 1;
  }
  return counts;
}

Dataset load_dataset(const std::string& manifest_path) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("manifest " + manifest_path + ": " + e.what());
  } catch (const DataError&) {
    throw ConfigError("manifest not readable: " + manifest_path);
  }
  if (!manifest.is_object()) {
    throw ConfigError("manifest must be a JSON object mapping sets to "
                      "directories");
  }

  const fs::path base = fs::path(manifest_path).parent_path();
  std::vector<std::pair<char, fs::path>> set_dirs;
  for (const auto& [key, value] : manifest.items()) {
    if (key.size() != 1 || key[0] < 'A' || key[0] > 'E') {
      throw ConfigError("manifest: unknown set key '" + key +
                        "' (expected A..E)");
    }
    if (!value.is_string()) {
      throw ConfigError("manifest: set " + key + " must map to a directory "
                        "path string");
    }
    fs::path dir(value.get<std::string>());
    if (dir.is_relative()) {
      dir = base / dir;
    }
    set_dirs.emplace_back(key[0], dir);
  }
  std::sort(set_dirs.begin(), set_dirs.end());

  Dataset data;
  for (const auto& [set, dir] : set_dirs) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
      throw ConfigError(std::string("set ") + set +
                        ": not a directory: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) {
        files.push_back(entry.path());
      }
    }
    if (files.empty()) {
      throw ConfigError(std::string("set ") + set +
                        ": no signal files in " + dir.string());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) {
                return a.filename().string() < b.filename().string();
              });
    for (const auto& file : files) {
      Vectord samples = parse_signal_file(file.string());
      if (samples.size() < kSamplesPerSignal) {
        throw DataError(file.string() + ": signal has " +
                        std::to_string(samples.size()) + " samples, need " +
                        std::to_string(kSamplesPerSignal));
      }
      EegSignal signal;
      signal.samples = samples.head(kSamplesPerSignal);
      signal.set_label = set;
      signal.source_id = file.stem().string();
      signal.sampling_rate_hz = kBonnSamplingRateHz;
      data.signals.push_back(std::move(signal));
    }
  }
  return data;
}

const std::vector<std::string>& ClassProblem::known_names() {
  static const std::vector<std::string> names = {"A-E", "ABCD-E", "A-C-E",
                                                 "A-B-C-D-E"};
  return names;
}

ClassProblem ClassProblem::named(const std::string& name) {
  ClassProblem p;
  p.name = name;
  if (name == "A-E") {
    p.included_sets = {{'A'}, {'E'}};
  } else if (name == "ABCD-E") {
    p.included_sets = {{'A', 'B', 'C', 'D'}, {'E'}};
  } else if (name == "A-C-E") {
    p.included_sets = {{'A'}, {'C'}, {'E'}};
  } else if (name == "A-B-C-D-E") {
    p.included_sets = {{'A'}, {'B'}, {'C'}, {'D'}, {'E'}};
  } else {
    throw ConfigError("unknown class problem: " + name);
  }
  p.num_classes = static_cast<int>(p.included_sets.size());
  for (int k = 0; k < p.num_classes; ++k) {
    for (char set : p.included_sets[static_cast<std::size_t>(k)]) {
      p.label_of_set[set] = k;
      if (set == 'E') {
        p.seizure_class = k;
      }
    }
  }
  return p;
}

std::vector<int> LabeledDataset::class_counts() const {
  std::vector<int> counts(static_cast<std::size_t>(problem.num_classes), 0);
  for (int label : labels) {
    counts[static_cast<std::size_t>(label)] += 1;
  }
  return counts;
}

LabeledDataset build_problem(const Dataset& data, const ClassProblem& problem) {
  const auto present = data.count_by_set();
  for (const auto& [set, label] : problem.label_of_set) {
    (void)label;
    if (present.find(set) == present.end()) {
      throw ConfigError("problem " + problem.name + ": set " +
                        std::string(1, set) + " missing from dataset");
    }
  }
  LabeledDataset out;
  out.problem = problem;
  for (const auto& signal : data.signals) {
    const auto it = problem.label_of_set.find(signal.set_label);
    if (it == problem.label_of_set.end()) {
      continue;
    }
    out.signals.push_back(signal);
    out.labels.push_back(it->second);
  }
  return out;
}

SegmentedExample segment(const EegSignal& signal, Index segment_length,
                         int label) {
  if (segment_length <= 0) {
    throw std::invalid_argument("segment: length must be positive");
  }
  const Index n = signal.samples.size();
  if (n % segment_length != 0) {
    throw std::invalid_argument(
        "segment: length " + std::to_string(segment_length) +
        " does not divide the signal length " + std::to_string(n));
  }
  const Index steps = n / segment_length;
  SegmentedExample out;
  out.label = label;
  out.segments.resize(steps, segment_length);
  for (Index t = 0; t < steps; ++t) {
    out.segments.row(t) =
        signal.samples.segment(t * segment_length, segment_length)
            .transpose();
  }
  return out;
}

std::vector<SegmentedExample> segment_dataset(const LabeledDataset& data,
                                              Index segment_length) {
  std::vector<SegmentedExample> out;
  out.reserve(data.signals.size());
  for (std::size_t k = 0; k < data.signals.size(); ++k) {
    out.push_back(segment(data.signals[k], segment_length, data.labels[k]));
  }
  return out;
}

Normalization normalization_from_string(const std::string& text) {
  if (text == "raw") {
    return Normalization::kRaw;
  }
  if (text == "zscore" || text == "per_signal_zscore") {
    return Normalization::kPerSignalZscore;
  }
  throw ConfigError("unknown normalization mode: " + text);
}

std::string to_string(Normalization mode) {
  return mode == Normalization::kRaw ? "raw" : "zscore";
}

LabeledDataset normalize(const LabeledDataset& data, Normalization mode,
                         std::vector<std::string>* warnings) {
  if (mode == Normalization::kRaw) {
    return data;
  }
  LabeledDataset out = data;
  for (auto& signal : out.signals) {
    const Index n = signal.samples.size();
    const double mean = signal.samples.mean();
    signal.samples.array() -= mean;
    const double variance =
        signal.samples.squaredNorm() / static_cast<double>(n);
    if (variance > 0.0) {
      signal.samples /= std::sqrt(variance);
    } else if (warnings != nullptr) {
      warnings->push_back("zero-variance signal " + signal.source_id +
                          ": centered but not scaled");
    }
  }
  return out;
}

}  // namespace ictal
