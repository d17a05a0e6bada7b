#pragma once

#include <map>
#include <string>
#include <vector>

#include "ictal/types.hpp"

namespace ictal {

inline constexpr double kBonnSamplingRateHz = 173.6;
inline constexpr Index kSamplesPerSignal = 4096;

// One single-channel EEG recording. Raw Bonn samples are in microvolts.
// After ingestion samples.size() == kSamplesPerSignal and every value is
// finite; sources longer than that are truncated.
struct EegSignal {
  Vectord samples;
  char set_label = '?';  // 'A'..'E'
  std::string source_id;
  double sampling_rate_hz = kBonnSamplingRateHz;
};

struct Dataset {
  std::vector<EegSignal> signals;

  std::map<char, int> count_by_set() const;
};

// Manifest: a JSON object mapping set letters "A".."E" to directories of
// plain-text signal files, one decimal sample per line (LF or CRLF).
// Relative directories are resolved against the manifest's location.
// Signals come back sorted by (set letter, file name).
Dataset load_dataset(const std::string& manifest_path);

// Parses a single signal file without the length checks applied during
// dataset ingestion. Used by the synth command.
Vectord parse_signal_file(const std::string& path);

struct ClassProblem {
  std::string name;
  std::vector<std::vector<char>> included_sets;  // group g maps to class g
  std::map<char, int> label_of_set;
  int num_classes = 0;
  int seizure_class = -1;  // class index of set E; -1 when E is not included

  // One of: A-E, ABCD-E, A-C-E, A-B-C-D-E.
  static ClassProblem named(const std::string& name);
  static const std::vector<std::string>& known_names();
};

struct LabeledDataset {
  std::vector<EegSignal> signals;
  std::vector<int> labels;  // parallel to signals, values in 0..K-1
  ClassProblem problem;

  std::size_t size() const { return signals.size(); }
  std::vector<int> class_counts() const;
};

// Keeps only signals whose set is part of the problem and tags them with
// their class index. Throws ConfigError if a referenced set is absent.
LabeledDataset build_problem(const Dataset& data, const ClassProblem& problem);

// Non-overlapping segmentation: row t of segments is samples[t*L, (t+1)*L).
// Flattening the rows in order reproduces the signal exactly.
struct SegmentedExample {
  Matrixd segments;  // M x L
  int label = -1;
};

SegmentedExample segment(const EegSignal& signal, Index segment_length,
                         int label = -1);

std::vector<SegmentedExample> segment_dataset(const LabeledDataset& data,
                                              Index segment_length);

enum class Normalization { kRaw, kPerSignalZscore };

Normalization normalization_from_string(const std::string& text);
std::string to_string(Normalization mode);

// Raw mode is the identity. Z-score maps each signal to zero mean and unit
// variance using the population standard deviation; a zero-variance signal
// is centered only and a warning is appended to `warnings` if given.
LabeledDataset normalize(const LabeledDataset& data, Normalization mode,
                         std::vector<std::string>* warnings = nullptr);

}  // namespace ictal
