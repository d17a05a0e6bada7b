#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ictal/fixture.hpp"
#include "ictal/protocol.hpp"
#include "ictal/splits.hpp"
#include "ictal/train.hpp"

namespace ictal {

// Everything a batch run needs. Populated from built-in defaults, then the
// JSON config file, then command-line flags, in that order of precedence.
struct RunConfig {
  std::string manifest;  // manifest path, or "synthetic" for the fixture
  std::string problem = "A-E";
  TrainConfig train;
  SplitSpec split;  // default holdout:0.8
  std::string out_dir = "out";
  int jobs = 1;
  bool save_checkpoints = false;
  std::uint64_t fixture_seed = kFixtureDefaultSeed;

  // Sweep settings.
  std::string sweep_axis = "snr";  // "snr" | "segment_length"
  std::vector<double> snr_values_db;
  std::vector<NoiseKind> sweep_kinds;
  std::vector<Index> segment_lengths;
  SweepMode sweep_mode = SweepMode::kRetrainPerPoint;

  RunConfig();
};

// Strict parse: any unknown key is rejected with a ConfigError naming it.
// Noise entries may be "kind:snr_db" strings or {kind, snr_db, seed}
// objects; omitted seeds are derived from the run seed later.
RunConfig load_run_config(const std::string& path);
void apply_config_json_text(RunConfig& config, const std::string& json_text,
                            const std::string& origin);

// Parses a command-line "kind:snr_db" noise flag; the seed is left at 0 for
// finalize_run_config to derive.
NoiseSpec parse_noise_flag(const std::string& text);

// Fills in derived values (noise seeds, num_classes for the problem).
void finalize_run_config(RunConfig& config);

}  // namespace ictal
