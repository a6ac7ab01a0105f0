#pragma once

#include <optional>
#include <string>
#include <vector>

#include "binfam/types.hpp"

namespace binfam {

// CSV layout: optional header, d binary data columns, optional "weight"
// column (uniform when absent), optional "logpi" column carrying log target
// values. Files are UTF-8 with LF newlines.
struct SampleData {
  WeightedSample sample;
  std::optional<std::vector<double>> log_target;
};

SampleData load_sample_csv(const std::string& path);

// Rows only (weights ignored), for eval inputs.
std::vector<BinaryVector> load_rows_csv(const std::string& path);

// Writes x1..xd plus a probability column "p" when present.
void write_sample_csv(const std::string& path, const SampleBatch& batch);

// One "logp" value per row.
void write_eval_csv(const std::string& path, const std::vector<double>& log_probs);

// Shortest-round-trip decimal rendering, used for byte-stable output.
std::string format_double(double value);

}  // namespace binfam
