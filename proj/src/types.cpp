#include "binfam/types.hpp"

#include <cmath>
#include <numeric>

namespace binfam {

BinaryVector::BinaryVector(std::initializer_list<int> init) {
  bits_.reserve(init.size());
  for (int v : init) {
    if (v != 0 && v != 1) throw ValidationError("binary vector components must be 0 or 1");
    bits_.push_back(static_cast<std::uint8_t>(v));
  }
}

BinaryVector BinaryVector::from_index(std::uint64_t index, std::size_t d) {
  if (d > 64) throw ValidationError("index encoding supports at most 64 components");
  BinaryVector g(d);
  for (std::size_t k = 0; k < d; ++k) g.bits_[k] = static_cast<std::uint8_t>((index >> k) & 1u);
  return g;
}

std::uint64_t BinaryVector::to_index() const {
  if (dim() > 64) throw ValidationError("index encoding supports at most 64 components");
  std::uint64_t s = 0;
  for (std::size_t k = 0; k < dim(); ++k)
    if (bits_[k]) s |= (std::uint64_t{1} << k);
  return s;
}

WeightedSample::WeightedSample(std::vector<double> weights, std::vector<BinaryVector> rows)
    : weights_(std::move(weights)), rows_(std::move(rows)) {
  if (rows_.empty()) throw ValidationError("sample must contain at least one row");
  if (weights_.size() != rows_.size())
    throw ValidationError("weight count does not match row count");
  const std::size_t d = rows_[0].dim();
  if (d == 0) throw ValidationError("sample rows must have positive dimension");
  for (const auto& r : rows_)
    if (r.dim() != d) throw ValidationError("sample rows must share a common dimension");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("weights must be finite and nonnegative");
    total += w;
  }
  if (total <= 0.0) throw ValidationError("weights must not all be zero");
  for (double& w : weights_) w /= total;
}

WeightedSample WeightedSample::uniform(std::vector<BinaryVector> rows) {
  std::vector<double> w(rows.size(), 1.0);
  return WeightedSample(std::move(w), std::move(rows));
}

}  // namespace binfam
