#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "binfam/errors.hpp"

namespace binfam {

// A point of {0,1}^d, one byte per component. State indices use the
// little-endian convention: bit k of the index holds component k.
class BinaryVector {
 public:
  BinaryVector() = default;
  explicit BinaryVector(std::size_t d) : bits_(d, 0) {}
  BinaryVector(std::initializer_list<int> init);

  static BinaryVector from_index(std::uint64_t index, std::size_t d);
  std::uint64_t to_index() const;  // requires dim() <= 64

  std::size_t dim() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }
  std::span<const std::uint8_t> bits() const { return {bits_.data(), bits_.size()}; }

  bool operator==(const BinaryVector&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// A weighted collection of binary observations. Weights are normalized to
// sum to one at construction; all rows share a common dimension.
class WeightedSample {
 public:
  WeightedSample(std::vector<double> weights, std::vector<BinaryVector> rows);
  static WeightedSample uniform(std::vector<BinaryVector> rows);

  std::size_t size() const { return rows_.size(); }
  std::size_t dim() const { return rows_.empty() ? 0 : rows_[0].dim(); }
  double weight(std::size_t k) const { return weights_[k]; }
  const BinaryVector& row(std::size_t k) const { return rows_[k]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<BinaryVector>& rows() const { return rows_; }

 private:
  std::vector<double> weights_;
  std::vector<BinaryVector> rows_;
};

// Generated vectors, with per-row probabilities when the generating family
// can evaluate them (chain-rule families can; copula-type families cannot).
struct SampleBatch {
  std::vector<BinaryVector> rows;
  std::optional<std::vector<double>> probs;
};

}  // namespace binfam
