#include "sparsever/dictionary.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace sparsever {

Dictionary Dictionary::build(std::vector<ClassBlock> blocks) {
  require(!blocks.empty(), ErrorCode::kEmptyInput, "build_dictionary: no class blocks");
  Dictionary dict;
  const Eigen::Index dim = blocks.front().samples.empty() ? 0 : blocks.front().samples.front().dim();
  require(dim >= 1, ErrorCode::kInvalidArgument, "build_dictionary: empty first block");
  dict.modality_ = blocks.front().samples.front().modality;

  Eigen::Index total = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& block = blocks[b];
    require(!block.samples.empty(), ErrorCode::kInvalidArgument,
            "build_dictionary: class '" + block.class_id + "' has no samples");
    require(dict.index_.emplace(block.class_id, b).second, ErrorCode::kDuplicateClass,
            "build_dictionary: duplicate class_id '" + block.class_id + "'");
    for (const auto& s : block.samples) {
      require(s.dim() == dim, ErrorCode::kDimensionMismatch,
              "build_dictionary: sample '" + s.source_id + "' has dimension " +
                  std::to_string(s.dim()) + ", expected " + std::to_string(dim));
      require(s.modality == dict.modality_, ErrorCode::kInvalidArgument,
              "build_dictionary: mixed modalities");
      require(s.values.allFinite(), ErrorCode::kNonFinite,
              "build_dictionary: non-finite sample '" + s.source_id + "'");
    }
    total += static_cast<Eigen::Index>(block.samples.size());
  }

  dict.matrix_.resize(dim, total);
  dict.column_class_.reserve(static_cast<std::size_t>(total));
  dict.offsets_.reserve(blocks.size() + 1);
  Eigen::Index col = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    dict.offsets_.push_back(col);
    for (const auto& s : blocks[b].samples) {
      const double n = s.values.norm();
      require(n > 0.0, ErrorCode::kZeroNorm,
              "build_dictionary: zero-norm sample '" + s.source_id + "'");
      dict.matrix_.col(col++) = s.values / n;
      dict.column_class_.push_back(b);
    }
  }
  dict.offsets_.push_back(col);
  dict.blocks_ = std::move(blocks);
  return dict;
}

std::vector<std::string> Dictionary::class_ids() const {
  std::vector<std::string> ids;
  ids.reserve(blocks_.size());
  for (const auto& b : blocks_) ids.push_back(b.class_id);
  return ids;
}

std::size_t Dictionary::class_index(const std::string& class_id) const {
  const auto it = index_.find(class_id);
  if (it == index_.end()) fail(ErrorCode::kUnknownClass, "unknown class '" + class_id + "'");
  return it->second;
}

Dictionary Dictionary::subset(std::vector<std::size_t> class_indices) const {
  std::sort(class_indices.begin(), class_indices.end());
  std::vector<ClassBlock> picked;
  picked.reserve(class_indices.size());
  for (std::size_t i : class_indices) {
    require(i < blocks_.size(), ErrorCode::kInvalidArgument, "subset: class index out of range");
    picked.push_back(blocks_[i]);
  }
  return build(std::move(picked));
}

Vector delta(const SparseCode& code, const Dictionary& dict, std::size_t class_index) {
  require(code.coefficients.size() == dict.column_count(), ErrorCode::kDimensionMismatch,
          "delta: code length does not match dictionary columns");
  require(class_index < dict.class_count(), ErrorCode::kUnknownClass,
          "delta: class index out of range");
  Vector out = Vector::Zero(code.coefficients.size());
  const auto off = dict.block_offset(class_index);
  const auto len = dict.block_size(class_index);
  out.segment(off, len) = code.coefficients.segment(off, len);
  return out;
}

Vector delta(const SparseCode& code, const Dictionary& dict, const std::string& class_id) {
  return delta(code, dict, dict.class_index(class_id));
}

std::vector<std::size_t> sample_class_subset(std::size_t class_count, std::size_t claimed,
                                             std::size_t k, std::uint64_t seed) {
  require(claimed < class_count, ErrorCode::kUnknownClass, "sample: claimed class out of range");
  require(k >= 1 && k <= class_count, ErrorCode::kInvalidArgument,
          "sample: k=" + std::to_string(k) + " outside [1, " + std::to_string(class_count) + "]");
  std::vector<std::size_t> others;
  others.reserve(class_count - 1);
  for (std::size_t i = 0; i < class_count; ++i) {
    if (i != claimed) others.push_back(i);
  }
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates over the non-claimed classes.
  for (std::size_t i = 0; i + 1 < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, others.size() - 1);
    std::swap(others[i], others[pick(rng)]);
  }
  std::vector<std::size_t> chosen(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k - 1));
  chosen.push_back(claimed);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

Dictionary sample_small_dictionary(const Dictionary& dict, const std::string& claimed,
                                   std::size_t k, std::uint64_t seed) {
  const std::size_t claimed_index = dict.class_index(claimed);
  return dict.subset(sample_class_subset(dict.class_count(), claimed_index, k, seed));
}

Vector normalized(const Vector& v) {
  const double n = v.norm();
  require(std::isfinite(n), ErrorCode::kNonFinite, "normalize: non-finite vector");
  require(n > 0.0, ErrorCode::kZeroNorm, "normalize: zero vector");
  return v / n;
}

}  // namespace sparsever
