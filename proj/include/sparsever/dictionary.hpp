#ifndef SPARSEVER_DICTIONARY_HPP_
#define SPARSEVER_DICTIONARY_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sparsever/common.hpp"
#include "sparsever/features.hpp"
#include "sparsever/solver.hpp"

namespace sparsever {

/// Training samples of one enrolled class.
struct ClassBlock {
  std::string class_id;
  std::vector<FeatureVector> samples;
};

/// Column-stacked, unit-norm training samples A = [A_1, ..., A_c] with the
/// bookkeeping needed to address each class block. Immutable once built.
class Dictionary {
 public:
  Dictionary() = default;

  /// Stacks the blocks in order and scales every column to unit L2 norm.
  static Dictionary build(std::vector<ClassBlock> blocks);

  const Matrix& matrix() const { return matrix_; }
  const std::vector<ClassBlock>& blocks() const { return blocks_; }

  std::size_t class_count() const { return blocks_.size(); }
  Eigen::Index column_count() const { return matrix_.cols(); }
  Eigen::Index dim() const { return matrix_.rows(); }
  const std::string& modality() const { return modality_; }

  const std::string& class_id(std::size_t class_index) const {
    return blocks_[class_index].class_id;
  }
  std::vector<std::string> class_ids() const;

  /// Class index (block position) of every column.
  const std::vector<std::size_t>& column_class_map() const { return column_class_; }

  bool contains(const std::string& class_id) const { return index_.count(class_id) != 0; }
  /// Throws kUnknownClass.
  std::size_t class_index(const std::string& class_id) const;

  Eigen::Index block_offset(std::size_t class_index) const { return offsets_[class_index]; }
  Eigen::Index block_size(std::size_t class_index) const {
    return offsets_[class_index + 1] - offsets_[class_index];
  }
  /// Columns of one class block (A_i).
  auto block_matrix(std::size_t class_index) const {
    return matrix_.middleCols(block_offset(class_index), block_size(class_index));
  }

  /// Sub-dictionary over the given class indices, kept in parent order.
  Dictionary subset(std::vector<std::size_t> class_indices) const;

 private:
  std::vector<ClassBlock> blocks_;
  Matrix matrix_;
  std::vector<std::size_t> column_class_;
  std::vector<Eigen::Index> offsets_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string modality_;
};

inline Dictionary build_dictionary(std::vector<ClassBlock> blocks) {
  return Dictionary::build(std::move(blocks));
}

/// delta_i: keeps the coefficients of one class, zeroes the rest.
Vector delta(const SparseCode& code, const Dictionary& dict, const std::string& class_id);
Vector delta(const SparseCode& code, const Dictionary& dict, std::size_t class_index);

/// Class indices of a small random dictionary: the claimed class plus k-1
/// distinct other classes drawn uniformly without replacement, sorted.
std::vector<std::size_t> sample_class_subset(std::size_t class_count, std::size_t claimed,
                                             std::size_t k, std::uint64_t seed);

Dictionary sample_small_dictionary(const Dictionary& dict, const std::string& claimed,
                                   std::size_t k, std::uint64_t seed);

/// Unit-L2 copy of a query; throws kZeroNorm for the zero vector.
Vector normalized(const Vector& v);

}  // namespace sparsever

#endif  // SPARSEVER_DICTIONARY_HPP_
