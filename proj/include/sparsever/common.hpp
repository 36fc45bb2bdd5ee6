#ifndef SPARSEVER_COMMON_HPP_
#define SPARSEVER_COMMON_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace sparsever {

template <typename Scalar>
using DynamicMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DynamicVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = DynamicMatrix<double>;
using Vector = DynamicVector<double>;

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kNonFinite,
  kMalformedInput,
  kZeroNorm,
  kDuplicateClass,
  kUnknownClass,
  kClassMismatch,
  kUndefinedScore,
  kMetricMismatch,
  kEnumerationLimit,
  kEmptyInput,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library surfaces as this exception; `code()` lets
/// callers branch on the failure kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace sparsever

#endif  // SPARSEVER_COMMON_HPP_
