#ifndef SPARSEVER_FEATURES_HPP_
#define SPARSEVER_FEATURES_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sparsever/common.hpp"

namespace sparsever {

/// Grayscale image with intensities in [0,1], stored row-major.
struct RawImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;

  double at(std::size_t row, std::size_t col) const {
    return pixels[row * width + col];
  }
  double& at(std::size_t row, std::size_t col) {
    return pixels[row * width + col];
  }

  /// Throws kInvalidArgument unless the size and range invariants hold.
  void validate() const;
};

/// One biometric sample in feature space.
struct FeatureVector {
  Vector values;
  std::string modality;
  std::string source_id;

  Eigen::Index dim() const { return values.size(); }
};

/// Decodes an 8-bit binary PGM (P5) byte stream.
RawImage load_pgm(std::span<const std::uint8_t> bytes);
RawImage load_pgm_file(const std::filesystem::path& path);

/// Encodes an image as 8-bit binary PGM, rounding intensities to 0..255.
std::vector<std::uint8_t> encode_pgm(const RawImage& img);

/// Bilinear resampling with corner-aligned sample grids, so the four corner
/// pixels of the output coincide with those of the input.
RawImage normalize_geometry(const RawImage& img, std::size_t target_w,
                            std::size_t target_h);

/// n x n orthonormal DCT-II basis; row k holds the k-th cosine.
template <typename Scalar = double>
DynamicMatrix<Scalar> dct_basis(Eigen::Index n) {
  DynamicMatrix<Scalar> c(n, n);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar n_s = static_cast<Scalar>(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar scale = k == 0 ? std::sqrt(Scalar(1) / n_s)
                                : std::sqrt(Scalar(2) / n_s);
    for (Eigen::Index i = 0; i < n; ++i) {
      c(k, i) = scale * std::cos(pi * (Scalar(2) * i + 1) * k / (Scalar(2) * n_s));
    }
  }
  return c;
}

/// Orthonormal 2D DCT-II of a (height x width) grid.
template <typename Derived>
DynamicMatrix<typename Derived::Scalar> dct2(const Eigen::MatrixBase<Derived>& grid) {
  using Scalar = typename Derived::Scalar;
  const auto rows = dct_basis<Scalar>(grid.rows());
  const auto cols = dct_basis<Scalar>(grid.cols());
  return rows * grid * cols.transpose();
}

/// Inverse of dct2 (orthonormal DCT-III).
template <typename Derived>
DynamicMatrix<typename Derived::Scalar> idct2(const Eigen::MatrixBase<Derived>& coeffs) {
  using Scalar = typename Derived::Scalar;
  const auto rows = dct_basis<Scalar>(coeffs.rows());
  const auto cols = dct_basis<Scalar>(coeffs.cols());
  return rows.transpose() * coeffs * cols;
}

Matrix image_to_matrix(const RawImage& img);
Matrix dct2(const RawImage& img);

/// (row, col) visiting order of a JPEG-style zigzag over a rows x cols grid:
/// anti-diagonals in increasing row+col, alternating direction, first step
/// to the right of the corner.
std::vector<std::pair<Eigen::Index, Eigen::Index>> zigzag_order(Eigen::Index rows,
                                                                Eigen::Index cols);

template <typename Derived>
DynamicVector<typename Derived::Scalar> zigzag_scan(const Eigen::MatrixBase<Derived>& grid,
                                                    Eigen::Index d) {
  require(d >= 1 && d <= grid.size(), ErrorCode::kInvalidArgument,
          "zigzag_scan: d=" + std::to_string(d) + " outside [1, " +
              std::to_string(grid.size()) + "]");
  const auto order = zigzag_order(grid.rows(), grid.cols());
  DynamicVector<typename Derived::Scalar> out(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    out(i) = grid(order[static_cast<std::size_t>(i)].first,
                  order[static_cast<std::size_t>(i)].second);
  }
  return out;
}

struct ExtractOptions {
  std::size_t width = 50;
  std::size_t height = 40;
  Eigen::Index dims = 200;
};

/// Full image pipeline: resize, 2D DCT, zigzag truncation.
FeatureVector extract_features(const RawImage& img, const ExtractOptions& opts,
                               std::string modality, std::string source_id);

}  // namespace sparsever

#endif  // SPARSEVER_FEATURES_HPP_
