#include "sparsever/features.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>

namespace sparsever {

void RawImage::validate() const {
  require(width >= 1 && height >= 1, ErrorCode::kInvalidArgument,
          "image has zero size");
  require(pixels.size() == width * height, ErrorCode::kInvalidArgument,
          "image pixel count does not match width*height");
  for (double p : pixels) {
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorCode::kInvalidArgument,
            "image intensity outside [0,1]");
  }
}

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void expect_magic() {
    if (bytes_.size() < 2 || bytes_[0] != 'P' || bytes_[1] != '5') {
      fail(ErrorCode::kMalformedInput, "pgm: missing P5 magic");
    }
    pos_ = 2;
  }

  std::size_t read_header_int() {
    skip_whitespace_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      fail(ErrorCode::kMalformedInput, "pgm: truncated or malformed header");
    }
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (value > (1u << 24)) fail(ErrorCode::kMalformedInput, "pgm: header value too large");
      ++pos_;
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void skip_raster_separator() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      fail(ErrorCode::kMalformedInput, "pgm: missing raster separator");
    }
    ++pos_;
  }

  std::span<const std::uint8_t> remaining() const { return bytes_.subspan(pos_); }

 private:
  void skip_whitespace_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

RawImage load_pgm(std::span<const std::uint8_t> bytes) {
  PgmReader reader(bytes);
  reader.expect_magic();
  const std::size_t width = reader.read_header_int();
  const std::size_t height = reader.read_header_int();
  const std::size_t maxval = reader.read_header_int();
  if (width == 0 || height == 0) fail(ErrorCode::kMalformedInput, "pgm: zero-size image");
  if (maxval == 0 || maxval > 255) {
    fail(ErrorCode::kMalformedInput, "pgm: only 8-bit maxval in [1,255] is supported");
  }
  reader.skip_raster_separator();
  const auto raster = reader.remaining();
  if (raster.size() < width * height) fail(ErrorCode::kMalformedInput, "pgm: truncated raster");

  RawImage img{width, height, std::vector<double>(width * height)};
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < width * height; ++i) {
    img.pixels[i] = std::min(1.0, raster[i] * scale);
  }
  return img;
}

RawImage load_pgm_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return load_pgm(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_pgm(const RawImage& img) {
  img.validate();
  const std::string header = "P5\n" + std::to_string(img.width) + " " +
                             std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.pixels.size());
  for (double p : img.pixels) {
    out.push_back(static_cast<std::uint8_t>(std::lround(p * 255.0)));
  }
  return out;
}

RawImage normalize_geometry(const RawImage& img, std::size_t target_w, std::size_t target_h) {
  img.validate();
  require(target_w >= 1 && target_h >= 1, ErrorCode::kInvalidArgument,
          "normalize_geometry: target size must be positive");
  if (target_w == img.width && target_h == img.height) return img;

  // Source coordinate of output sample i along an axis of n -> m samples.
  auto source_coord = [](std::size_t i, std::size_t n, std::size_t m) {
    if (m == 1) return 0.5 * static_cast<double>(n - 1);
    return static_cast<double>(i) * static_cast<double>(n - 1) / static_cast<double>(m - 1);
  };

  RawImage out{target_w, target_h, std::vector<double>(target_w * target_h)};
  for (std::size_t r = 0; r < target_h; ++r) {
    const double sy = source_coord(r, img.height, target_h);
    const auto y0 = std::min(static_cast<std::size_t>(sy), img.height - 1);
    const auto y1 = std::min(y0 + 1, img.height - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t c = 0; c < target_w; ++c) {
      const double sx = source_coord(c, img.width, target_w);
      const auto x0 = std::min(static_cast<std::size_t>(sx), img.width - 1);
      const auto x1 = std::min(x0 + 1, img.width - 1);
      const double fx = sx - static_cast<double>(x0);
      const double top = (1.0 - fx) * img.at(y0, x0) + fx * img.at(y0, x1);
      const double bottom = (1.0 - fx) * img.at(y1, x0) + fx * img.at(y1, x1);
      out.at(r, c) = std::clamp((1.0 - fy) * top + fy * bottom, 0.0, 1.0);
    }
  }
  return out;
}

Matrix image_to_matrix(const RawImage& img) {
  img.validate();
  Matrix m(static_cast<Eigen::Index>(img.height), static_cast<Eigen::Index>(img.width));
  for (std::size_t r = 0; r < img.height; ++r) {
    for (std::size_t c = 0; c < img.width; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = img.at(r, c);
    }
  }
  return m;
}

Matrix dct2(const RawImage& img) { return dct2(image_to_matrix(img)); }

std::vector<std::pair<Eigen::Index, Eigen::Index>> zigzag_order(Eigen::Index rows,
                                                                Eigen::Index cols) {
  require(rows >= 1 && cols >= 1, ErrorCode::kInvalidArgument, "zigzag_order: empty grid");
  std::vector<std::pair<Eigen::Index, Eigen::Index>> order;
  order.reserve(static_cast<std::size_t>(rows * cols));
  for (Eigen::Index s = 0; s <= rows + cols - 2; ++s) {
    const Eigen::Index r_lo = std::max<Eigen::Index>(0, s - cols + 1);
    const Eigen::Index r_hi = std::min(s, rows - 1);
    if (s % 2 == 0) {
      // Even diagonals run bottom-left to top-right.
      for (Eigen::Index r = r_hi; r >= r_lo; --r) order.emplace_back(r, s - r);
    } else {
      for (Eigen::Index r = r_lo; r <= r_hi; ++r) order.emplace_back(r, s - r);
    }
  }
  return order;
}

FeatureVector extract_features(const RawImage& img, const ExtractOptions& opts,
                               std::string modality, std::string source_id) {
  const RawImage normalized = normalize_geometry(img, opts.width, opts.height);
  const Matrix coeffs = dct2(normalized);
  return FeatureVector{zigzag_scan(coeffs, opts.dims), std::move(modality),
                       std::move(source_id)};
}

}  // namespace sparsever
