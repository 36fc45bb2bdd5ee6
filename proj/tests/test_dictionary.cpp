#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "sparsever/dictionary.hpp"

using namespace sparsever;

namespace {

FeatureVector fv(std::initializer_list<double> v, std::string modality = "face") {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x(i++) = e;
  return {x, std::move(modality), "s"};
}

std::vector<ClassBlock> random_blocks(std::size_t classes, std::size_t per, Eigen::Index dim,
                                      std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<ClassBlock> out;
  for (std::size_t c = 0; c < classes; ++c) {
    ClassBlock b{"C" + std::to_string(c), {}};
    for (std::size_t s = 0; s < per; ++s) {
      Vector v(dim);
      for (Eigen::Index i = 0; i < dim; ++i) v(i) = 3.0 * g(rng);
      b.samples.push_back({v, "face", b.class_id + "_" + std::to_string(s)});
    }
    out.push_back(std::move(b));
  }
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("columns are unit norm and blocks are addressable") {
  std::mt19937_64 rng(1);
  const auto d = Dictionary::build(random_blocks(4, 3, 6, rng));
  CHECK(d.class_count() == 4);
  CHECK(d.column_count() == 12);
  CHECK(d.dim() == 6);
  CHECK(d.modality() == "face");
  for (Eigen::Index j = 0; j < d.column_count(); ++j) CHECK(d.matrix().col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.class_index("C2") == 2);
  CHECK(d.block_offset(2) == 6);
  CHECK(d.block_size(2) == 3);
  CHECK(d.block_matrix(2) == d.matrix().middleCols(6, 3));
  const std::vector<std::size_t> cmap{0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3};
  CHECK(d.column_class_map() == cmap);
  CHECK(code_of([&] { d.class_index("nope"); }) == ErrorCode::kUnknownClass);
}

TEST_CASE("build rejects malformed galleries") {
  CHECK(code_of([] { Dictionary::build({}); }) == ErrorCode::kEmptyInput);
  CHECK(code_of([] {
          Dictionary::build({{"a", {fv({1, 0})}}, {"a", {fv({0, 1})}}});
        }) == ErrorCode::kDuplicateClass);
  CHECK(code_of([] {
          Dictionary::build({{"a", {fv({1, 0})}}, {"b", {fv({0, 1, 0})}}});
        }) == ErrorCode::kDimensionMismatch);
  CHECK(code_of([] { Dictionary::build({{"a", {fv({0, 0})}}}); }) == ErrorCode::kZeroNorm);
  CHECK(code_of([] {
          Dictionary::build({{"a", {fv({1, 0})}}, {"b", {fv({0, 1}, "ear")}}});
        }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("delta masks partition the code") {
  std::mt19937_64 rng(2);
  const auto d = Dictionary::build(random_blocks(5, 4, 8, rng));
  SparseCode code;
  code.coefficients = Vector::Random(d.column_count());
  code.coefficients(3) = 0;
  Vector sum = Vector::Zero(d.column_count());
  for (std::size_t i = 0; i < d.class_count(); ++i) {
    const Vector di = delta(code, d, i);
    // Nonzero only inside block i.
    for (Eigen::Index j = 0; j < di.size(); ++j) {
      if (d.column_class_map()[static_cast<std::size_t>(j)] != i) CHECK(di(j) == 0.0);
    }
    sum += di;
  }
  CHECK(sum == code.coefficients);  // exact
  CHECK(delta(code, d, "C1") == delta(code, d, std::size_t{1}));
}

TEST_CASE("small dictionary sampling") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = sample_class_subset(79, 13, 50, seed);
    REQUIRE(s.size() == 50);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 50);
    CHECK(std::find(s.begin(), s.end(), 13) != s.end());
    CHECK(s.back() < 79);
  }
  CHECK(sample_class_subset(79, 4, 50, 7) == sample_class_subset(79, 4, 50, 7));
  CHECK(sample_class_subset(79, 4, 50, 7) != sample_class_subset(79, 4, 50, 8));
  CHECK(sample_class_subset(10, 3, 10, 1).size() == 10);
  CHECK(sample_class_subset(10, 3, 1, 1) == std::vector<std::size_t>{3});
  CHECK_THROWS_AS(sample_class_subset(10, 3, 11, 1), Error);
  CHECK_THROWS_AS(sample_class_subset(10, 10, 2, 1), Error);
}

TEST_CASE("non-target classes are drawn uniformly") {
  // Each of the 9 other classes should appear in about 4/9 of the draws.
  std::vector<int> hits(10, 0);
  const int n = 9000;
  for (int s = 0; s < n; ++s) {
    for (std::size_t c : sample_class_subset(10, 0, 5, static_cast<std::uint64_t>(s))) ++hits[c];
  }
  CHECK(hits[0] == n);
  for (int c = 1; c < 10; ++c) CHECK(std::abs(hits[c] / double(n) - 4.0 / 9.0) < 0.03);
}

TEST_CASE("subset keeps parent order and columns") {
  std::mt19937_64 rng(3);
  const auto d = Dictionary::build(random_blocks(6, 2, 4, rng));
  const auto s = d.subset({4, 1});
  CHECK(s.class_ids() == std::vector<std::string>{"C1", "C4"});
  CHECK(s.matrix().leftCols(2) == d.block_matrix(1));
  CHECK(s.matrix().rightCols(2) == d.block_matrix(4));
  const auto small = sample_small_dictionary(d, "C5", 3, 11);
  CHECK(small.class_count() == 3);
  CHECK(small.contains("C5"));
}

TEST_CASE("normalized") {
  Vector v(2);
  v << 3, 4;
  CHECK(normalized(v)(1) == doctest::Approx(0.8));
  CHECK(code_of([] { normalized(Vector::Zero(3)); }) == ErrorCode::kZeroNorm);
}
