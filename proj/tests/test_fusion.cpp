#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sparsever/fusion.hpp"

using namespace sparsever;

namespace {

Dictionary random_dict(const std::vector<std::string>& ids, std::size_t per, Eigen::Index dim,
                       const std::string& modality, std::mt19937_64& rng) {
  std::vector<ClassBlock> blocks;
  for (const auto& id : ids) {
    const Matrix A = oracle::random_unit_columns(dim, static_cast<Eigen::Index>(per), rng);
    ClassBlock b{id, {}};
    for (Eigen::Index j = 0; j < A.cols(); ++j) b.samples.push_back({A.col(j), modality, id});
    blocks.push_back(std::move(b));
  }
  return Dictionary::build(std::move(blocks));
}

}  // namespace

TEST_CASE("fused score is the plain sum of the two modality scores") {
  std::mt19937_64 rng(1);
  const Dictionary face = random_dict({"S0", "S1", "S2"}, 3, 10, "face", rng);
  // Ear gallery enrolls the same subjects in another order.
  const Dictionary ear = random_dict({"S2", "S0", "S1"}, 2, 8, "ear", rng);
  const MultimodalQuery q{{oracle::random_unit(10, rng), "face", "f"},
                          {oracle::random_unit(8, rng), "ear", "e"}, "S1", "f+e"};
  const SolverConfig cfg;
  for (Metric m : {Metric::kSce, Metric::kScr, Metric::kCosine}) {
    const auto fused = score_all_classes_multimodal(face, ear, q, m, cfg);
    const auto fs = score_query(face, q.face_feature.values, m, cfg);
    const auto es = score_query(ear, q.ear_feature.values, m, cfg);
    REQUIRE(fused.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      const std::string& id = face.class_id(i);
      CHECK(fused[i].face_score.class_id == id);
      CHECK(fused[i].face_score.value == fs[i]);
      CHECK(fused[i].ear_score.value == es[ear.class_index(id)]);
      CHECK(fused[i].fused_value == fs[i] + es[ear.class_index(id)]);
    }
    const auto [decision, score] = verify_multimodal(face, ear, q, m, 0.5, cfg);
    CHECK(score.face_score.class_id == "S1");
    CHECK(decision.accepted() == accepts(polarity_of(m), score.fused_value, 0.5));
  }
}

TEST_CASE("per-modality solver settings are honoured") {
  std::mt19937_64 rng(2);
  const Dictionary face = random_dict({"a", "b"}, 3, 6, "face", rng);
  const Dictionary ear = random_dict({"a", "b"}, 3, 6, "ear", rng);
  const MultimodalQuery q{{oracle::random_unit(6, rng), "face", "f"},
                          {oracle::random_unit(6, rng), "ear", "e"}, "a", "q"};
  SolverConfig heavy;
  heavy.lambda = 100.0;  // forces the zero code
  const ModalityConfigs cfg(SolverConfig{}, heavy);
  try {
    score_all_classes_multimodal(face, ear, q, Metric::kScr, cfg);
    FAIL("expected an undefined ear score");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUndefinedScore);
    CHECK(std::string(e.what()).rfind("ear: ", 0) == 0);
  }
  CHECK_NOTHROW(score_all_classes_multimodal(face, ear, q, Metric::kSce, cfg));
}

TEST_CASE("fusion requires the same enrolled subjects") {
  std::mt19937_64 rng(3);
  const Dictionary face = random_dict({"a", "b"}, 2, 5, "face", rng);
  const Dictionary ear = random_dict({"a", "c"}, 2, 5, "ear", rng);
  const MultimodalQuery q{{oracle::random_unit(5, rng), "face", "f"},
                          {oracle::random_unit(5, rng), "ear", "e"}, "a", "q"};
  try {
    score_all_classes_multimodal(face, ear, q, Metric::kSce, SolverConfig{});
    FAIL("expected a class mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kClassMismatch);
  }
  MultimodalQuery unknown = q;
  unknown.claimed = "zz";
  CHECK_THROWS_AS(score_all_classes_multimodal(face, face, unknown, Metric::kSce, SolverConfig{}), Error);
  CHECK_THROWS_AS(fuse_sum({1.0}, {1.0, 2.0}), Error);
  CHECK(fuse_sum({1.0, 2.0}, {0.5, -1.0}) == std::vector<double>{1.5, 1.0});
}
