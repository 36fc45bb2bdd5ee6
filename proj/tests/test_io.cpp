#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sparsever/io.hpp"

using namespace sparsever;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("sparsever_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

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

TEST_CASE("doubles print in shortest round-trip form") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("feature CSV round trip is exact") {
  TempDir t;
  std::mt19937_64 rng(2);
  std::vector<LabeledFeature> rows;
  for (int i = 0; i < 6; ++i) {
    rows.push_back({"s" + std::to_string(i % 3),
                    {oracle::random_unit(5, rng), "ear", "x" + std::to_string(i)}});
  }
  write_feature_csv(t.path / "f.csv", rows);
  const auto back = read_feature_csv(t.path / "f.csv");
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].class_id == rows[i].class_id);
    CHECK(back[i].feature.source_id == rows[i].feature.source_id);
    CHECK(back[i].feature.modality == "ear");
    CHECK(back[i].feature.values == rows[i].feature.values);
  }
  const auto blocks = group_into_blocks(back);
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[1].class_id == "s1");
  CHECK(blocks[1].samples.size() == 2);
  const auto m = feature_manifest(back);
  CHECK(m["dimension"] == 5);
  CHECK(m["classes"].size() == 3);
}

TEST_CASE("feature CSV parsing is strict") {
  TempDir t;
  const fs::path p = t.path / "bad.csv";
  put(p, "subject_id,sample_id,modality,v0,v1\na,1,face,0.5,0.5\n");
  CHECK(read_feature_csv(p).size() == 1);
  put(p, "subject_id,sample_id,modality,v0,v1\na,1,face,0.5\n");
  CHECK(code_of([&] { read_feature_csv(p); }) == ErrorCode::kMalformedInput);
  put(p, "subject_id,sample_id,modality,v0,v1\na,1,face,0.5,abc\n");
  CHECK(code_of([&] { read_feature_csv(p); }) == ErrorCode::kMalformedInput);
  put(p, "subject_id,sample_id,modality,v0,v1\na,1,face,0.5,nan\n");
  CHECK(code_of([&] { read_feature_csv(p); }) == ErrorCode::kMalformedInput);
  put(p, "id,v0\n");
  CHECK(code_of([&] { read_feature_csv(p); }) == ErrorCode::kMalformedInput);
  put(p, "subject_id,sample_id,modality,v0\n");
  CHECK(code_of([&] { read_feature_csv(p); }) == ErrorCode::kEmptyInput);
  CHECK(code_of([&] { read_feature_csv(t.path / "missing.csv"); }) == ErrorCode::kIo);

  const std::vector<LabeledFeature> comma{{"a,b", {Vector::Ones(2), "face", "x"}}};
  CHECK(code_of([&] { write_feature_csv(p, comma); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("dictionary files hold normalized columns") {
  TempDir t;
  const Dictionary d = Dictionary::build({{"a", {{Vector::Constant(3, 2.0), "face", "a1"}}},
                                          {"b", {{Vector::Unit(3, 1) * 5.0, "face", "b1"}}}});
  write_dictionary(t.path / "d.csv", t.path / "d.json", d);
  const auto rows = read_feature_csv(t.path / "d.csv");
  CHECK(rows[0].feature.values.norm() == doctest::Approx(1.0));
  CHECK(rows[1].feature.values == Vector::Unit(3, 1));
  const auto j = read_json(t.path / "d.json");
  CHECK(j["columns"] == 2);
  CHECK(j["classes"][1]["class_id"] == "b");
  put(t.path / "x.json", "{nope");
  CHECK(code_of([&] { read_json(t.path / "x.json"); }) == ErrorCode::kMalformedInput);
}

TEST_CASE("score dump and curve files") {
  TempDir t;
  const std::vector<std::string> ids{"a", "b"};
  const std::vector<ProbeScores> rows{{"p1", 0, {0, 1}, {0.25, 0.5}, true},
                                      {"p2", 1, {0, 1}, {0.0, 0.0}, false}};
  write_score_dump(t.path / "s.csv", rows, ids, Metric::kSce, "face");
  write_score_dump(t.path / "s.csv", rows, ids, Metric::kScr, "fused", true);
  CHECK(slurp(t.path / "s.csv") ==
        "probe_id,claimed_class,true_class,metric,value,is_genuine,modality\n"
        "p1,a,a,sce,0.25,1,face\n"
        "p1,b,a,sce,0.5,0,face\n"
        "p1,a,a,scr,0.25,1,fused\n"
        "p1,b,a,scr,0.5,0,fused\n");

  write_roc_csv(t.path / "r.csv", std::vector<RocPoint>{{0.5, 0.25, 0.0}});
  CHECK(slurp(t.path / "r.csv") == "threshold,far,frr\n0.5,0.25,0\n");
  write_cmc_csv(t.path / "c.csv", CmcCurve{{0.5, 1.0}, 0.5});
  CHECK(slurp(t.path / "c.csv") == "rank,rate\n1,0.5\n2,1\n");

  EvalReport r;
  r.method = "face_sce";
  r.eer = 0.125;
  r.runtime = RuntimeStats{3, 0.1, 0.1, 0.0};
  const auto j = report_to_json(r);
  CHECK(j["eer"] == 0.125);
  CHECK(j["runtime"]["count"] == 3);
}
