#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "sparsever/features.hpp"
#include "sparsever/io.hpp"

using namespace sparsever;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("sparsever_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& s) const { return (path / s).string(); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "sparsever");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void synth_into(const std::string& dir, const std::string& seed = "3") {
  const auto r = run({"synth", "--classes", "6", "--train", "3", "--probes", "2", "--ear-probes", "2",
                      "--dim", "16", "--seed", seed, "--out", dir});
  REQUIRE_MESSAGE(r.code == 0, r.err);
}

void write_image(const fs::path& p, std::size_t w, std::size_t h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(0, 255);
  RawImage img{w, h, std::vector<double>(w * h)};
  for (auto& v : img.pixels) v = u(rng) / 255.0;
  const auto bytes = encode_pgm(img);
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                           static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("synth writes the paired dataset deterministically") {
  TempDir t;
  synth_into(t / "a");
  synth_into(t / "b");
  for (const char* f : {"face_gallery.csv", "face_probes.csv", "ear_gallery.csv", "ear_probes.csv",
                        "manifest.json"}) {
    CHECK(fs::exists(t.path / "a" / f));
    CHECK(slurp(t.path / "a" / f) == slurp(t.path / "b" / f));
  }
  const auto probes = read_feature_csv(t.path / "a" / "ear_probes.csv");
  CHECK(probes.size() == 12);
  CHECK(probes.front().class_id == "S000");
  synth_into(t / "c", "4");
  CHECK(slurp(t.path / "a" / "face_probes.csv") != slurp(t.path / "c" / "face_probes.csv"));
}

TEST_CASE("eval reports unimodal and fused methods") {
  TempDir t;
  synth_into(t / "d");
  const std::string d = t / "d";
  const auto r = run({"eval", "--gallery", d + "/face_gallery.csv", "--gallery", d + "/ear_gallery.csv",
                      "--probes", d + "/face_probes.csv", "--probes", d + "/ear_probes.csv", "--metric",
                      "sce", "--metric", "scr", "--threads", "1", "--dump-scores", "--out", t / "e"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rep = read_json(t.path / "e" / "report.json");
  std::vector<std::string> names;
  for (const auto& m : rep["methods"]) names.push_back(m["method"]);
  CHECK(names == std::vector<std::string>{"face_sce", "ear_sce", "fused_sce", "face_scr", "ear_scr",
                                          "fused_scr"});
  for (const auto& m : rep["methods"]) {
    CHECK(m["eer"].get<double>() >= 0.0);
    CHECK(m["eer"].get<double>() <= 1.0);
  }
  // 6 classes x 2 face x 2 ear probes fuse into 24 queries.
  CHECK(rep["methods"][2]["genuine_count"] == 24);
  CHECK(rep["methods"][2]["imposter_count"] == 24 * 5);
  CHECK(fs::exists(t.path / "e" / "fused_sce_roc.csv"));
  CHECK(fs::exists(t.path / "e" / "ear_scr_cmc.csv"));
  CHECK(fs::exists(t.path / "e" / "runtime.json"));
  CHECK(fs::exists(t.path / "e" / "scores.csv"));

  // Thread count does not change any output.
  const auto r2 = run({"eval", "--gallery", d + "/face_gallery.csv", "--gallery", d + "/ear_gallery.csv",
                       "--probes", d + "/face_probes.csv", "--probes", d + "/ear_probes.csv", "--metric",
                       "sce", "--metric", "scr", "--threads", "3", "--dump-scores", "--out", t / "f"});
  REQUIRE(r2.code == 0);
  CHECK(slurp(t.path / "e" / "scores.csv") == slurp(t.path / "f" / "scores.csv"));
  CHECK(slurp(t.path / "e" / "fused_scr_roc.csv") == slurp(t.path / "f" / "fused_scr_roc.csv"));
}

TEST_CASE("verify decides every claim") {
  TempDir t;
  synth_into(t / "d");
  const std::string d = t / "d";
  const auto r = run({"verify", "--gallery", d + "/face_gallery.csv", "--probes", d + "/face_probes.csv",
                      "--metric", "sce", "--threshold", "0.8", "--out", t / "v"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  std::istringstream csv(slurp(t.path / "v" / "decisions.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "probe_id,claimed_class,true_class,metric,modality,score,threshold,decision");
  int n = 0;
  while (std::getline(csv, line)) {
    ++n;
    CHECK((line.ends_with(",accept") || line.ends_with(",reject")));
  }
  CHECK(n == 12);

  // Impostor claims against class S001.
  const auto c = run({"verify", "--gallery", d + "/face_gallery.csv", "--probes", d + "/face_probes.csv",
                      "--metric", "scr", "--threshold", "0.5", "--claim", "S001", "--out", t / "w"});
  REQUIRE(c.code == 0);
  CHECK(slurp(t.path / "w" / "decisions.csv").find(",S001,S000,scr,") != std::string::npos);

  const auto two = run({"verify", "--gallery", d + "/face_gallery.csv", "--probes", d + "/face_probes.csv",
                        "--metric", "sce", "--metric", "scr", "--threshold", "0.5", "--out", t / "x"});
  CHECK(two.code == 2);
  CHECK_FALSE(fs::exists(t.path / "x"));
}

TEST_CASE("sweep over small dictionaries") {
  TempDir t;
  synth_into(t / "d");
  const std::string d = t / "d";
  const auto r = run({"sweep", "--gallery", d + "/face_gallery.csv", "--gallery", d + "/ear_gallery.csv",
                      "--probes", d + "/face_probes.csv", "--probes", d + "/ear_probes.csv", "--scales",
                      "3", "--scales", "6", "--trials", "2", "--bench-probes", "2", "--out", t / "s"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(fs::exists(t.path / "s" / "sweep.json"));
  CHECK(fs::exists(t.path / "s" / "sweep_runtime.json"));
  const auto again = run({"sweep", "--gallery", d + "/face_gallery.csv", "--gallery",
                          d + "/ear_gallery.csv", "--probes", d + "/face_probes.csv", "--probes",
                          d + "/ear_probes.csv", "--scales", "3", "--scales", "6", "--trials", "2",
                          "--bench-probes", "2", "--out", t / "s2"});
  REQUIRE(again.code == 0);
  CHECK(slurp(t.path / "s" / "sweep.json") == slurp(t.path / "s2" / "sweep.json"));
  CHECK(run({"sweep", "--gallery", d + "/face_gallery.csv", "--probes", d + "/face_probes.csv",
             "--scales", "7", "--out", t / "s3"})
            .code == 2);
}

TEST_CASE("extract and dict from a PGM tree") {
  TempDir t;
  write_image(t.path / "img" / "alice" / "1.pgm", 30, 20, 1);
  write_image(t.path / "img" / "alice" / "2.pgm", 30, 20, 2);
  write_image(t.path / "img" / "bob_1.pgm", 60, 44, 3);
  const auto r = run({"extract", "--input", t / "img", "--dims", "40", "--out", t / "f"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rows = read_feature_csv(t.path / "f" / "features.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].class_id == "alice");
  CHECK(rows[2].class_id == "bob");
  CHECK(rows[0].feature.dim() == 40);
  CHECK(read_json(t.path / "f" / "manifest.json")["extraction"]["dims"] == 40);

  const auto dr = run({"dict", "--features", t / "f/features.csv", "--out", t / "dict"});
  REQUIRE_MESSAGE(dr.code == 0, dr.err);
  CHECK(read_json(t.path / "dict" / "dictionary.json")["columns"] == 3);
}

TEST_CASE("extract refuses bad input without writing") {
  TempDir t;
  fs::create_directories(t.path / "empty");
  CHECK(run({"extract", "--input", t / "empty", "--out", t / "o1"}).code != 0);
  CHECK_FALSE(fs::exists(t.path / "o1" / "features.csv"));

  write_image(t.path / "img" / "a" / "1.pgm", 10, 10, 1);
  std::ofstream(t.path / "img" / "a" / "2.pgm") << "P5\n10 10\n255\nshort";
  const auto r = run({"extract", "--input", t / "img", "--out", t / "o2"});
  CHECK(r.code == 1);
  CHECK(r.err.find("2.pgm") != std::string::npos);
  CHECK_FALSE(fs::exists(t.path / "o2" / "features.csv"));
}

TEST_CASE("argument errors") {
  CHECK(run({}).code != 0);
  CHECK(run({"bogus"}).code != 0);
  TempDir t;
  CHECK(run({"synth", "--probes", "0", "--out", t / "z"}).code == 2);
  CHECK_FALSE(fs::exists(t.path / "z" / "manifest.json"));
  CHECK(run({"eval", "--gallery", t / "nope.csv", "--probes", t / "nope.csv", "--out", t / "q"}).code == 2);
}
