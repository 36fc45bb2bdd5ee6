#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsever/eval.hpp"
#include "sparsever/features.hpp"
#include "sparsever/io.hpp"
#include "sparsever/synth.hpp"

namespace sparsever::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", 100.0 * v);
  return buf;
}

void add_solver_flags(CLI::App* sub, SolverConfig& cfg) {
  sub->add_option("--lambda", cfg.lambda, "L1 penalty weight")->capture_default_str();
  sub->add_option("--tol", cfg.tol, "KKT tolerance")->capture_default_str();
  sub->add_option("--max-iter", cfg.max_iter, "iteration cap per solve")->capture_default_str();
}

ordered_json solver_json(const SolverConfig& cfg) {
  return {{"lambda", cfg.lambda}, {"tol", cfg.tol}, {"max_iter", cfg.max_iter}};
}

std::vector<Metric> parse_metrics(const std::vector<std::string>& names) {
  require(!names.empty(), ErrorCode::kInvalidArgument, "at least one --metric is required");
  std::vector<Metric> out;
  for (const auto& n : names) {
    const Metric m = parse_metric(n);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

// Gallery and probe sets of one modality.
struct Modality {
  std::string name;
  Dictionary gallery;
  std::vector<LabeledFeature> probes;
};

std::vector<LabeledFeature> load_rows(const fs::path& path) {
  auto rows = read_feature_csv(path);
  require(!rows.empty(), ErrorCode::kEmptyInput, path.string() + ": no samples");
  return rows;
}

std::vector<Modality> load_modalities(const std::vector<std::string>& galleries,
                                      const std::vector<std::string>& probes) {
  require(galleries.size() == probes.size() && !galleries.empty() && galleries.size() <= 2,
          ErrorCode::kInvalidArgument,
          "give one or two --gallery files and as many --probes files");
  std::vector<Modality> out;
  for (std::size_t i = 0; i < galleries.size(); ++i) {
    Modality m;
    const auto rows = load_rows(galleries[i]);
    m.gallery = Dictionary::build(group_into_blocks(rows));
    m.name = m.gallery.modality();
    m.probes = load_rows(probes[i]);
    for (const auto& p : m.probes) {
      require(p.feature.modality == m.name, ErrorCode::kInvalidArgument,
              probes[i] + ": probe modality '" + p.feature.modality + "' differs from gallery '" +
                  m.name + "'");
      require(p.feature.dim() == m.gallery.dim(), ErrorCode::kDimensionMismatch,
              probes[i] + ": probe dimension " + std::to_string(p.feature.dim()) +
                  " differs from gallery " + std::to_string(m.gallery.dim()));
    }
    out.push_back(std::move(m));
  }
  if (out.size() == 2) {
    require(out[0].name != out[1].name, ErrorCode::kInvalidArgument,
            "both galleries have modality '" + out[0].name + "'");
    check_same_classes(out[0].gallery, out[1].gallery);
    // Fused rows are summed by class index, so both galleries must list the
    // classes in the same order.
    std::vector<ClassBlock> reordered;
    for (const auto& id : out[0].gallery.class_ids()) {
      reordered.push_back(out[1].gallery.blocks()[out[1].gallery.class_index(id)]);
    }
    out[1].gallery = Dictionary::build(std::move(reordered));
  }
  return out;
}

void require_scale(std::size_t scale, std::size_t classes) {
  require(scale == 0 || (scale >= 2 && scale <= classes), ErrorCode::kInvalidArgument,
          "scale " + std::to_string(scale) + " must be 0 or within [2, " + std::to_string(classes) +
              "]");
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  std::string input;
  std::string out;
  std::string modality = "face";
  ExtractOptions opts;
};

bool is_pgm(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".pgm";
}

int cmd_extract(const ExtractArgs& a, std::ostream& out, std::ostream& err) {
  require(a.opts.width >= 1 && a.opts.height >= 1, ErrorCode::kInvalidArgument,
          "target size must be positive");
  require(a.opts.dims >= 1 &&
              static_cast<std::size_t>(a.opts.dims) <= a.opts.width * a.opts.height,
          ErrorCode::kInvalidArgument, "--dims must be within [1, width*height]");
  const fs::path root(a.input);
  require(fs::is_directory(root), ErrorCode::kIo, a.input + ": not a directory");

  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && is_pgm(e.path())) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  require(!files.empty(), ErrorCode::kEmptyInput, a.input + ": no .pgm files");

  // Subject from the parent directory, or from the file name before '_'.
  std::vector<LabeledFeature> rows;
  std::size_t bad = 0;
  for (const auto& f : files) {
    const fs::path rel = fs::relative(f, root);
    std::string subject;
    if (rel.has_parent_path()) {
      subject = rel.parent_path().filename().string();
    } else {
      const std::string stem = f.stem().string();
      const auto cut = stem.find('_');
      if (cut == std::string::npos || cut == 0) {
        err << f.string() << ": cannot infer subject (expected <subject>_<sample>.pgm)\n";
        ++bad;
        continue;
      }
      subject = stem.substr(0, cut);
    }
    std::string source = rel.generic_string();
    source.resize(source.size() - f.extension().string().size());
    try {
      rows.push_back({subject, extract_features(load_pgm_file(f), a.opts, a.modality, source)});
    } catch (const Error& e) {
      err << f.string() << ": " << e.what() << "\n";
      ++bad;
    }
  }
  if (bad > 0) {
    err << "extract: " << bad << " of " << files.size() << " files failed; nothing written\n";
    return 1;
  }

  fs::create_directories(a.out);
  write_feature_csv(fs::path(a.out) / "features.csv", rows);
  ordered_json manifest = feature_manifest(rows);
  manifest["extraction"] = {{"width", a.opts.width}, {"height", a.opts.height}, {"dims", a.opts.dims}};
  write_json(fs::path(a.out) / "manifest.json", manifest);
  out << "extracted " << rows.size() << " samples of dimension " << a.opts.dims << " from "
      << group_into_blocks(rows).size() << " subjects\n";
  return 0;
}

// ------------------------------------------------------------------- dict

struct DictArgs {
  std::string features;
  std::string out;
};

int cmd_dict(const DictArgs& a, std::ostream& out) {
  const auto rows = load_rows(a.features);
  const Dictionary dict = Dictionary::build(group_into_blocks(rows));
  fs::create_directories(a.out);
  write_dictionary(fs::path(a.out) / "dictionary.csv", fs::path(a.out) / "dictionary.json", dict);
  out << "dictionary: " << dict.class_count() << " classes, " << dict.column_count()
      << " columns, dimension " << dict.dim() << "\n";
  return 0;
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
  SynthParams params;
  std::size_t ear_probes = 11;
  std::uint64_t pair_seed = 0;
  bool pair_seed_set = false;
  std::string out;
};

std::vector<LabeledFeature> gallery_rows(const PairedDataset& pd, bool face) {
  std::vector<LabeledFeature> rows;
  for (const auto& [f, e] : pd.subjects) {
    const ClassBlock& b = face ? f : e;
    for (const auto& s : b.samples) rows.push_back({b.class_id, s});
  }
  return rows;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  a.params.validate();
  require(a.ear_probes >= 1, ErrorCode::kInvalidArgument, "synth: ear probes must be >= 1");
  const auto [fp, ep] = multimodal_params(a.params, a.ear_probes);
  const std::uint64_t pair_seed = a.pair_seed_set ? a.pair_seed : a.params.seed;
  const PairedDataset pd = pair_multimodal(gen_dataset(fp), gen_dataset(ep), pair_seed);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  const auto face_gallery = gallery_rows(pd, true);
  const auto ear_gallery = gallery_rows(pd, false);
  write_feature_csv(dir / "face_gallery.csv", face_gallery);
  write_feature_csv(dir / "face_probes.csv", pd.face_probes);
  write_feature_csv(dir / "ear_gallery.csv", ear_gallery);
  write_feature_csv(dir / "ear_probes.csv", pd.ear_probes);

  ordered_json manifest;
  manifest["generator"] = "bouquet";
  manifest["params"] = {{"classes", a.params.classes},
                        {"train", a.params.train},
                        {"face_probes", a.params.probes},
                        {"ear_probes", a.ear_probes},
                        {"dim", a.params.dim},
                        {"within_spread", a.params.within_spread},
                        {"between_spread", a.params.between_spread},
                        {"seed", a.params.seed},
                        {"face_seed", fp.seed},
                        {"ear_seed", ep.seed},
                        {"pair_seed", pair_seed}};
  manifest["subjects"] = pd.subjects.size();
  manifest["multimodal_probes"] = pd.probes.size();
  manifest["files"] = {{"face_gallery", feature_manifest(face_gallery)},
                       {"face_probes", feature_manifest(pd.face_probes)},
                       {"ear_gallery", feature_manifest(ear_gallery)},
                       {"ear_probes", feature_manifest(pd.ear_probes)}};
  write_json(dir / "manifest.json", manifest);
  out << "synthesized " << pd.subjects.size() << " subjects: " << face_gallery.size()
      << " face / " << ear_gallery.size() << " ear gallery samples, " << pd.face_probes.size()
      << " face / " << pd.ear_probes.size() << " ear probes, " << pd.probes.size()
      << " multimodal probes\n";
  return 0;
}

// ------------------------------------------------------------------- eval

struct ScoringArgs {
  std::vector<std::string> galleries;
  std::vector<std::string> probes;
  std::vector<std::string> metrics{"sce"};
  SolverConfig solver;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::size_t bench_probes = 20;
  std::string out;
};

struct EvalArgs {
  ScoringArgs s;
  std::size_t scale = 0;
  std::size_t bins = 50;
  bool dump_scores = false;
};

// Score rows of every method for one dictionary scale and trial seed.
struct MethodRows {
  std::string method;
  Metric metric;
  std::string modality;
  std::vector<ProbeScores> rows;
};

std::vector<MethodRows> score_methods(const std::vector<Modality>& mods,
                                      const std::vector<Metric>& metrics, const SolverConfig& cfg,
                                      const ScoringOptions& opts,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<std::vector<std::vector<ProbeScores>>> per_mod;
  for (const auto& m : mods) per_mod.push_back(score_probes(m.gallery, m.probes, metrics, cfg, opts));
  std::vector<MethodRows> out;
  for (std::size_t k = 0; k < metrics.size(); ++k) {
    const std::string metric(to_string(metrics[k]));
    for (std::size_t i = 0; i < mods.size(); ++i) {
      out.push_back({mods[i].name + "_" + metric, metrics[k], mods[i].name, per_mod[i][k]});
    }
    if (mods.size() == 2) {
      out.push_back({"fused_" + metric, metrics[k], "fused",
                     fuse_probe_scores(per_mod[0][k], per_mod[1][k], pairs)});
    }
  }
  return out;
}

// Runtime of the per-query pipeline: every modality alone, and fused.
ordered_json runtime_block(const std::vector<Modality>& mods, const std::vector<Metric>& metrics,
                           const SolverConfig& cfg, const ScoringOptions& opts,
                           const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                           std::size_t limit) {
  ordered_json j;
  for (const auto& m : mods) {
    j[m.name] = runtime_to_json(benchmark_scoring(m.gallery, m.probes, metrics, cfg, opts, limit));
  }
  if (mods.size() == 2 && !pairs.empty()) {
    j["fused"] = runtime_to_json(benchmark_scoring(mods[0].gallery, mods[0].probes, mods[1].gallery,
                                                   mods[1].probes, pairs, metrics, cfg, opts,
                                                   limit));
  }
  return j;
}

std::vector<std::pair<std::size_t, std::size_t>> pairs_of(const std::vector<Modality>& mods) {
  if (mods.size() != 2) return {};
  auto pairs = pair_by_class(mods[0].probes, mods[1].probes);
  require(!pairs.empty(), ErrorCode::kEmptyInput, "no face/ear probes share a subject");
  return pairs;
}

void add_scoring_flags(CLI::App* sub, ScoringArgs& a) {
  sub->add_option("--gallery", a.galleries, "gallery feature CSV (one per modality)")->required();
  sub->add_option("--probes", a.probes, "probe feature CSV (one per modality)")->required();
  sub->add_option("--metric", a.metrics, "sce, scr or cosine; repeatable")->capture_default_str();
  sub->add_option("--seed", a.seed, "seed for small-dictionary sampling")->capture_default_str();
  sub->add_option("--threads", a.threads, "scoring threads (0 = all cores)")->capture_default_str();
  sub->add_option("--bench-probes", a.bench_probes,
                  "queries timed sequentially for runtime stats (0 = all)")
      ->capture_default_str();
  sub->add_option("--out", a.out, "output directory")->required();
  add_solver_flags(sub, a.solver);
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  a.s.solver.validate();
  const auto metrics = parse_metrics(a.s.metrics);
  require(a.bins >= 1, ErrorCode::kInvalidArgument, "--bins must be >= 1");
  const auto mods = load_modalities(a.s.galleries, a.s.probes);
  const std::size_t c = mods.front().gallery.class_count();
  require_scale(a.scale, c);
  const auto pairs = pairs_of(mods);

  ScoringOptions opts;
  opts.scale = a.scale;
  opts.seed = a.s.seed;
  opts.threads = a.s.threads;
  const auto methods = score_methods(mods, metrics, a.s.solver, opts, pairs);
  const std::size_t ranks = a.scale == 0 ? c : a.scale;

  std::vector<EvalReport> reports;
  std::vector<Histogram> hists;
  for (const auto& m : methods) {
    reports.push_back(evaluate(m.rows, polarity_of(m.metric), m.method, ranks));
    hists.push_back(histogram_scores(collect_scores(m.rows, polarity_of(m.metric)), a.bins));
  }
  const ordered_json runtime =
      runtime_block(mods, metrics, a.s.solver, opts, pairs, a.s.bench_probes);

  const fs::path dir(a.s.out);
  fs::create_directories(dir);
  ordered_json report;
  report["config"] = {{"solver", solver_json(a.s.solver)},
                      {"scale", a.scale},
                      {"seed", a.s.seed},
                      {"classes", c},
                      {"bins", a.bins}};
  report["methods"] = ordered_json::array();
  for (std::size_t i = 0; i < methods.size(); ++i) {
    report["methods"].push_back(report_to_json(reports[i]));
    write_roc_csv(dir / (methods[i].method + "_roc.csv"), reports[i].roc);
    write_cmc_csv(dir / (methods[i].method + "_cmc.csv"), reports[i].cmc);
    write_histogram_csv(dir / (methods[i].method + "_hist.csv"), hists[i]);
  }
  write_json(dir / "report.json", report);
  write_json(dir / "runtime.json", runtime);
  if (a.dump_scores) {
    bool append = false;
    for (const auto& m : methods) {
      write_score_dump(dir / "scores.csv", m.rows, mods.front().gallery.class_ids(), m.metric,
                       m.modality, append);
      append = true;
    }
  }

  out << "method          EER(%)   rank-1(%)  genuine  imposter  undefined\n";
  for (const auto& r : reports) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-14s %8s %10s %8zu %9zu %10zu\n", r.method.c_str(),
                  percent(r.eer).c_str(), percent(r.rank_one).c_str(), r.genuine_count,
                  r.imposter_count, r.undefined_score_count);
    out << line;
  }
  for (const auto& [name, st] : runtime.items()) {
    out << "runtime " << name << ": " << st["mean_seconds"].get<double>() * 1e3
        << " ms/query over " << st["count"].get<std::size_t>() << " queries\n";
  }
  return 0;
}

// ----------------------------------------------------------------- verify

struct VerifyArgs {
  ScoringArgs s;
  std::size_t scale = 0;
  double threshold = 0.0;
  std::string claim;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  a.s.solver.validate();
  const auto metrics = parse_metrics(a.s.metrics);
  require(metrics.size() == 1, ErrorCode::kInvalidArgument, "verify takes exactly one --metric");
  require(std::isfinite(a.threshold), ErrorCode::kInvalidArgument, "--threshold must be finite");
  auto mods = load_modalities(a.s.galleries, a.s.probes);
  const std::size_t c = mods.front().gallery.class_count();
  require_scale(a.scale, c);
  const auto pairs = pairs_of(mods);

  // The claimed identity replaces the label, so sampled dictionaries always
  // hold the claimed class.
  std::vector<std::vector<std::string>> truth(mods.size());
  for (std::size_t i = 0; i < mods.size(); ++i) {
    for (auto& p : mods[i].probes) {
      truth[i].push_back(p.class_id);
      if (!a.claim.empty()) p.class_id = a.claim;
    }
  }
  ScoringOptions opts;
  opts.scale = a.scale;
  opts.seed = a.s.seed;
  opts.threads = a.s.threads;
  const auto methods = score_methods(mods, metrics, a.s.solver, opts, pairs);
  const MethodRows& m = methods.back();  // fused when two modalities are given

  const fs::path dir(a.s.out);
  fs::create_directories(dir);
  std::ofstream csv(dir / "decisions.csv", std::ios::binary);
  require(static_cast<bool>(csv), ErrorCode::kIo, "cannot write decisions.csv");
  csv << "probe_id,claimed_class,true_class,metric,modality,score,threshold,decision\n";
  const Polarity pol = polarity_of(m.metric);
  const auto& ids = mods.front().gallery.class_ids();
  std::size_t accepted = 0;
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    const ProbeScores& row = m.rows[r];
    const std::string& t = mods.size() == 2 ? truth[0][pairs[r].first] : truth[0][r];
    const auto pos = std::find(row.classes.begin(), row.classes.end(), row.true_class) -
                     row.classes.begin();
    std::string decision = "undefined";
    std::string value = "nan";
    if (row.defined) {
      const double v = row.values[static_cast<std::size_t>(pos)];
      const bool ok = accepts(pol, v, a.threshold);
      accepted += ok ? 1 : 0;
      decision = ok ? "accept" : "reject";
      value = format_double(v);
    }
    csv << row.probe_id << ',' << ids[row.true_class] << ',' << t << ',' << to_string(m.metric)
        << ',' << m.modality << ',' << value << ',' << format_double(a.threshold) << ','
        << decision << '\n';
  }
  require(static_cast<bool>(csv), ErrorCode::kIo, "failed writing decisions.csv");
  out << m.method << ": accepted " << accepted << " of " << m.rows.size() << " queries at threshold "
      << format_double(a.threshold) << "\n";
  return 0;
}

// ------------------------------------------------------------------ sweep

struct SweepArgs {
  ScoringArgs s;
  std::vector<std::size_t> scales;
  std::size_t trials = 10;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  a.s.solver.validate();
  const auto metrics = parse_metrics(a.s.metrics);
  require(a.trials >= 1, ErrorCode::kInvalidArgument, "--trials must be >= 1");
  require(!a.scales.empty(), ErrorCode::kInvalidArgument, "--scales is required");
  const auto mods = load_modalities(a.s.galleries, a.s.probes);
  const std::size_t c = mods.front().gallery.class_count();
  for (std::size_t k : a.scales) {
    require(k >= 2 && k <= c, ErrorCode::kInvalidArgument,
            "scale " + std::to_string(k) + " must be within [2, " + std::to_string(c) + "]");
  }
  const auto pairs = pairs_of(mods);

  ordered_json sweep;
  sweep["config"] = {{"solver", solver_json(a.s.solver)},
                     {"seed", a.s.seed},
                     {"trials", a.trials},
                     {"classes", c}};
  sweep["spread_statistic"] = "max absolute deviation of trial EERs from their mean";
  sweep["scales"] = ordered_json::array();
  ordered_json runtime;
  std::vector<std::string> table;

  for (std::size_t k : a.scales) {
    // The full dictionary is the same in every trial; it is scored once.
    const std::size_t distinct = k == c ? 1 : a.trials;
    std::vector<std::string> names;
    std::vector<std::vector<double>> eers;  // [method][trial]
    ordered_json trials = ordered_json::array();
    for (std::size_t r = 0; r < a.trials; ++r) {
      const std::uint64_t seed = derive_seed(a.s.seed, r);
      if (r < distinct) {
        ScoringOptions opts;
        opts.scale = k;
        opts.seed = seed;
        opts.threads = a.s.threads;
        const auto methods = score_methods(mods, metrics, a.s.solver, opts, pairs);
        if (names.empty()) {
          for (const auto& m : methods) names.push_back(m.method);
          eers.resize(names.size());
        }
        for (std::size_t i = 0; i < methods.size(); ++i) {
          eers[i].push_back(
              compute_eer(compute_roc(collect_scores(methods[i].rows, polarity_of(methods[i].metric)))));
        }
      } else {
        for (auto& e : eers) e.push_back(e.front());
      }
      ordered_json t;
      t["trial"] = r;
      t["seed"] = k == c ? ordered_json(nullptr) : ordered_json(seed);
      for (std::size_t i = 0; i < names.size(); ++i) t["eer"][names[i]] = eers[i].back();
      trials.push_back(std::move(t));
    }

    ordered_json summary;
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto& e = eers[i];
      double mean = 0.0;
      for (double v : e) mean += v;
      mean /= static_cast<double>(e.size());
      double dev = 0.0;
      for (double v : e) dev = std::max(dev, std::abs(v - mean));
      summary[names[i]] = {{"mean_eer", mean}, {"max_deviation", dev}};
      char line[160];
      std::snprintf(line, sizeof(line), "%6zu  %-14s %s (± %s)", k, names[i].c_str(),
                    percent(mean).c_str(), percent(dev).c_str());
      table.push_back(line);
    }
    sweep["scales"].push_back({{"scale", k}, {"trials", std::move(trials)}, {"summary", summary}});

    ScoringOptions bench;
    bench.scale = k;
    bench.seed = derive_seed(a.s.seed, 0);
    runtime[std::to_string(k)] = runtime_block(mods, metrics, a.s.solver, bench, pairs,
                                               a.s.bench_probes);
  }

  const fs::path dir(a.s.out);
  fs::create_directories(dir);
  write_json(dir / "sweep.json", sweep);
  write_json(dir / "sweep_runtime.json", runtime);

  out << " scale  method         EER(%) mean (± max dev)\n";
  for (const auto& l : table) out << l << "\n";
  for (const auto& [k, block] : runtime.items()) {
    for (const auto& [name, st] : block.items()) {
      out << "runtime scale " << k << " " << name << ": " << st["mean_seconds"].get<double>() * 1e3
          << " ms/query\n";
    }
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse-representation biometric verification toolkit"};
  app.set_config("--config", "", "key=value config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "PGM images to DCT feature CSV");
  extract->add_option("--input", ex.input, "directory of <subject>/<sample>.pgm or <subject>_<sample>.pgm")
      ->required();
  extract->add_option("--out", ex.out, "output directory")->required();
  extract->add_option("--width", ex.opts.width)->capture_default_str();
  extract->add_option("--height", ex.opts.height)->capture_default_str();
  extract->add_option("--dims", ex.opts.dims, "zigzag coefficients kept")->capture_default_str();
  extract->add_option("--modality", ex.modality)->capture_default_str();

  DictArgs di;
  auto* dict = app.add_subcommand("dict", "build a unit-normalized dictionary from features");
  dict->add_option("--features", di.features)->required();
  dict->add_option("--out", di.out, "output directory")->required();

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "generate a paired synthetic face/ear dataset");
  synth->add_option("--classes", sy.params.classes)->capture_default_str();
  synth->add_option("--train", sy.params.train, "gallery samples per class")->capture_default_str();
  synth->add_option("--probes", sy.params.probes, "face probes per class")->capture_default_str();
  synth->add_option("--ear-probes", sy.ear_probes, "ear probes per class")->capture_default_str();
  synth->add_option("--dim", sy.params.dim)->capture_default_str();
  synth->add_option("--within", sy.params.within_spread, "per-class noise scale")->capture_default_str();
  synth->add_option("--between", sy.params.between_spread, "class-center cap radius (radians)")
      ->capture_default_str();
  synth->add_option("--seed", sy.params.seed)->capture_default_str();
  auto* pair_opt = synth->add_option("--pair-seed", sy.pair_seed, "subject pairing seed (default: --seed)");
  synth->add_option("--out", sy.out, "output directory")->required();

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "ROC/EER/CMC evaluation, unimodal and fused");
  add_scoring_flags(eval, ev.s);
  eval->add_option("--scale", ev.scale, "small random dictionary size (0 = all classes)")
      ->capture_default_str();
  eval->add_option("--bins", ev.bins, "histogram bins")->capture_default_str();
  eval->add_flag("--dump-scores", ev.dump_scores, "also write every score to scores.csv");

  VerifyArgs ve;
  auto* verify = app.add_subcommand("verify", "accept/reject claims at a fixed threshold");
  add_scoring_flags(verify, ve.s);
  verify->add_option("--threshold", ve.threshold)->required();
  verify->add_option("--claim", ve.claim, "claimed class for every probe (default: its own label)");
  verify->add_option("--scale", ve.scale)->capture_default_str();

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "EER over repeated small random dictionaries");
  add_scoring_flags(sweep, sw.s);
  sweep->add_option("--scales", sw.scales, "dictionary sizes, e.g. --scales 50 79")->required();
  sweep->add_option("--trials", sw.trials)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (extract->parsed()) return cmd_extract(ex, out, err);
    if (dict->parsed()) return cmd_dict(di, out);
    if (synth->parsed()) {
      sy.pair_seed_set = pair_opt->count() > 0;
      return cmd_synth(sy, out);
    }
    if (eval->parsed()) return cmd_eval(ev, out);
    if (verify->parsed()) return cmd_verify(ve, out);
    if (sweep->parsed()) return cmd_sweep(sw, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace sparsever::cli
