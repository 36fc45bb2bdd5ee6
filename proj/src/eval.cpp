#include "sparsever/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

#include "sparsever/parallel.hpp"

namespace sparsever {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5eedu};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::uint64_t subset_seed(std::uint64_t trial_seed, std::size_t claimed_class) {
  return derive_seed(trial_seed, claimed_class);
}

std::vector<std::vector<ProbeScores>> score_probes(const Dictionary& dict,
                                                   std::span<const LabeledFeature> probes,
                                                   std::span<const Metric> metrics,
                                                   const SolverConfig& cfg,
                                                   const ScoringOptions& opts,
                                                   const SolveFn& solve) {
  cfg.validate();
  const std::size_t c = dict.class_count();
  std::vector<std::size_t> truth(probes.size());
  for (std::size_t p = 0; p < probes.size(); ++p) {
    require(dict.contains(probes[p].class_id), ErrorCode::kUnknownClass,
            "probe '" + probes[p].feature.source_id + "' has unenrolled class '" +
                probes[p].class_id + "'");
    truth[p] = dict.class_index(probes[p].class_id);
  }

  // One sampled dictionary per claimed class and trial.
  std::vector<std::vector<std::size_t>> subset_of(c);
  std::vector<Dictionary> sub_dict(c);
  const bool small = opts.scale != 0 && opts.scale != c;
  if (small) {
    require(opts.scale <= c, ErrorCode::kInvalidArgument,
            "dictionary scale " + std::to_string(opts.scale) + " exceeds class count " +
                std::to_string(c));
    std::vector<bool> needed(c, false);
    for (std::size_t t : truth) needed[t] = true;
    for (std::size_t k = 0; k < c; ++k) {
      if (!needed[k]) continue;
      subset_of[k] = sample_class_subset(c, k, opts.scale, subset_seed(opts.seed, k));
      sub_dict[k] = dict.subset(subset_of[k]);
    }
  }
  std::vector<std::size_t> all(c);
  std::iota(all.begin(), all.end(), std::size_t{0});

  std::vector<std::vector<ProbeScores>> rows(metrics.size(),
                                             std::vector<ProbeScores>(probes.size()));
  parallel_for(
      probes.size(),
      [&](std::size_t p) {
        const std::size_t t = truth[p];
        const Dictionary& d = small ? sub_dict[t] : dict;
        auto values = score_query(d, probes[p].feature.values, metrics, cfg, solve);
        for (std::size_t m = 0; m < metrics.size(); ++m) {
          ProbeScores& row = rows[m][p];
          row.probe_id = probes[p].feature.source_id;
          row.true_class = t;
          row.classes = small ? subset_of[t] : all;
          if (values[m].empty()) {
            row.defined = false;
            row.values.assign(row.classes.size(), std::numeric_limits<double>::quiet_NaN());
          } else {
            row.values = std::move(values[m]);
          }
        }
      },
      opts.threads);
  return rows;
}

std::vector<ProbeScores> score_probes(const Dictionary& dict, std::span<const LabeledFeature> probes,
                                      Metric metric, const SolverConfig& cfg,
                                      const ScoringOptions& opts, const SolveFn& solve) {
  const Metric one[] = {metric};
  return std::move(score_probes(dict, probes, one, cfg, opts, solve).front());
}

std::vector<ProbeScores> fuse_probe_scores(
    std::span<const ProbeScores> face, std::span<const ProbeScores> ear,
    std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  std::vector<ProbeScores> out;
  out.reserve(pairs.size());
  for (const auto& [fi, ei] : pairs) {
    require(fi < face.size() && ei < ear.size(), ErrorCode::kInvalidArgument,
            "fuse: pair index out of range");
    const auto& f = face[fi];
    const auto& e = ear[ei];
    require(f.true_class == e.true_class && f.classes == e.classes, ErrorCode::kClassMismatch,
            "fuse: paired rows score different classes");
    ProbeScores row;
    row.probe_id = f.probe_id + "+" + e.probe_id;
    row.true_class = f.true_class;
    row.classes = f.classes;
    row.defined = f.defined && e.defined;
    row.values = fuse_sum(f.values, e.values);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> pair_by_class(
    std::span<const LabeledFeature> face, std::span<const LabeledFeature> ear) {
  std::unordered_map<std::string, std::vector<std::size_t>> ear_of;
  for (std::size_t j = 0; j < ear.size(); ++j) ear_of[ear[j].class_id].push_back(j);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < face.size(); ++i) {
    const auto it = ear_of.find(face[i].class_id);
    if (it == ear_of.end()) continue;
    for (std::size_t j : it->second) out.emplace_back(i, j);
  }
  return out;
}

ScoreSet collect_scores(std::span<const ProbeScores> rows, Polarity polarity) {
  ScoreSet s;
  s.polarity = polarity;
  for (const auto& row : rows) {
    if (!row.defined) {
      ++s.undefined_count;
      continue;
    }
    for (std::size_t i = 0; i < row.classes.size(); ++i) {
      (row.classes[i] == row.true_class ? s.genuine : s.imposter).push_back(row.values[i]);
    }
  }
  return s;
}

ScoreSet generate_verification_scores(const Dictionary& dict,
                                      std::span<const LabeledFeature> probes, Metric metric,
                                      const SolverConfig& cfg) {
  const auto rows = score_probes(dict, probes, metric, cfg);
  return collect_scores(rows, polarity_of(metric));
}

ScoreSet generate_verification_scores(const Dictionary& face_dict, const Dictionary& ear_dict,
                                      std::span<const MultimodalQuery> probes, Metric metric,
                                      const ModalityConfigs& cfg) {
  ScoreSet s;
  s.polarity = polarity_of(metric);
  for (const auto& q : probes) {
    std::vector<FusedScore> fused;
    try {
      fused = score_all_classes_multimodal(face_dict, ear_dict, q, metric, cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUndefinedScore) throw;
      ++s.undefined_count;
      continue;
    }
    for (const auto& f : fused) {
      (f.face_score.class_id == q.claimed ? s.genuine : s.imposter).push_back(f.fused_value);
    }
  }
  return s;
}

std::vector<RocPoint> compute_roc(const ScoreSet& s) {
  require(!s.genuine.empty() && !s.imposter.empty(), ErrorCode::kEmptyInput,
          "compute_roc: genuine and imposter scores must both be nonempty");
  std::vector<double> gen = s.genuine;
  std::vector<double> imp = s.imposter;
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());
  for (double v : gen) require(std::isfinite(v), ErrorCode::kNonFinite, "compute_roc: non-finite score");
  for (double v : imp) require(std::isfinite(v), ErrorCode::kNonFinite, "compute_roc: non-finite score");

  std::vector<double> thresholds;
  thresholds.reserve(gen.size() + imp.size() + 2);
  thresholds.push_back(-std::numeric_limits<double>::infinity());
  std::merge(gen.begin(), gen.end(), imp.begin(), imp.end(), std::back_inserter(thresholds));
  thresholds.push_back(std::numeric_limits<double>::infinity());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const double ng = static_cast<double>(gen.size());
  const double ni = static_cast<double>(imp.size());
  std::vector<RocPoint> roc;
  roc.reserve(thresholds.size());
  for (double t : thresholds) {
    // Number of scores <= t.
    const auto gen_le = static_cast<double>(std::upper_bound(gen.begin(), gen.end(), t) - gen.begin());
    const auto imp_le = static_cast<double>(std::upper_bound(imp.begin(), imp.end(), t) - imp.begin());
    if (s.polarity == Polarity::kDistance) {
      roc.push_back({t, imp_le / ni, (ng - gen_le) / ng});
    } else {
      roc.push_back({t, (ni - imp_le) / ni, gen_le / ng});
    }
  }
  return roc;
}

double compute_eer(std::span<const RocPoint> roc) {
  require(!roc.empty(), ErrorCode::kEmptyInput, "compute_eer: empty ROC");
  for (const auto& p : roc) {
    if (p.far == p.frr) return p.far;
  }
  for (std::size_t i = 0; i + 1 < roc.size(); ++i) {
    const double d0 = roc[i].far - roc[i].frr;
    const double d1 = roc[i + 1].far - roc[i + 1].frr;
    if ((d0 < 0.0) != (d1 < 0.0)) {
      const double t = d0 / (d0 - d1);
      return roc[i].far + t * (roc[i + 1].far - roc[i].far);
    }
  }
  // No crossing: FAR and FRR never meet; report the closest point.
  const auto best = std::min_element(roc.begin(), roc.end(), [](const RocPoint& a, const RocPoint& b) {
    return std::abs(a.far - a.frr) < std::abs(b.far - b.frr);
  });
  return 0.5 * (best->far + best->frr);
}

std::vector<std::string> identify(const Dictionary& dict, const Vector& y, Metric metric,
                                  const SolverConfig& cfg) {
  const auto scores = score_query(dict, y, metric, cfg);
  std::vector<std::string> out;
  out.reserve(scores.size());
  for (std::size_t i : rank_classes(scores, polarity_of(metric))) out.push_back(dict.class_id(i));
  return out;
}

CmcCurve compute_cmc(std::span<const std::vector<std::string>> rankings,
                     std::span<const std::string> true_classes) {
  require(rankings.size() == true_classes.size(), ErrorCode::kDimensionMismatch,
          "compute_cmc: rankings and true classes differ in length");
  require(!rankings.empty(), ErrorCode::kEmptyInput, "compute_cmc: no probes");
  std::size_t max_rank = 0;
  for (const auto& r : rankings) max_rank = std::max(max_rank, r.size());
  std::vector<double> hits(max_rank, 0.0);
  for (std::size_t p = 0; p < rankings.size(); ++p) {
    const auto& r = rankings[p];
    const auto it = std::find(r.begin(), r.end(), true_classes[p]);
    if (it != r.end()) hits[static_cast<std::size_t>(it - r.begin())] += 1.0;
  }
  CmcCurve cmc;
  cmc.rates.resize(max_rank);
  double cum = 0.0;
  for (std::size_t r = 0; r < max_rank; ++r) {
    cum += hits[r];
    cmc.rates[r] = cum / static_cast<double>(rankings.size());
  }
  cmc.rank_one = cmc.rates.empty() ? 0.0 : cmc.rates.front();
  return cmc;
}

CmcCurve compute_cmc(std::span<const ProbeScores> rows, Polarity polarity, std::size_t class_count) {
  require(!rows.empty(), ErrorCode::kEmptyInput, "compute_cmc: no probes");
  std::vector<double> hits(class_count, 0.0);
  for (const auto& row : rows) {
    if (!row.defined) continue;
    const auto pos = std::find(row.classes.begin(), row.classes.end(), row.true_class);
    if (pos == row.classes.end()) continue;
    const auto ti = static_cast<std::size_t>(pos - row.classes.begin());
    const double tv = row.values[ti];
    std::size_t rank = 0;  // zero-based
    for (std::size_t i = 0; i < row.values.size(); ++i) {
      const double v = row.values[i];
      const bool better = polarity == Polarity::kDistance ? v < tv : v > tv;
      if (better || (v == tv && i < ti)) ++rank;
    }
    if (rank < class_count) hits[rank] += 1.0;
  }
  CmcCurve cmc;
  cmc.rates.resize(class_count);
  double cum = 0.0;
  for (std::size_t r = 0; r < class_count; ++r) {
    cum += hits[r];
    cmc.rates[r] = cum / static_cast<double>(rows.size());
  }
  cmc.rank_one = cmc.rates.empty() ? 0.0 : cmc.rates.front();
  return cmc;
}

Histogram histogram_scores(const ScoreSet& s, std::size_t bins,
                           std::optional<std::pair<double, double>> range) {
  require(bins >= 1, ErrorCode::kInvalidArgument, "histogram: bins must be >= 1");
  double lo = 0.0;
  double hi = 1.0;
  if (range) {
    std::tie(lo, hi) = *range;
  } else {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (double v : s.genuine) lo = std::min(lo, v), hi = std::max(hi, v);
    for (double v : s.imposter) lo = std::min(lo, v), hi = std::max(hi, v);
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (lo == hi) lo -= 0.5, hi += 0.5;
  }
  require(lo < hi, ErrorCode::kInvalidArgument, "histogram: empty range");

  Histogram h;
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    h.lo.push_back(lo + width * static_cast<double>(b));
    h.hi.push_back(b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1));
  }
  auto fill = [&](const std::vector<double>& values) {
    std::vector<double> mass(bins, 0.0);
    std::size_t counted = 0;
    for (double v : values) {
      if (v < lo || v > hi) continue;
      auto b = static_cast<std::size_t>((v - lo) / width);
      mass[std::min(b, bins - 1)] += 1.0;
      ++counted;
    }
    if (counted > 0) {
      for (double& m : mass) m /= static_cast<double>(counted);
    }
    return mass;
  };
  h.genuine = fill(s.genuine);
  h.imposter = fill(s.imposter);
  return h;
}

RuntimeStats benchmark_verification(const std::function<void(std::size_t)>& run_probe,
                                    std::size_t probe_count, int repetitions) {
  require(probe_count > 0, ErrorCode::kEmptyInput, "benchmark: empty probe set");
  require(repetitions >= 1, ErrorCode::kInvalidArgument, "benchmark: repetitions must be >= 1");
  std::vector<double> seconds;
  seconds.reserve(probe_count * static_cast<std::size_t>(repetitions));
  for (int r = 0; r < repetitions; ++r) {
    for (std::size_t i = 0; i < probe_count; ++i) {
      const auto start = std::chrono::steady_clock::now();
      run_probe(i);
      const auto stop = std::chrono::steady_clock::now();
      seconds.push_back(std::chrono::duration<double>(stop - start).count());
    }
  }
  RuntimeStats st;
  st.count = seconds.size();
  st.mean = std::accumulate(seconds.begin(), seconds.end(), 0.0) / static_cast<double>(st.count);
  double var = 0.0;
  for (double v : seconds) var += (v - st.mean) * (v - st.mean);
  st.stddev = std::sqrt(var / static_cast<double>(st.count));
  std::sort(seconds.begin(), seconds.end());
  const std::size_t mid = st.count / 2;
  st.median = st.count % 2 == 1 ? seconds[mid] : 0.5 * (seconds[mid - 1] + seconds[mid]);
  return st;
}

namespace {

// Scores one probe the way score_probes does, including the dictionary draw.
void score_one(const Dictionary& dict, const LabeledFeature& probe, std::span<const Metric> metrics,
               const SolverConfig& cfg, const ScoringOptions& opts,
               std::vector<std::vector<double>>& out) {
  const std::size_t c = dict.class_count();
  const std::size_t t = dict.class_index(probe.class_id);
  if (opts.scale != 0 && opts.scale != c) {
    const Dictionary sub =
        dict.subset(sample_class_subset(c, t, opts.scale, subset_seed(opts.seed, t)));
    out = score_query(sub, probe.feature.values, metrics, cfg);
  } else {
    out = score_query(dict, probe.feature.values, metrics, cfg);
  }
}

std::size_t capped(std::size_t n, std::size_t limit) { return limit == 0 ? n : std::min(n, limit); }

}  // namespace

RuntimeStats benchmark_scoring(const Dictionary& dict, std::span<const LabeledFeature> probes,
                               std::span<const Metric> metrics, const SolverConfig& cfg,
                               const ScoringOptions& opts, std::size_t limit, int repetitions) {
  std::vector<std::vector<double>> scores;
  return benchmark_verification(
      [&](std::size_t i) { score_one(dict, probes[i], metrics, cfg, opts, scores); },
      capped(probes.size(), limit), repetitions);
}

RuntimeStats benchmark_scoring(const Dictionary& face_dict, std::span<const LabeledFeature> face,
                               const Dictionary& ear_dict, std::span<const LabeledFeature> ear,
                               std::span<const std::pair<std::size_t, std::size_t>> pairs,
                               std::span<const Metric> metrics, const SolverConfig& cfg,
                               const ScoringOptions& opts, std::size_t limit, int repetitions) {
  std::vector<std::vector<double>> fs;
  std::vector<std::vector<double>> es;
  std::vector<double> fused;
  return benchmark_verification(
      [&](std::size_t i) {
        score_one(face_dict, face[pairs[i].first], metrics, cfg, opts, fs);
        score_one(ear_dict, ear[pairs[i].second], metrics, cfg, opts, es);
        for (std::size_t m = 0; m < metrics.size(); ++m) {
          if (!fs[m].empty() && !es[m].empty()) fused = fuse_sum(fs[m], es[m]);
        }
      },
      capped(pairs.size(), limit), repetitions);
}

EvalReport evaluate(std::span<const ProbeScores> rows, Polarity polarity, std::string method,
                    std::size_t class_count) {
  const ScoreSet s = collect_scores(rows, polarity);
  EvalReport r;
  r.method = std::move(method);
  r.polarity = polarity;
  r.roc = compute_roc(s);
  r.eer = compute_eer(r.roc);
  r.genuine_count = s.genuine.size();
  r.imposter_count = s.imposter.size();
  r.undefined_score_count = s.undefined_count;
  if (class_count > 0) {
    r.cmc = compute_cmc(rows, polarity, class_count);
    r.rank_one = r.cmc.rank_one;
  }
  return r;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size() && a.size() >= 2, ErrorCode::kInvalidArgument,
          "spearman: need two equal-length samples of size >= 2");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace sparsever
