#ifndef SPARSEVER_EVAL_HPP_
#define SPARSEVER_EVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sparsever/fusion.hpp"

namespace sparsever {

/// A probe sample with its ground-truth class.
struct LabeledFeature {
  std::string class_id;
  FeatureVector feature;
};

/// Pooled genuine and imposter scores of one method.
struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> imposter;
  Polarity polarity = Polarity::kDistance;
  std::string method;
  std::size_t scale = 0;
  std::uint64_t seed = 0;
  /// Probes dropped because their score was undefined (all-zero code).
  std::size_t undefined_count = 0;
};

struct RocPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

struct RuntimeStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;
};

struct CmcCurve {
  std::vector<double> rates;  // rates[r-1] = fraction identified within rank r
  double rank_one = 0.0;
};

struct EvalReport {
  std::string method;
  Polarity polarity = Polarity::kDistance;
  double eer = 0.0;
  std::vector<RocPoint> roc;
  CmcCurve cmc;
  double rank_one = 0.0;
  std::size_t genuine_count = 0;
  std::size_t imposter_count = 0;
  std::size_t undefined_score_count = 0;
  std::optional<RuntimeStats> runtime;
};

/// Scores of one probe against the classes of the dictionary it was coded
/// with. Class indices refer to the full enrolled class list, so rows coded
/// against different sub-dictionaries remain comparable.
struct ProbeScores {
  std::string probe_id;
  std::size_t true_class = 0;
  std::vector<std::size_t> classes;
  std::vector<double> values;
  bool defined = true;
};

struct ScoringOptions {
  /// Small random dictionary size; 0 codes against every enrolled class.
  std::size_t scale = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// Independent 64-bit seed for stream `stream` of a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Deterministic per-(trial, claimed class) seed for dictionary sampling.
std::uint64_t subset_seed(std::uint64_t trial_seed, std::size_t claimed_class);

/// One coding per probe, scoring every class of the (possibly sampled)
/// dictionary. With a scale k the dictionary holds the probe's true class
/// plus k-1 others sampled per class, so verification claims stay valid.
std::vector<ProbeScores> score_probes(const Dictionary& dict, std::span<const LabeledFeature> probes,
                                      Metric metric, const SolverConfig& cfg,
                                      const ScoringOptions& opts = {},
                                      const SolveFn& solve = default_solve);

/// Several metrics from one coding per probe; result[m][p] pairs metrics[m]
/// with probes[p].
std::vector<std::vector<ProbeScores>> score_probes(const Dictionary& dict,
                                                   std::span<const LabeledFeature> probes,
                                                   std::span<const Metric> metrics,
                                                   const SolverConfig& cfg,
                                                   const ScoringOptions& opts = {},
                                                   const SolveFn& solve = default_solve);

/// Sum-rule fusion of unimodal rows; pairs index (face row, ear row).
std::vector<ProbeScores> fuse_probe_scores(
    std::span<const ProbeScores> face, std::span<const ProbeScores> ear,
    std::span<const std::pair<std::size_t, std::size_t>> pairs);

/// Every (face, ear) index pair sharing a class id, in face order then ear
/// order: the per-subject cross product of a virtual multimodal database.
std::vector<std::pair<std::size_t, std::size_t>> pair_by_class(
    std::span<const LabeledFeature> face, std::span<const LabeledFeature> ear);

/// The true-class score of each probe is genuine, every other class score an
/// imposter. Undefined rows are counted and skipped.
ScoreSet collect_scores(std::span<const ProbeScores> rows, Polarity polarity);

ScoreSet generate_verification_scores(const Dictionary& dict,
                                      std::span<const LabeledFeature> probes, Metric metric,
                                      const SolverConfig& cfg);

/// Per-query variant over paired probes; the claimed field of each query
/// names its true class.
ScoreSet generate_verification_scores(const Dictionary& face_dict, const Dictionary& ear_dict,
                                      std::span<const MultimodalQuery> probes, Metric metric,
                                      const ModalityConfigs& cfg);

/// FAR/FRR at every distinct score plus -inf and +inf, ascending threshold.
std::vector<RocPoint> compute_roc(const ScoreSet& s);

/// FAR = FRR crossing, linearly interpolated between the bracketing points.
double compute_eer(std::span<const RocPoint> roc);

/// Enrolled class ids ordered best-first for the metric.
std::vector<std::string> identify(const Dictionary& dict, const Vector& y, Metric metric,
                                  const SolverConfig& cfg);

CmcCurve compute_cmc(std::span<const std::vector<std::string>> rankings,
                     std::span<const std::string> true_classes);
/// CMC over `class_count` ranks computed from score rows.
CmcCurve compute_cmc(std::span<const ProbeScores> rows, Polarity polarity, std::size_t class_count);

struct Histogram {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> genuine;   // mass per bin, sums to 1
  std::vector<double> imposter;  // mass per bin, sums to 1
};

/// Binned score masses; the range defaults to the pooled min/max.
Histogram histogram_scores(const ScoreSet& s, std::size_t bins,
                           std::optional<std::pair<double, double>> range = std::nullopt);

/// Times run_probe(i) for every probe, sequentially, `repetitions` times.
RuntimeStats benchmark_verification(const std::function<void(std::size_t)>& run_probe,
                                    std::size_t probe_count, int repetitions = 1);

/// Sequential per-query cost of the scoring pipeline over the first `limit`
/// probes (0 = all): sampling the claimed class's dictionary when
/// opts.scale asks for one, coding and scoring every metric.
RuntimeStats benchmark_scoring(const Dictionary& dict, std::span<const LabeledFeature> probes,
                               std::span<const Metric> metrics, const SolverConfig& cfg,
                               const ScoringOptions& opts, std::size_t limit = 0,
                               int repetitions = 1);

/// Multimodal variant: each query codes one face and one ear probe of a pair
/// and fuses the scores.
RuntimeStats benchmark_scoring(const Dictionary& face_dict, std::span<const LabeledFeature> face,
                               const Dictionary& ear_dict, std::span<const LabeledFeature> ear,
                               std::span<const std::pair<std::size_t, std::size_t>> pairs,
                               std::span<const Metric> metrics, const SolverConfig& cfg,
                               const ScoringOptions& opts, std::size_t limit = 0,
                               int repetitions = 1);

/// ROC, EER and CMC from score rows. `class_count` 0 skips the CMC.
EvalReport evaluate(std::span<const ProbeScores> rows, Polarity polarity, std::string method,
                    std::size_t class_count);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace sparsever

#endif  // SPARSEVER_EVAL_HPP_
