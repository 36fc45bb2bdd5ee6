#ifndef SPARSEVER_SCORING_HPP_
#define SPARSEVER_SCORING_HPP_

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparsever/dictionary.hpp"

namespace sparsever {

/// SCE: residual of the query rebuilt from one class's coefficients.
/// SCR: share of the code's L1 mass carried by one class.
/// COSINE: best cosine similarity against a class's training samples.
enum class Metric { kSce, kScr, kCosine };

enum class Polarity {
  kDistance,    // lower is better; accept iff value <= threshold
  kSimilarity,  // higher is better; accept iff value > threshold
};

Polarity polarity_of(Metric metric);
std::string_view to_string(Metric metric);
std::string_view to_string(Polarity polarity);
/// Accepts "sce", "scr", "cosine" (case-insensitive).
Metric parse_metric(std::string_view text);

struct MatchScore {
  std::string class_id;
  Metric metric = Metric::kSce;
  double value = 0.0;

  Polarity polarity() const { return polarity_of(metric); }
};

enum class Outcome { kAccept, kReject };

struct Decision {
  Outcome outcome = Outcome::kReject;
  double threshold = 0.0;
  MatchScore score;

  bool accepted() const { return outcome == Outcome::kAccept; }
};

MatchScore sce(const Dictionary& dict, const SparseCode& code, const Vector& y,
               const std::string& class_id);
MatchScore scr(const SparseCode& code, const Dictionary& dict, const std::string& class_id);
MatchScore cosine_best_match(const Vector& y, const ClassBlock& block);

/// Accepts at equality.
Decision decide_sce(const MatchScore& score, double threshold);
/// Rejects at equality.
Decision decide_scr(const MatchScore& score, double threshold);
/// Applies the rule matching the score's polarity; cosine follows the SCR rule.
Decision decide(const MatchScore& score, double threshold);
bool accepts(Polarity polarity, double value, double threshold);

/// Per-class scores in dictionary class order, from a single code.
std::vector<double> sce_all(const Dictionary& dict, const SparseCode& code, const Vector& y);
/// Throws kUndefinedScore when the code is identically zero.
std::vector<double> scr_all(const SparseCode& code, const Dictionary& dict);
std::vector<double> cosine_all(const Dictionary& dict, const Vector& y);

/// Sparse coder used by the pipelines; tests substitute instrumented ones.
using SolveFn = std::function<SparseCode(const Matrix&, const Vector&, const SolverConfig&)>;

SparseCode default_solve(const Matrix& A, const Vector& y, const SolverConfig& cfg);

/// Normalizes the query, codes it against the dictionary (skipped for
/// cosine) and returns the per-class scores in dictionary class order.
std::vector<double> score_query(const Dictionary& dict, const Vector& query, Metric metric,
                                const SolverConfig& cfg, const SolveFn& solve = default_solve);

/// Scores for several metrics from a single coding. An entry is empty when
/// that metric is undefined for the code (SCR of an all-zero code).
std::vector<std::vector<double>> score_query(const Dictionary& dict, const Vector& query,
                                             std::span<const Metric> metrics,
                                             const SolverConfig& cfg,
                                             const SolveFn& solve = default_solve);

/// Class indices ordered best-first for the polarity; ties keep class order.
std::vector<std::size_t> rank_classes(const std::vector<double>& scores, Polarity polarity);

}  // namespace sparsever

#endif  // SPARSEVER_SCORING_HPP_
