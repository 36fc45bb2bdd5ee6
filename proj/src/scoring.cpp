#include "sparsever/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace sparsever {

Polarity polarity_of(Metric metric) {
  return metric == Metric::kSce ? Polarity::kDistance : Polarity::kSimilarity;
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kSce: return "sce";
    case Metric::kScr: return "scr";
    case Metric::kCosine: return "cosine";
  }
  return "?";
}

std::string_view to_string(Polarity polarity) {
  return polarity == Polarity::kDistance ? "distance" : "similarity";
}

Metric parse_metric(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "sce") return Metric::kSce;
  if (lower == "scr") return Metric::kScr;
  if (lower == "cosine") return Metric::kCosine;
  fail(ErrorCode::kInvalidArgument, "unknown metric '" + std::string(text) + "'");
}

namespace {

void check_code(const Dictionary& dict, const SparseCode& code) {
  require(code.coefficients.size() == dict.column_count(), ErrorCode::kDimensionMismatch,
          "score: code length does not match dictionary columns");
}

double sce_value(const Dictionary& dict, const SparseCode& code, const Vector& y,
                 std::size_t ci) {
  const auto off = dict.block_offset(ci);
  const auto len = dict.block_size(ci);
  return (y - dict.block_matrix(ci) * code.coefficients.segment(off, len)).norm();
}

}  // namespace

MatchScore sce(const Dictionary& dict, const SparseCode& code, const Vector& y,
               const std::string& class_id) {
  check_code(dict, code);
  require(y.size() == dict.dim(), ErrorCode::kDimensionMismatch,
          "sce: query dimension does not match dictionary");
  return {class_id, Metric::kSce, sce_value(dict, code, y, dict.class_index(class_id))};
}

std::vector<double> sce_all(const Dictionary& dict, const SparseCode& code, const Vector& y) {
  check_code(dict, code);
  require(y.size() == dict.dim(), ErrorCode::kDimensionMismatch,
          "sce: query dimension does not match dictionary");
  std::vector<double> out(dict.class_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sce_value(dict, code, y, i);
  return out;
}

std::vector<double> scr_all(const SparseCode& code, const Dictionary& dict) {
  check_code(dict, code);
  const double total = code.coefficients.lpNorm<1>();
  require(total > 0.0, ErrorCode::kUndefinedScore, "scr: all-zero code, ratio undefined");
  std::vector<double> out(dict.class_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = code.coefficients.segment(dict.block_offset(i), dict.block_size(i)).lpNorm<1>() / total;
  }
  return out;
}

MatchScore scr(const SparseCode& code, const Dictionary& dict, const std::string& class_id) {
  check_code(dict, code);
  const std::size_t ci = dict.class_index(class_id);
  const double total = code.coefficients.lpNorm<1>();
  require(total > 0.0, ErrorCode::kUndefinedScore, "scr: all-zero code, ratio undefined");
  const double mass =
      code.coefficients.segment(dict.block_offset(ci), dict.block_size(ci)).lpNorm<1>();
  return {class_id, Metric::kScr, mass / total};
}

MatchScore cosine_best_match(const Vector& y, const ClassBlock& block) {
  require(!block.samples.empty(), ErrorCode::kInvalidArgument, "cosine: empty class block");
  const double ny = y.norm();
  require(ny > 0.0, ErrorCode::kZeroNorm, "cosine: zero-norm query");
  double best = -1.0;
  for (const auto& s : block.samples) {
    require(s.dim() == y.size(), ErrorCode::kDimensionMismatch, "cosine: dimension mismatch");
    const double ns = s.values.norm();
    require(ns > 0.0, ErrorCode::kZeroNorm, "cosine: zero-norm sample '" + s.source_id + "'");
    best = std::max(best, std::clamp(y.dot(s.values) / (ny * ns), -1.0, 1.0));
  }
  return {block.class_id, Metric::kCosine, best};
}

std::vector<double> cosine_all(const Dictionary& dict, const Vector& y) {
  require(y.size() == dict.dim(), ErrorCode::kDimensionMismatch,
          "cosine: query dimension does not match dictionary");
  const Vector sims = dict.matrix().transpose() * normalized(y);
  std::vector<double> out(dict.class_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(sims.segment(dict.block_offset(i), dict.block_size(i)).maxCoeff(), -1.0, 1.0);
  }
  return out;
}

bool accepts(Polarity polarity, double value, double threshold) {
  return polarity == Polarity::kDistance ? value <= threshold : value > threshold;
}

Decision decide_sce(const MatchScore& score, double threshold) {
  require(score.metric == Metric::kSce, ErrorCode::kMetricMismatch,
          "decide_sce: score is not an SCE score");
  return {accepts(Polarity::kDistance, score.value, threshold) ? Outcome::kAccept : Outcome::kReject,
          threshold, score};
}

Decision decide_scr(const MatchScore& score, double threshold) {
  require(score.metric == Metric::kScr, ErrorCode::kMetricMismatch,
          "decide_scr: score is not an SCR score");
  return {accepts(Polarity::kSimilarity, score.value, threshold) ? Outcome::kAccept : Outcome::kReject,
          threshold, score};
}

Decision decide(const MatchScore& score, double threshold) {
  return {accepts(score.polarity(), score.value, threshold) ? Outcome::kAccept : Outcome::kReject,
          threshold, score};
}

SparseCode default_solve(const Matrix& A, const Vector& y, const SolverConfig& cfg) {
  return solve_l1(A, y, cfg);
}

std::vector<double> score_query(const Dictionary& dict, const Vector& query, Metric metric,
                                const SolverConfig& cfg, const SolveFn& solve) {
  require(query.size() == dict.dim(), ErrorCode::kDimensionMismatch,
          "score: query has dimension " + std::to_string(query.size()) + ", dictionary " +
              std::to_string(dict.dim()));
  if (metric == Metric::kCosine) return cosine_all(dict, query);
  const Vector y = normalized(query);
  const SparseCode code = solve(dict.matrix(), y, cfg);
  return metric == Metric::kSce ? sce_all(dict, code, y) : scr_all(code, dict);
}

std::vector<std::vector<double>> score_query(const Dictionary& dict, const Vector& query,
                                             std::span<const Metric> metrics,
                                             const SolverConfig& cfg, const SolveFn& solve) {
  require(query.size() == dict.dim(), ErrorCode::kDimensionMismatch,
          "score: query has dimension " + std::to_string(query.size()) + ", dictionary " +
              std::to_string(dict.dim()));
  const bool needs_code = std::any_of(metrics.begin(), metrics.end(),
                                      [](Metric m) { return m != Metric::kCosine; });
  const Vector y = normalized(query);
  SparseCode code;
  if (needs_code) code = solve(dict.matrix(), y, cfg);
  std::vector<std::vector<double>> out;
  out.reserve(metrics.size());
  for (Metric m : metrics) {
    switch (m) {
      case Metric::kCosine:
        out.push_back(cosine_all(dict, query));
        break;
      case Metric::kSce:
        out.push_back(sce_all(dict, code, y));
        break;
      case Metric::kScr:
        try {
          out.push_back(scr_all(code, dict));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kUndefinedScore) throw;
          out.emplace_back();
        }
        break;
    }
  }
  return out;
}

std::vector<std::size_t> rank_classes(const std::vector<double>& scores, Polarity polarity) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (polarity == Polarity::kDistance) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  }
  return order;
}

}  // namespace sparsever
