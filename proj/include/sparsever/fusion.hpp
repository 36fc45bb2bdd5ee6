#ifndef SPARSEVER_FUSION_HPP_
#define SPARSEVER_FUSION_HPP_

#include <string>
#include <utility>
#include <vector>

#include "sparsever/scoring.hpp"

namespace sparsever {

struct MultimodalQuery {
  FeatureVector face_feature;
  FeatureVector ear_feature;
  std::string claimed;
  std::string probe_id;
};

/// Sum-rule combination of one face and one ear score for the same class.
struct FusedScore {
  MatchScore face_score;
  MatchScore ear_score;
  double fused_value = 0.0;
  Metric metric = Metric::kSce;
};

/// Solver settings per modality; one config for both is the common case.
struct ModalityConfigs {
  SolverConfig face;
  SolverConfig ear;

  ModalityConfigs() = default;
  ModalityConfigs(const SolverConfig& both) : face(both), ear(both) {}  // NOLINT
  ModalityConfigs(const SolverConfig& f, const SolverConfig& e) : face(f), ear(e) {}
};

/// Throws kClassMismatch unless both dictionaries enroll the same class ids.
void check_same_classes(const Dictionary& face_dict, const Dictionary& ear_dict);

/// Codes each modality once and fuses the scores of every class. Output
/// follows the face dictionary's class order.
std::vector<FusedScore> score_all_classes_multimodal(const Dictionary& face_dict,
                                                     const Dictionary& ear_dict,
                                                     const MultimodalQuery& q, Metric metric,
                                                     const ModalityConfigs& cfg,
                                                     const SolveFn& solve = default_solve);

/// Two independent codings, the claimed class's scores summed without
/// normalization, and the metric's threshold rule applied to the sum.
std::pair<Decision, FusedScore> verify_multimodal(const Dictionary& face_dict,
                                                  const Dictionary& ear_dict,
                                                  const MultimodalQuery& q, Metric metric,
                                                  double threshold, const ModalityConfigs& cfg,
                                                  const SolveFn& solve = default_solve);

/// Element-wise sum of two per-class score rows.
std::vector<double> fuse_sum(const std::vector<double>& face, const std::vector<double>& ear);

}  // namespace sparsever

#endif  // SPARSEVER_FUSION_HPP_
