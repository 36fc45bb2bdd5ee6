#include "sparsever/fusion.hpp"

#include <algorithm>

namespace sparsever {

void check_same_classes(const Dictionary& face_dict, const Dictionary& ear_dict) {
  auto face_ids = face_dict.class_ids();
  auto ear_ids = ear_dict.class_ids();
  std::sort(face_ids.begin(), face_ids.end());
  std::sort(ear_ids.begin(), ear_ids.end());
  require(face_ids == ear_ids, ErrorCode::kClassMismatch,
          "fusion: face and ear dictionaries enroll different classes");
}

namespace {

std::vector<double> score_modality(const char* tag, const Dictionary& dict,
                                   const FeatureVector& feature, Metric metric,
                                   const SolverConfig& cfg, const SolveFn& solve) {
  try {
    return score_query(dict, feature.values, metric, cfg, solve);
  } catch (const Error& e) {
    throw Error(e.code(), std::string(tag) + ": " + e.what());
  }
}

}  // namespace

std::vector<double> fuse_sum(const std::vector<double>& face, const std::vector<double>& ear) {
  require(face.size() == ear.size(), ErrorCode::kDimensionMismatch,
          "fuse_sum: score rows differ in length");
  std::vector<double> out(face.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = face[i] + ear[i];
  return out;
}

std::vector<FusedScore> score_all_classes_multimodal(const Dictionary& face_dict,
                                                     const Dictionary& ear_dict,
                                                     const MultimodalQuery& q, Metric metric,
                                                     const ModalityConfigs& cfg,
                                                     const SolveFn& solve) {
  check_same_classes(face_dict, ear_dict);
  require(face_dict.contains(q.claimed), ErrorCode::kUnknownClass,
          "fusion: claimed class '" + q.claimed + "' is not enrolled");
  const auto face = score_modality("face", face_dict, q.face_feature, metric, cfg.face, solve);
  const auto ear = score_modality("ear", ear_dict, q.ear_feature, metric, cfg.ear, solve);

  std::vector<FusedScore> out;
  out.reserve(face.size());
  for (std::size_t i = 0; i < face.size(); ++i) {
    const std::string& id = face_dict.class_id(i);
    const double e = ear[ear_dict.class_index(id)];
    out.push_back(FusedScore{{id, metric, face[i]}, {id, metric, e}, face[i] + e, metric});
  }
  return out;
}

std::pair<Decision, FusedScore> verify_multimodal(const Dictionary& face_dict,
                                                  const Dictionary& ear_dict,
                                                  const MultimodalQuery& q, Metric metric,
                                                  double threshold, const ModalityConfigs& cfg,
                                                  const SolveFn& solve) {
  auto all = score_all_classes_multimodal(face_dict, ear_dict, q, metric, cfg, solve);
  FusedScore fused = std::move(all[face_dict.class_index(q.claimed)]);
  const Decision decision = decide(MatchScore{q.claimed, metric, fused.fused_value}, threshold);
  return {decision, std::move(fused)};
}

}  // namespace sparsever
