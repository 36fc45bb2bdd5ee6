#ifndef SPARSEVER_SYNTH_HPP_
#define SPARSEVER_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sparsever/eval.hpp"

namespace sparsever {

/// Knobs of the "bouquet" generator. All classes live in a spherical cap of
/// angular radius `between_spread` (radians) around one common direction;
/// each sample is its class center plus isotropic Gaussian noise with
/// expected norm about `within_spread`, projected back onto the sphere.
struct SynthParams {
  std::size_t classes = 50;
  std::size_t train = 7;
  std::size_t probes = 8;
  Eigen::Index dim = 200;
  double within_spread = 1.2;
  double between_spread = 0.6;
  std::uint64_t seed = 42;
  std::string modality = "face";
  /// Prefix of generated class ids ("F" gives F000, F001, ...).
  std::string class_prefix = "F";

  void validate() const;
};

struct SynthDataset {
  std::vector<ClassBlock> gallery;
  std::vector<LabeledFeature> probes;
};

SynthDataset gen_dataset(const SynthParams& params);

/// Virtual multimodal database built by pairing unimodal subjects.
struct PairedDataset {
  /// (face block, ear block) per virtual subject, both carrying the virtual id.
  std::vector<std::pair<ClassBlock, ClassBlock>> subjects;
  Dictionary face_gallery;
  Dictionary ear_gallery;
  std::vector<LabeledFeature> face_probes;
  std::vector<LabeledFeature> ear_probes;
  /// Every (face probe, ear probe) index pair of the same subject.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<MultimodalQuery> probes;
};

/// Random bijection between face and ear subjects (truncated to the smaller
/// set), index-wise gallery pairing, and the per-subject cross product of
/// face probes and ear probes.
PairedDataset pair_multimodal(const SynthDataset& face, const SynthDataset& ear, std::uint64_t seed);

/// Default face/ear parameter pair: independent seeds derived from `seed`,
/// face probes p and ear probes `ear_probes`.
std::pair<SynthParams, SynthParams> multimodal_params(const SynthParams& face,
                                                     std::size_t ear_probes);

}  // namespace sparsever

#endif  // SPARSEVER_SYNTH_HPP_
