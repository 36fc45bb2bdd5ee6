#include "sparsever/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <unordered_map>

namespace sparsever {

void SynthParams::validate() const {
  require(classes >= 1, ErrorCode::kInvalidArgument, "synth: classes must be >= 1");
  require(train >= 1, ErrorCode::kInvalidArgument, "synth: train must be >= 1");
  require(probes >= 1, ErrorCode::kInvalidArgument, "synth: probes must be >= 1");
  require(dim >= 1, ErrorCode::kInvalidArgument, "synth: dim must be >= 1");
  require(std::isfinite(within_spread) && within_spread >= 0.0, ErrorCode::kInvalidArgument,
          "synth: within_spread must be >= 0");
  require(std::isfinite(between_spread) && between_spread >= 0.0, ErrorCode::kInvalidArgument,
          "synth: between_spread must be >= 0");
}

namespace {

std::string padded_id(const std::string& prefix, std::size_t index, std::size_t count) {
  const int width = std::max(3, static_cast<int>(std::to_string(count > 0 ? count - 1 : 0).size()));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*zu", width, index);
  return prefix + buf;
}

Vector gaussian(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = n01(rng);
  return v;
}

Vector unit_or(const Vector& v, const Vector& fallback) {
  const double n = v.norm();
  return n > 0.0 ? Vector(v / n) : fallback;
}

}  // namespace

SynthDataset gen_dataset(const SynthParams& params) {
  params.validate();
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Eigen::Index d = params.dim;

  const Vector mean_dir = unit_or(gaussian(rng, d), Vector::Unit(d, 0));
  const double noise_scale = params.within_spread / std::sqrt(static_cast<double>(d));

  SynthDataset ds;
  ds.gallery.reserve(params.classes);
  for (std::size_t c = 0; c < params.classes; ++c) {
    // Uniform over the cap: polar angle with density ~ sin^(d-2), small-angle form.
    Vector tangent = gaussian(rng, d);
    tangent -= tangent.dot(mean_dir) * mean_dir;
    const double tn = tangent.norm();
    Vector center = mean_dir;
    if (d > 1 && tn > 0.0) {
      const double angle =
          params.between_spread * std::pow(u01(rng), 1.0 / static_cast<double>(std::max<Eigen::Index>(1, d - 1)));
      center = std::cos(angle) * mean_dir + std::sin(angle) * (tangent / tn);
    }

    const std::string class_id = padded_id(params.class_prefix, c, params.classes);
    auto sample = [&](const std::string& tag, std::size_t j) {
      const Vector v = center + noise_scale * gaussian(rng, d);
      return FeatureVector{unit_or(v, center), params.modality,
                           class_id + "_" + tag + std::to_string(j)};
    };
    ClassBlock block{class_id, {}};
    block.samples.reserve(params.train);
    for (std::size_t j = 0; j < params.train; ++j) block.samples.push_back(sample("g", j));
    ds.gallery.push_back(std::move(block));
    for (std::size_t j = 0; j < params.probes; ++j) {
      ds.probes.push_back(LabeledFeature{class_id, sample("p", j)});
    }
  }
  return ds;
}

PairedDataset pair_multimodal(const SynthDataset& face, const SynthDataset& ear, std::uint64_t seed) {
  require(!face.gallery.empty() && !ear.gallery.empty(), ErrorCode::kEmptyInput,
          "pair_multimodal: empty dataset");
  const std::size_t n = std::min(face.gallery.size(), ear.gallery.size());

  std::vector<std::size_t> ear_order(ear.gallery.size());
  std::iota(ear_order.begin(), ear_order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(ear_order.begin(), ear_order.end(), rng);

  auto probes_of = [](const SynthDataset& ds) {
    std::unordered_map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < ds.probes.size(); ++i) by_class[ds.probes[i].class_id].push_back(i);
    return by_class;
  };
  const auto face_probe_idx = probes_of(face);
  const auto ear_probe_idx = probes_of(ear);

  PairedDataset out;
  std::vector<ClassBlock> face_blocks;
  std::vector<ClassBlock> ear_blocks;
  for (std::size_t s = 0; s < n; ++s) {
    const ClassBlock& fb = face.gallery[s];
    const ClassBlock& eb = ear.gallery[ear_order[s]];
    const std::string vid = padded_id("S", s, n);
    const std::size_t l = std::min(fb.samples.size(), eb.samples.size());
    ClassBlock vf{vid, {fb.samples.begin(), fb.samples.begin() + static_cast<std::ptrdiff_t>(l)}};
    ClassBlock ve{vid, {eb.samples.begin(), eb.samples.begin() + static_cast<std::ptrdiff_t>(l)}};
    face_blocks.push_back(vf);
    ear_blocks.push_back(ve);
    out.subjects.emplace_back(std::move(vf), std::move(ve));

    const auto fit = face_probe_idx.find(fb.class_id);
    const auto eit = ear_probe_idx.find(eb.class_id);
    if (fit == face_probe_idx.end() || eit == ear_probe_idx.end()) continue;
    const std::size_t face_base = out.face_probes.size();
    const std::size_t ear_base = out.ear_probes.size();
    for (std::size_t i : fit->second) out.face_probes.push_back({vid, face.probes[i].feature});
    for (std::size_t i : eit->second) out.ear_probes.push_back({vid, ear.probes[i].feature});
    for (std::size_t a = 0; a < fit->second.size(); ++a) {
      for (std::size_t b = 0; b < eit->second.size(); ++b) {
        out.pairs.emplace_back(face_base + a, ear_base + b);
        const auto& ff = out.face_probes[face_base + a].feature;
        const auto& ef = out.ear_probes[ear_base + b].feature;
        out.probes.push_back(MultimodalQuery{ff, ef, vid, ff.source_id + "+" + ef.source_id});
      }
    }
  }
  out.face_gallery = Dictionary::build(std::move(face_blocks));
  out.ear_gallery = Dictionary::build(std::move(ear_blocks));
  return out;
}

std::pair<SynthParams, SynthParams> multimodal_params(const SynthParams& face,
                                                     std::size_t ear_probes) {
  SynthParams f = face;
  f.modality = "face";
  f.class_prefix = "F";
  SynthParams e = face;
  e.modality = "ear";
  e.class_prefix = "E";
  e.probes = ear_probes;
  // Independent streams per modality.
  std::seed_seq seq{static_cast<std::uint32_t>(face.seed), static_cast<std::uint32_t>(face.seed >> 32),
                    0xea5u};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  e.seed = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return {f, e};
}

}  // namespace sparsever
