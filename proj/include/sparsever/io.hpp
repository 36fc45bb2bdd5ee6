#ifndef SPARSEVER_IO_HPP_
#define SPARSEVER_IO_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsever/eval.hpp"

namespace sparsever {

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Feature CSV: `subject_id,sample_id,modality,v0,...,v{d-1}`, one sample per row.
void write_feature_csv(const std::filesystem::path& path, std::span<const LabeledFeature> rows);
std::vector<LabeledFeature> read_feature_csv(const std::filesystem::path& path);

/// Groups samples into class blocks, classes in order of first appearance.
std::vector<ClassBlock> group_into_blocks(std::span<const LabeledFeature> rows);

/// Manifest: modality, dimension and per-class sample counts.
nlohmann::ordered_json feature_manifest(std::span<const LabeledFeature> rows);
nlohmann::ordered_json dictionary_manifest(const Dictionary& dict);

/// Dictionary serialization: normalized columns as a feature CSV plus manifest.
void write_dictionary(const std::filesystem::path& csv_path, const std::filesystem::path& manifest_path,
                      const Dictionary& dict);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);
nlohmann::ordered_json read_json(const std::filesystem::path& path);

/// Score dump: `probe_id,claimed_class,true_class,metric,value,is_genuine,modality`.
void write_score_dump(const std::filesystem::path& path, std::span<const ProbeScores> rows,
                      std::span<const std::string> class_ids, Metric metric,
                      const std::string& modality, bool append = false);

void write_roc_csv(const std::filesystem::path& path, std::span<const RocPoint> roc);
void write_cmc_csv(const std::filesystem::path& path, const CmcCurve& cmc);
void write_histogram_csv(const std::filesystem::path& path, const Histogram& h);

/// Scalar fields of a report; curves live in their CSV files.
nlohmann::ordered_json report_to_json(const EvalReport& r);
nlohmann::ordered_json runtime_to_json(const RuntimeStats& s);

}  // namespace sparsever

#endif  // SPARSEVER_IO_HPP_
