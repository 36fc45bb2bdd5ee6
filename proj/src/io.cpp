#include "sparsever/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace sparsever {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kMalformedInput: return "malformed input";
    case ErrorCode::kZeroNorm: return "zero norm";
    case ErrorCode::kDuplicateClass: return "duplicate class";
    case ErrorCode::kUnknownClass: return "unknown class";
    case ErrorCode::kClassMismatch: return "class mismatch";
    case ErrorCode::kUndefinedScore: return "undefined score";
    case ErrorCode::kMetricMismatch: return "metric mismatch";
    case ErrorCode::kEnumerationLimit: return "enumeration limit";
    case ErrorCode::kEmptyInput: return "empty input";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown";
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool append = false) {
  std::ofstream out(path, append ? std::ios::binary | std::ios::app : std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void check_field(const std::string& field, const char* what) {
  require(field.find_first_of(",\n\r") == std::string::npos, ErrorCode::kInvalidArgument,
          std::string("csv: ") + what + " '" + field + "' contains a separator");
}

}  // namespace

void write_feature_csv(const std::filesystem::path& path, std::span<const LabeledFeature> rows) {
  require(!rows.empty(), ErrorCode::kEmptyInput, "write_feature_csv: no rows");
  const Eigen::Index d = rows.front().feature.dim();
  std::string text = "subject_id,sample_id,modality";
  for (Eigen::Index i = 0; i < d; ++i) text += ",v" + std::to_string(i);
  text += '\n';
  for (const auto& r : rows) {
    require(r.feature.dim() == d, ErrorCode::kDimensionMismatch,
            "write_feature_csv: inconsistent dimensions");
    check_field(r.class_id, "subject_id");
    check_field(r.feature.source_id, "sample_id");
    check_field(r.feature.modality, "modality");
    text += r.class_id;
    text += ',';
    text += r.feature.source_id;
    text += ',';
    text += r.feature.modality;
    for (Eigen::Index i = 0; i < d; ++i) {
      text += ',';
      text += format_double(r.feature.values(i));
    }
    text += '\n';
  }
  auto out = open_out(path);
  out << text;
}

std::vector<LabeledFeature> read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kMalformedInput, path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  require(header.size() >= 4 && header[0] == "subject_id" && header[1] == "sample_id" &&
              header[2] == "modality",
          ErrorCode::kMalformedInput, path.string() + ": bad feature CSV header");
  const std::size_t d = header.size() - 3;
  for (std::size_t i = 0; i < d; ++i) {
    require(header[3 + i] == "v" + std::to_string(i), ErrorCode::kMalformedInput,
            path.string() + ": bad feature column name '" + std::string(header[3 + i]) + "'");
  }

  std::vector<LabeledFeature> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    require(fields.size() == d + 3, ErrorCode::kMalformedInput,
            path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(d + 3) +
                " fields");
    LabeledFeature r;
    r.class_id = std::string(fields[0]);
    r.feature.source_id = std::string(fields[1]);
    r.feature.modality = std::string(fields[2]);
    r.feature.values.resize(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      const auto f = fields[3 + i];
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      require(res.ec == std::errc() && res.ptr == f.data() + f.size() && std::isfinite(v),
              ErrorCode::kMalformedInput,
              path.string() + ":" + std::to_string(line_no) + ": bad value '" + std::string(f) + "'");
      r.feature.values(static_cast<Eigen::Index>(i)) = v;
    }
    rows.push_back(std::move(r));
  }
  require(!rows.empty(), ErrorCode::kEmptyInput, path.string() + ": no samples");
  return rows;
}

std::vector<ClassBlock> group_into_blocks(std::span<const LabeledFeature> rows) {
  std::vector<ClassBlock> blocks;
  std::unordered_map<std::string, std::size_t> where;
  for (const auto& r : rows) {
    auto [it, inserted] = where.emplace(r.class_id, blocks.size());
    if (inserted) blocks.push_back(ClassBlock{r.class_id, {}});
    blocks[it->second].samples.push_back(r.feature);
  }
  return blocks;
}

nlohmann::ordered_json feature_manifest(std::span<const LabeledFeature> rows) {
  require(!rows.empty(), ErrorCode::kEmptyInput, "manifest: no rows");
  nlohmann::ordered_json j;
  j["modality"] = rows.front().feature.modality;
  j["dimension"] = rows.front().feature.dim();
  j["samples"] = rows.size();
  auto classes = nlohmann::ordered_json::array();
  for (const auto& b : group_into_blocks(rows)) {
    classes.push_back({{"class_id", b.class_id}, {"count", b.samples.size()}});
  }
  j["classes"] = std::move(classes);
  return j;
}

nlohmann::ordered_json dictionary_manifest(const Dictionary& dict) {
  nlohmann::ordered_json j;
  j["modality"] = dict.modality();
  j["dimension"] = dict.dim();
  j["columns"] = dict.column_count();
  j["normalized"] = "unit_l2";
  auto classes = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < dict.class_count(); ++i) {
    classes.push_back({{"class_id", dict.class_id(i)}, {"count", dict.block_size(i)}});
  }
  j["classes"] = std::move(classes);
  return j;
}

void write_dictionary(const std::filesystem::path& csv_path, const std::filesystem::path& manifest_path,
                      const Dictionary& dict) {
  std::vector<LabeledFeature> rows;
  rows.reserve(static_cast<std::size_t>(dict.column_count()));
  for (std::size_t i = 0; i < dict.class_count(); ++i) {
    const auto& block = dict.blocks()[i];
    for (Eigen::Index j = 0; j < dict.block_size(i); ++j) {
      const auto& s = block.samples[static_cast<std::size_t>(j)];
      rows.push_back({block.class_id,
                      FeatureVector{dict.matrix().col(dict.block_offset(i) + j), s.modality, s.source_id}});
    }
  }
  write_feature_csv(csv_path, rows);
  write_json(manifest_path, dictionary_manifest(dict));
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

nlohmann::ordered_json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedInput, path.string() + ": " + e.what());
  }
}

void write_score_dump(const std::filesystem::path& path, std::span<const ProbeScores> rows,
                      std::span<const std::string> class_ids, Metric metric,
                      const std::string& modality, bool append) {
  std::string text;
  if (!append) text = "probe_id,claimed_class,true_class,metric,value,is_genuine,modality\n";
  const std::string metric_name(to_string(metric));
  for (const auto& r : rows) {
    if (!r.defined) continue;
    for (std::size_t i = 0; i < r.classes.size(); ++i) {
      text += r.probe_id;
      text += ',';
      text += class_ids[r.classes[i]];
      text += ',';
      text += class_ids[r.true_class];
      text += ',';
      text += metric_name;
      text += ',';
      text += format_double(r.values[i]);
      text += r.classes[i] == r.true_class ? ",1," : ",0,";
      text += modality;
      text += '\n';
    }
  }
  auto out = open_out(path, append);
  out << text;
}

void write_roc_csv(const std::filesystem::path& path, std::span<const RocPoint> roc) {
  std::string text = "threshold,far,frr\n";
  for (const auto& p : roc) {
    text += format_double(p.threshold) + "," + format_double(p.far) + "," + format_double(p.frr) + "\n";
  }
  auto out = open_out(path);
  out << text;
}

void write_cmc_csv(const std::filesystem::path& path, const CmcCurve& cmc) {
  std::string text = "rank,rate\n";
  for (std::size_t r = 0; r < cmc.rates.size(); ++r) {
    text += std::to_string(r + 1) + "," + format_double(cmc.rates[r]) + "\n";
  }
  auto out = open_out(path);
  out << text;
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram& h) {
  std::string text = "bin_lo,bin_hi,genuine,imposter\n";
  for (std::size_t b = 0; b < h.lo.size(); ++b) {
    text += format_double(h.lo[b]) + "," + format_double(h.hi[b]) + "," + format_double(h.genuine[b]) +
            "," + format_double(h.imposter[b]) + "\n";
  }
  auto out = open_out(path);
  out << text;
}

nlohmann::ordered_json report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["polarity"] = std::string(to_string(r.polarity));
  j["eer"] = r.eer;
  j["rank_one"] = r.rank_one;
  j["genuine_count"] = r.genuine_count;
  j["imposter_count"] = r.imposter_count;
  j["undefined_score_count"] = r.undefined_score_count;
  j["roc_points"] = r.roc.size();
  j["cmc"] = r.cmc.rates;
  if (r.runtime) j["runtime"] = runtime_to_json(*r.runtime);
  return j;
}

nlohmann::ordered_json runtime_to_json(const RuntimeStats& s) {
  return {{"count", s.count}, {"mean_seconds", s.mean}, {"median_seconds", s.median},
          {"stddev_seconds", s.stddev}};
}

}  // namespace sparsever
