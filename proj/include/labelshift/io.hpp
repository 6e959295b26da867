#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "labelshift/pipeline.hpp"
#include "labelshift/types.hpp"

namespace labelshift::io {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_real(double v);

/// Parses a prediction CSV. The header declares the schema: `y_pred` for
/// hard predictions or `p0..p{k-1}` for soft ones, each optionally preceded
/// by `y_true`. Rows with y_true load as SourceEval, rows without as
/// TargetEval. Malformed rows report their 1-based line number; soft rows
/// must sit on the simplex within 1e-6.
std::variant<SourceEval, TargetEval> load_predictions(const std::string& path, LabelSpace space);

void save_predictions(const std::string& path, const Predictions& preds,
                      const Eigen::VectorXi* labels = nullptr);

/// Dataset CSV with header `x0..x{d-1},y` (labeled) or `x0..x{d-1}` (features
/// only). Returns the label column separately when present.
struct DatasetFile {
  Eigen::MatrixXd features;
  std::optional<Eigen::VectorXi> labels;
};

DatasetFile load_dataset_csv(const std::string& path);
Dataset load_labeled_dataset(const std::string& path, LabelSpace space);
void save_dataset(const std::string& path, const Dataset& data);

/// IDX (MNIST-style) ingestion: big-endian magic 0x00000803 for images and
/// 0x00000801 for labels, matching item counts. Pixels land row-major in
/// [0, 1] (divided by 255).
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

struct WeightsSection {
  std::vector<double> w;
  std::vector<double> w_raw;
  std::vector<double> mu_y;
  double sigma_min = 0.0;
  bool fallback = false;
  std::vector<bool> clipped;
  std::optional<double> bound;
  std::optional<std::vector<double>> mu_y_normalized;

  static WeightsSection from(const WeightEstimate& e, bool include_normalized = false);
  bool operator==(const WeightsSection&) const = default;
};

struct DetectionSection {
  std::string method;
  double statistic = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  std::int64_t n = 0;
  std::int64_t m = 0;

  static DetectionSection from(const detect::ShiftReport& r);
  bool operator==(const DetectionSection&) const = default;
};

struct ReportMeta {
  int k = 2;
  std::optional<std::uint64_t> seed;
  std::string version;

  bool operator==(const ReportMeta&) const = default;
};

/// Structured result document; round-trips losslessly through both formats.
struct ReportDocument {
  std::optional<WeightsSection> weights;
  std::optional<DetectionSection> detection;
  ReportMeta meta;

  bool operator==(const ReportDocument&) const = default;
};

std::string report_to_json(const ReportDocument& doc);
ReportDocument report_from_json(const std::string& text);

/// Long-format CSV with header `section,field,index,value`.
std::string report_to_csv(const ReportDocument& doc);
ReportDocument report_from_csv(const std::string& text);

std::string result_table_to_csv(const std::vector<pipeline::ResultRow>& rows);
std::string result_table_to_json(const std::vector<pipeline::ResultRow>& rows);

/// Softmax model as JSON ({k, d, weights, bias}).
std::string model_to_json(const model::SoftmaxModel& m);
model::SoftmaxModel model_from_json(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace labelshift::io
