#include "labelshift/io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace labelshift::io {

using ordered_json = nlohmann::ordered_json;

std::string format_real(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  out << content;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError(where + ": cannot parse real value '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const std::string& where) {
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError(where + ": cannot parse integer value '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, const std::string& where) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError(where + ": cannot parse unsigned value '" + s + "'");
  return v;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::string text = read_file(path);
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

bool is_prob_header(const std::vector<std::string>& cols, std::size_t start) {
  for (std::size_t i = start; i < cols.size(); ++i)
    if (cols[i] != "p" + std::to_string(i - start)) return false;
  return cols.size() > start;
}

}  // namespace

std::variant<SourceEval, TargetEval> load_predictions(const std::string& path, LabelSpace space) {
  std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw FormatError(path + ": empty file");

  std::vector<std::string> header = split_csv_line(lines[0]);
  bool has_truth = !header.empty() && header[0] == "y_true";
  std::size_t first_pred = has_truth ? 1 : 0;

  bool hard;
  if (header.size() == first_pred + 1 && header[first_pred] == "y_pred") {
    hard = true;
  } else if (is_prob_header(header, first_pred)) {
    hard = false;
    if (header.size() - first_pred != static_cast<std::size_t>(space.k))
      throw FormatError(path + ": header declares " +
                        std::to_string(header.size() - first_pred) +
                        " probability columns, expected k=" + std::to_string(space.k));
  } else {
    throw FormatError(path + ": unrecognized header '" + lines[0] + "'");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(lines.size()) - 1;
  if (n == 0) throw FormatError(path + ": no data rows");

  Eigen::VectorXi truth(has_truth ? n : 0);
  Eigen::VectorXi hard_preds(hard ? n : 0);
  Eigen::MatrixXd soft_preds(hard ? 0 : n, hard ? 0 : space.k);

  for (Eigen::Index r = 0; r < n; ++r) {
    const std::string where = path + ":" + std::to_string(r + 2);
    std::vector<std::string> fields = split_csv_line(lines[static_cast<std::size_t>(r) + 1]);
    if (fields.size() != header.size())
      throw FormatError(where + ": expected " + std::to_string(header.size()) +
                        " fields, found " + std::to_string(fields.size()));

    if (has_truth) {
      long long y = parse_int(fields[0], where);
      if (y < 0 || y >= space.k)
        throw FormatError(where + ": label " + std::to_string(y) + " out of range [0, " +
                          std::to_string(space.k) + ")");
      truth(r) = static_cast<int>(y);
    }

    if (hard) {
      long long y = parse_int(fields[first_pred], where);
      if (y < 0 || y >= space.k)
        throw FormatError(where + ": predicted label " + std::to_string(y) +
                          " out of range [0, " + std::to_string(space.k) + ")");
      hard_preds(r) = static_cast<int>(y);
    } else {
      double sum = 0.0;
      for (int c = 0; c < space.k; ++c) {
        double v = parse_double(fields[first_pred + static_cast<std::size_t>(c)], where);
        if (v < 0.0) throw FormatError(where + ": negative probability " + format_real(v));
        soft_preds(r, c) = v;
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-6)
        throw FormatError(where + ": probabilities sum to " + format_real(sum) +
                          ", expected 1 within 1e-6");
      if (std::abs(sum - 1.0) > 1e-13) soft_preds.row(r) /= sum;
    }
  }

  Predictions preds =
      hard ? Predictions::hard(std::move(hard_preds)) : Predictions::soft(std::move(soft_preds));
  if (has_truth) return SourceEval(std::move(preds), std::move(truth));
  return TargetEval(std::move(preds));
}

void save_predictions(const std::string& path, const Predictions& preds,
                      const Eigen::VectorXi* labels) {
  std::ostringstream out;
  if (labels && labels->size() != preds.count())
    throw DomainError("save_predictions: label count mismatch");

  if (preds.mode() == PredMode::Hard) {
    out << (labels ? "y_true,y_pred\n" : "y_pred\n");
    for (Eigen::Index i = 0; i < preds.count(); ++i) {
      if (labels) out << (*labels)(i) << ',';
      out << preds.hard_labels()(i) << '\n';
    }
  } else {
    if (labels) out << "y_true,";
    for (Eigen::Index c = 0; c < preds.soft_width(); ++c)
      out << 'p' << c << (c + 1 < preds.soft_width() ? ',' : '\n');
    for (Eigen::Index i = 0; i < preds.count(); ++i) {
      if (labels) out << (*labels)(i) << ',';
      for (Eigen::Index c = 0; c < preds.soft_width(); ++c)
        out << format_real(preds.soft_probs()(i, c)) << (c + 1 < preds.soft_width() ? ',' : '\n');
    }
  }
  write_file(path, out.str());
}

DatasetFile load_dataset_csv(const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw FormatError(path + ": empty file");
  std::vector<std::string> header = split_csv_line(lines[0]);

  bool has_labels = !header.empty() && header.back() == "y";
  std::size_t d = header.size() - (has_labels ? 1 : 0);
  if (d == 0) throw FormatError(path + ": no feature columns");
  for (std::size_t j = 0; j < d; ++j)
    if (header[j] != "x" + std::to_string(j))
      throw FormatError(path + ": unrecognized header '" + lines[0] + "'");

  const Eigen::Index n = static_cast<Eigen::Index>(lines.size()) - 1;
  if (n == 0) throw FormatError(path + ": no data rows");

  DatasetFile out;
  out.features.resize(n, static_cast<Eigen::Index>(d));
  if (has_labels) out.labels = Eigen::VectorXi(n);

  for (Eigen::Index r = 0; r < n; ++r) {
    const std::string where = path + ":" + std::to_string(r + 2);
    std::vector<std::string> fields = split_csv_line(lines[static_cast<std::size_t>(r) + 1]);
    if (fields.size() != header.size())
      throw FormatError(where + ": expected " + std::to_string(header.size()) +
                        " fields, found " + std::to_string(fields.size()));
    for (std::size_t j = 0; j < d; ++j)
      out.features(r, static_cast<Eigen::Index>(j)) = parse_double(fields[j], where);
    if (has_labels) {
      long long y = parse_int(fields[d], where);
      if (y < 0) throw FormatError(where + ": negative label");
      (*out.labels)(r) = static_cast<int>(y);
    }
  }
  return out;
}

Dataset load_labeled_dataset(const std::string& path, LabelSpace space) {
  DatasetFile file = load_dataset_csv(path);
  if (!file.labels) throw FormatError(path + ": dataset has no label column");
  return Dataset(std::move(file.features), std::move(*file.labels), space);
}

void save_dataset(const std::string& path, const Dataset& data) {
  std::ostringstream out;
  for (Eigen::Index j = 0; j < data.dim(); ++j) out << 'x' << j << ',';
  out << "y\n";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << format_real(data.features(i, j)) << ',';
    out << data.labels(i) << '\n';
  }
  write_file(path, out.str());
}

namespace {

std::uint32_t read_be32(const std::string& buf, std::size_t offset, const std::string& path) {
  if (offset + 4 > buf.size()) throw FormatError(path + ": truncated IDX header");
  auto b = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(buf[offset + i])); };
  return (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  const std::string img = read_file(images_path);
  const std::string lab = read_file(labels_path);

  if (read_be32(img, 0, images_path) != 0x00000803u)
    throw FormatError(images_path + ": bad IDX magic, expected 0x00000803 (images)");
  if (read_be32(lab, 0, labels_path) != 0x00000801u)
    throw FormatError(labels_path + ": bad IDX magic, expected 0x00000801 (labels)");

  const std::uint32_t n_images = read_be32(img, 4, images_path);
  const std::uint32_t rows = read_be32(img, 8, images_path);
  const std::uint32_t cols = read_be32(img, 12, images_path);
  const std::uint32_t n_labels = read_be32(lab, 4, labels_path);
  if (n_images != n_labels)
    throw FormatError(images_path + ": " + std::to_string(n_images) + " images vs " +
                      std::to_string(n_labels) + " labels");

  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  if (img.size() != 16 + static_cast<std::size_t>(n_images) * pixels)
    throw FormatError(images_path + ": truncated image payload");
  if (lab.size() != 8 + static_cast<std::size_t>(n_labels))
    throw FormatError(labels_path + ": truncated label payload");

  Eigen::MatrixXd features(n_images, pixels);
  Eigen::VectorXi labels(n_images);
  int max_label = 1;
  for (std::uint32_t i = 0; i < n_images; ++i) {
    for (std::size_t p = 0; p < pixels; ++p)
      features(i, static_cast<Eigen::Index>(p)) =
          static_cast<unsigned char>(img[16 + static_cast<std::size_t>(i) * pixels + p]) / 255.0;
    labels(i) = static_cast<unsigned char>(lab[8 + i]);
    max_label = std::max(max_label, labels(i));
  }
  return Dataset(std::move(features), std::move(labels), LabelSpace(max_label + 1));
}

WeightsSection WeightsSection::from(const WeightEstimate& e, bool include_normalized) {
  WeightsSection s;
  s.w.assign(e.w.data(), e.w.data() + e.w.size());
  s.w_raw.assign(e.w_raw.data(), e.w_raw.data() + e.w_raw.size());
  s.mu_y.assign(e.mu_y.data(), e.mu_y.data() + e.mu_y.size());
  s.sigma_min = e.sigma_min;
  s.fallback = e.fallback;
  s.clipped = e.clipped;
  s.bound = e.bound;
  if (include_normalized) {
    const Eigen::VectorXd norm = e.mu_y_normalized().probs();
    s.mu_y_normalized = std::vector<double>(norm.data(), norm.data() + norm.size());
  }
  return s;
}

DetectionSection DetectionSection::from(const detect::ShiftReport& r) {
  return DetectionSection{detect::method_name(r.method),
                          r.statistic,
                          r.p_value,
                          r.alpha,
                          r.reject,
                          static_cast<std::int64_t>(r.n1),
                          static_cast<std::int64_t>(r.n2)};
}

std::string report_to_json(const ReportDocument& doc) {
  ordered_json j;
  j["meta"]["k"] = doc.meta.k;
  if (doc.meta.seed) j["meta"]["seed"] = *doc.meta.seed;
  j["meta"]["version"] = doc.meta.version;
  if (doc.weights) {
    const WeightsSection& w = *doc.weights;
    ordered_json jw;
    jw["w"] = w.w;
    jw["w_raw"] = w.w_raw;
    jw["mu_y"] = w.mu_y;
    jw["sigma_min"] = w.sigma_min;
    jw["fallback"] = w.fallback;
    jw["clipped"] = w.clipped;
    if (w.bound) jw["bound"] = *w.bound;
    if (w.mu_y_normalized) jw["mu_y_normalized"] = *w.mu_y_normalized;
    j["weights"] = std::move(jw);
  }
  if (doc.detection) {
    const DetectionSection& d = *doc.detection;
    ordered_json jd;
    jd["method"] = d.method;
    jd["statistic"] = d.statistic;
    jd["p_value"] = d.p_value;
    jd["alpha"] = d.alpha;
    jd["reject"] = d.reject;
    jd["n"] = d.n;
    jd["m"] = d.m;
    j["detection"] = std::move(jd);
  }
  return j.dump(2) + "\n";
}

ReportDocument report_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report JSON: ") + e.what());
  }
  ReportDocument doc;
  try {
    doc.meta.k = j.at("meta").at("k").get<int>();
    if (j.at("meta").contains("seed")) doc.meta.seed = j["meta"]["seed"].get<std::uint64_t>();
    doc.meta.version = j.at("meta").at("version").get<std::string>();
    if (j.contains("weights")) {
      const auto& jw = j["weights"];
      WeightsSection w;
      w.w = jw.at("w").get<std::vector<double>>();
      w.w_raw = jw.at("w_raw").get<std::vector<double>>();
      w.mu_y = jw.at("mu_y").get<std::vector<double>>();
      w.sigma_min = jw.at("sigma_min").get<double>();
      w.fallback = jw.at("fallback").get<bool>();
      w.clipped = jw.at("clipped").get<std::vector<bool>>();
      if (jw.contains("bound")) w.bound = jw["bound"].get<double>();
      if (jw.contains("mu_y_normalized"))
        w.mu_y_normalized = jw["mu_y_normalized"].get<std::vector<double>>();
      doc.weights = std::move(w);
    }
    if (j.contains("detection")) {
      const auto& jd = j["detection"];
      DetectionSection d;
      d.method = jd.at("method").get<std::string>();
      d.statistic = jd.at("statistic").get<double>();
      d.p_value = jd.at("p_value").get<double>();
      d.alpha = jd.at("alpha").get<double>();
      d.reject = jd.at("reject").get<bool>();
      d.n = jd.at("n").get<std::int64_t>();
      d.m = jd.at("m").get<std::int64_t>();
      doc.detection = std::move(d);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report JSON: ") + e.what());
  }
  return doc;
}

namespace {

void csv_row(std::ostringstream& out, const std::string& section, const std::string& field,
             const std::string& index, const std::string& value) {
  out << section << ',' << field << ',' << index << ',' << value << '\n';
}

void csv_vector(std::ostringstream& out, const std::string& section, const std::string& field,
                const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    csv_row(out, section, field, std::to_string(i), format_real(values[i]));
}

}  // namespace

std::string report_to_csv(const ReportDocument& doc) {
  std::ostringstream out;
  out << "section,field,index,value\n";
  csv_row(out, "meta", "k", "", std::to_string(doc.meta.k));
  if (doc.meta.seed) csv_row(out, "meta", "seed", "", std::to_string(*doc.meta.seed));
  csv_row(out, "meta", "version", "", doc.meta.version);
  if (doc.weights) {
    const WeightsSection& w = *doc.weights;
    csv_vector(out, "weights", "w", w.w);
    csv_vector(out, "weights", "w_raw", w.w_raw);
    csv_vector(out, "weights", "mu_y", w.mu_y);
    csv_row(out, "weights", "sigma_min", "", format_real(w.sigma_min));
    csv_row(out, "weights", "fallback", "", w.fallback ? "1" : "0");
    for (std::size_t i = 0; i < w.clipped.size(); ++i)
      csv_row(out, "weights", "clipped", std::to_string(i), w.clipped[i] ? "1" : "0");
    if (w.bound) csv_row(out, "weights", "bound", "", format_real(*w.bound));
    if (w.mu_y_normalized) csv_vector(out, "weights", "mu_y_normalized", *w.mu_y_normalized);
  }
  if (doc.detection) {
    const DetectionSection& d = *doc.detection;
    csv_row(out, "detection", "method", "", d.method);
    csv_row(out, "detection", "statistic", "", format_real(d.statistic));
    csv_row(out, "detection", "p_value", "", format_real(d.p_value));
    csv_row(out, "detection", "alpha", "", format_real(d.alpha));
    csv_row(out, "detection", "reject", "", d.reject ? "1" : "0");
    csv_row(out, "detection", "n", "", std::to_string(d.n));
    csv_row(out, "detection", "m", "", std::to_string(d.m));
  }
  return out.str();
}

ReportDocument report_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"section", "field", "index", "value"})
    throw FormatError("report CSV: missing header");

  ReportDocument doc;
  auto weights = [&]() -> WeightsSection& {
    if (!doc.weights) doc.weights.emplace();
    return *doc.weights;
  };
  auto detection = [&]() -> DetectionSection& {
    if (!doc.detection) doc.detection.emplace();
    return *doc.detection;
  };
  auto push_indexed = [](std::vector<double>& vec, const std::string& index, double value) {
    if (index != std::to_string(vec.size()))
      throw FormatError("report CSV: out-of-order index '" + index + "'");
    vec.push_back(value);
  };

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 4) throw FormatError("report CSV:" + std::to_string(line_no) + ": expected 4 fields");
    const std::string where = "report CSV:" + std::to_string(line_no);
    const std::string &section = f[0], &field = f[1], &index = f[2], &value = f[3];

    if (section == "meta") {
      if (field == "k") doc.meta.k = static_cast<int>(parse_int(value, where));
      else if (field == "seed") doc.meta.seed = parse_uint(value, where);
      else if (field == "version") doc.meta.version = value;
      else throw FormatError(where + ": unknown meta field '" + field + "'");
    } else if (section == "weights") {
      WeightsSection& w = weights();
      if (field == "w") push_indexed(w.w, index, parse_double(value, where));
      else if (field == "w_raw") push_indexed(w.w_raw, index, parse_double(value, where));
      else if (field == "mu_y") push_indexed(w.mu_y, index, parse_double(value, where));
      else if (field == "sigma_min") w.sigma_min = parse_double(value, where);
      else if (field == "fallback") w.fallback = parse_int(value, where) != 0;
      else if (field == "clipped") {
        if (index != std::to_string(w.clipped.size()))
          throw FormatError(where + ": out-of-order clipped index");
        w.clipped.push_back(parse_int(value, where) != 0);
      } else if (field == "bound") w.bound = parse_double(value, where);
      else if (field == "mu_y_normalized") {
        if (!w.mu_y_normalized) w.mu_y_normalized.emplace();
        push_indexed(*w.mu_y_normalized, index, parse_double(value, where));
      } else throw FormatError(where + ": unknown weights field '" + field + "'");
    } else if (section == "detection") {
      DetectionSection& d = detection();
      if (field == "method") d.method = value;
      else if (field == "statistic") d.statistic = parse_double(value, where);
      else if (field == "p_value") d.p_value = parse_double(value, where);
      else if (field == "alpha") d.alpha = parse_double(value, where);
      else if (field == "reject") d.reject = parse_int(value, where) != 0;
      else if (field == "n") d.n = parse_int(value, where);
      else if (field == "m") d.m = parse_int(value, where);
      else throw FormatError(where + ": unknown detection field '" + field + "'");
    } else {
      throw FormatError(where + ": unknown section '" + section + "'");
    }
  }
  return doc;
}

namespace {

template <typename T, typename Format>
std::string opt_str(const std::optional<T>& v, Format&& fmt) {
  return v ? fmt(*v) : std::string();
}

}  // namespace

std::string result_table_to_csv(const std::vector<pipeline::ResultRow>& rows) {
  std::ostringstream out;
  out << "shift_kind,shift_param,shift_class,n,m,seed,replication,"
         "mse_w,mse_mu,sigma_min,p_value,reject,acc_baseline,acc_corrected\n";
  auto real = [](double v) { return format_real(v); };
  for (const auto& r : rows) {
    out << r.shift_kind << ',' << format_real(r.shift_param) << ','
        << opt_str(r.shift_class, [](int c) { return std::to_string(c); }) << ',' << r.n << ','
        << r.m << ',' << r.seed << ',' << r.replication << ',' << opt_str(r.mse_w, real) << ','
        << opt_str(r.mse_mu, real) << ',' << opt_str(r.sigma_min, real) << ','
        << opt_str(r.p_value, real) << ','
        << opt_str(r.reject, [](bool b) { return std::string(b ? "1" : "0"); }) << ','
        << opt_str(r.acc_baseline, real) << ',' << opt_str(r.acc_corrected, real) << '\n';
  }
  return out.str();
}

std::string result_table_to_json(const std::vector<pipeline::ResultRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["shift_kind"] = r.shift_kind;
    j["shift_param"] = r.shift_param;
    if (r.shift_class) j["shift_class"] = *r.shift_class;
    j["n"] = static_cast<std::int64_t>(r.n);
    j["m"] = static_cast<std::int64_t>(r.m);
    j["seed"] = r.seed;
    j["replication"] = r.replication;
    if (r.mse_w) j["mse_w"] = *r.mse_w;
    if (r.mse_mu) j["mse_mu"] = *r.mse_mu;
    if (r.sigma_min) j["sigma_min"] = *r.sigma_min;
    if (r.p_value) j["p_value"] = *r.p_value;
    if (r.reject) j["reject"] = *r.reject;
    if (r.acc_baseline) j["acc_baseline"] = *r.acc_baseline;
    if (r.acc_corrected) j["acc_corrected"] = *r.acc_corrected;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string model_to_json(const model::SoftmaxModel& m) {
  ordered_json j;
  j["k"] = m.space.k;
  j["d"] = static_cast<std::int64_t>(m.dim());
  ordered_json weights = ordered_json::array();
  for (Eigen::Index r = 0; r < m.weights.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.weights.cols(); ++c) row.push_back(m.weights(r, c));
    weights.push_back(std::move(row));
  }
  j["weights"] = std::move(weights);
  j["bias"] = std::vector<double>(m.bias.data(), m.bias.data() + m.bias.size());
  return j.dump(2) + "\n";
}

model::SoftmaxModel model_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
    int k = j.at("k").get<int>();
    auto d = j.at("d").get<Eigen::Index>();
    Eigen::MatrixXd weights(k, d);
    const auto& jw = j.at("weights");
    if (static_cast<int>(jw.size()) != k) throw FormatError("model JSON: weight row count mismatch");
    for (int r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < d; ++c) weights(r, c) = jw.at(r).at(c).get<double>();
    auto bias_vec = j.at("bias").get<std::vector<double>>();
    if (static_cast<int>(bias_vec.size()) != k) throw FormatError("model JSON: bias length mismatch");
    Eigen::VectorXd bias = Eigen::Map<Eigen::VectorXd>(bias_vec.data(), k);
    return model::SoftmaxModel(std::move(weights), std::move(bias), LabelSpace(k));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model JSON: ") + e.what());
  }
}

}  // namespace labelshift::io
