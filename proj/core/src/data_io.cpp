#include "rbkit/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <zlib.h>

namespace rbkit {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

Dataset Dataset::subset(std::size_t first, std::size_t count) const {
  if (first + count > size()) throw std::out_of_range("Dataset::subset: range exceeds size");
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), first);
  return {x.select_rows(idx),
          std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(first),
                              y.begin() + static_cast<std::ptrdiff_t>(first + count)),
          task, class_labels};
}

namespace {

struct RawRow {
  double label;
  std::vector<std::pair<std::size_t, double>> entries;
};

double parse_double(std::string_view token, std::size_t line, const char* what) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, std::string("bad ") + what + " '" + std::string(token) + "'");
  }
  return v;
}

std::size_t parse_index(std::string_view token, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, "bad feature index '" + std::string(token) + "'");
  }
  if (v < 1) throw ParseError(line, "feature indices are 1-based");
  return v;
}

RawRow parse_line(std::string_view text, std::size_t line) {
  RawRow row{};
  std::size_t pos = 0;
  bool have_label = false;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    const std::string_view token = text.substr(pos, end - pos);
    pos = end;
    if (!have_label) {
      row.label = parse_double(token, line, "label");
      have_label = true;
      continue;
    }
    const auto colon = token.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line, "expected <index>:<value>, got '" + std::string(token) + "'");
    }
    row.entries.emplace_back(parse_index(token.substr(0, colon), line),
                             parse_double(token.substr(colon + 1), line, "feature value"));
  }
  return row;
}

bool is_integral(double v) { return std::isfinite(v) && std::floor(v) == v; }

Task infer_task(const std::set<double>& labels, std::size_t n) {
  const bool integral = std::all_of(labels.begin(), labels.end(), is_integral);
  if (!integral) return Task::Regression;
  if (labels.size() == 2) return Task::Binary;
  if (labels.size() > 2 && labels.size() <= 1000 && labels.size() * 2 <= n) {
    return Task::Multiclass;
  }
  return Task::Regression;
}

void assign_known_labels(Dataset& data, const std::vector<double>& raw,
                         const std::vector<double>& known, std::size_t first_line) {
  data.class_labels = known;
  data.y.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto it = std::find(known.begin(), known.end(), raw[i]);
    if (it == known.end()) {
      throw ParseError(first_line, "label " + std::to_string(raw[i]) + " not among known classes");
    }
    const auto cls = static_cast<std::size_t>(it - known.begin());
    data.y[i] = data.task == Task::Binary ? (cls == 0 ? -1.0 : 1.0) : static_cast<double>(cls);
  }
}

void assign_labels(Dataset& data, const std::vector<double>& raw, std::size_t first_line) {
  std::set<double> labels(raw.begin(), raw.end());
  data.y.resize(raw.size());
  switch (data.task) {
    case Task::Regression:
      data.y = raw;
      data.class_labels.clear();
      return;
    case Task::Binary: {
      const bool pm_one = std::all_of(labels.begin(), labels.end(),
                                      [](double v) { return v == -1.0 || v == 1.0; });
      const bool zero_one = std::all_of(labels.begin(), labels.end(),
                                        [](double v) { return v == 0.0 || v == 1.0; });
      double negative;
      if (pm_one) {
        data.class_labels = {-1.0, 1.0};
        negative = -1.0;
      } else if (zero_one) {
        data.class_labels = {0.0, 1.0};
        negative = 0.0;
      } else if (labels.size() == 2) {
        data.class_labels = {*labels.begin(), *labels.rbegin()};
        negative = *labels.begin();
      } else {
        throw ParseError(first_line, "binary task needs two label values");
      }
      for (std::size_t i = 0; i < raw.size(); ++i) data.y[i] = raw[i] == negative ? -1.0 : 1.0;
      return;
    }
    case Task::Multiclass: {
      if (!std::all_of(labels.begin(), labels.end(), is_integral)) {
        throw ParseError(first_line, "multiclass labels must be integers");
      }
      data.class_labels.assign(labels.begin(), labels.end());
      for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto it =
            std::lower_bound(data.class_labels.begin(), data.class_labels.end(), raw[i]);
        data.y[i] = static_cast<double>(it - data.class_labels.begin());
      }
      return;
    }
  }
}

std::string read_gzip(const std::filesystem::path& path) {
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (file == nullptr) throw std::runtime_error("cannot open " + path.string());
  std::string content;
  std::vector<char> buffer(1 << 16);
  int got = 0;
  while ((got = gzread(file, buffer.data(), static_cast<unsigned>(buffer.size()))) > 0) {
    content.append(buffer.data(), static_cast<std::size_t>(got));
  }
  const bool failed = got < 0;
  gzclose(file);
  if (failed) throw std::runtime_error("gzip decode failed for " + path.string());
  return content;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, const LoadOptions& options) {
  std::vector<RawRow> rows;
  std::string text;
  std::size_t line = 0;
  std::size_t max_index = 0;
  std::size_t first_data_line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto hash = text.find('#');
    if (hash != std::string::npos) text.resize(hash);
    if (std::all_of(text.begin(), text.end(),
                    [](unsigned char c) { return std::isspace(c) != 0; })) {
      continue;
    }
    if (first_data_line == 0) first_data_line = line;
    RawRow row = parse_line(text, line);
    for (const auto& [idx, _] : row.entries) {
      if (options.dim_hint && idx > *options.dim_hint) {
        throw ParseError(line, "feature index " + std::to_string(idx) + " exceeds dimension " +
                                   std::to_string(*options.dim_hint));
      }
      max_index = std::max(max_index, idx);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("parse_libsvm: no samples in input");

  const std::size_t d = options.dim_hint.value_or(max_index);
  if (d == 0) throw std::invalid_argument("parse_libsvm: zero-dimensional data");

  Dataset data;
  data.x = RowMatrix(rows.size(), d);
  std::vector<double> raw(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    raw[i] = rows[i].label;
    for (const auto& [idx, v] : rows[i].entries) data.x(i, idx - 1) = v;
  }
  data.task = options.task.value_or(
      infer_task(std::set<double>(raw.begin(), raw.end()), rows.size()));
  if (data.task != Task::Regression && !options.class_labels.empty()) {
    assign_known_labels(data, raw, options.class_labels, first_data_line);
  } else {
    assign_labels(data, raw, first_data_line);
  }
  return data;
}

Dataset load_libsvm(const std::filesystem::path& path, const LoadOptions& options) {
  if (!std::filesystem::exists(path)) {
    throw std::invalid_argument("load_libsvm: no such file " + path.string());
  }
  if (path.extension() == ".gz") {
    std::istringstream in(read_gzip(path));
    return parse_libsvm(in, options);
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_libsvm(in, options);
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

void save_libsvm(const Dataset& data, std::ostream& out) {
  std::string line;
  for (std::size_t i = 0; i < data.size(); ++i) {
    line.clear();
    double label = data.y[i];
    if (data.task == Task::Binary && data.class_labels.size() == 2) {
      label = data.class_labels[data.y[i] > 0.0 ? 1 : 0];
    } else if (data.task == Task::Multiclass && !data.class_labels.empty()) {
      label = data.class_labels.at(static_cast<std::size_t>(data.y[i]));
    }
    append_number(line, label);
    const auto row = data.x.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] == 0.0) continue;
      line += ' ';
      line += std::to_string(j + 1);
      line += ':';
      append_number(line, row[j]);
    }
    line += '\n';
    out << line;
  }
}

void save_libsvm(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  save_libsvm(data, out);
}

RowMatrix ScalingParams::apply(const RowMatrix& x) const {
  if (x.cols() != min.size()) throw std::invalid_argument("ScalingParams::apply: dimension mismatch");
  RowMatrix out = x;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = range[j] > 0.0 ? (row[j] - min[j]) / range[j] : 0.0;
    }
  }
  return out;
}

ScalingParams fit_min_max(const RowMatrix& x) {
  if (x.rows() == 0) throw std::invalid_argument("fit_min_max: empty training set");
  ScalingParams p;
  p.min.assign(x.cols(), 0.0);
  p.range.assign(x.cols(), 0.0);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double lo = x(0, j);
    double hi = x(0, j);
    for (std::size_t i = 1; i < x.rows(); ++i) {
      lo = std::min(lo, x(i, j));
      hi = std::max(hi, x(i, j));
    }
    p.min[j] = lo;
    p.range[j] = hi - lo;
  }
  return p;
}

ScaledPair scale_features(const Dataset& train, const Dataset& test) {
  ScaledPair out{train, test, fit_min_max(train.x)};
  out.train.x = out.params.apply(train.x);
  if (test.size() > 0) out.test.x = out.params.apply(test.x);
  return out;
}

}  // namespace rbkit
