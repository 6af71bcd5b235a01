#include "dsscn/stream_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dsscn {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> parse_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool is_blank(const std::string& line) { return trim(line).empty(); }

}  // namespace

DataChunk DataChunk::slice(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > size()) throw std::out_of_range("DataChunk::slice: bad row range");
  const auto rows = static_cast<Eigen::Index>(end - begin);
  const auto b = static_cast<Eigen::Index>(begin);
  DataChunk out;
  out.X = X.middleRows(b, rows);
  if (Y) out.Y = Y->middleRows(b, rows);
  out.stamp = stamp;
  return out;
}

DataChunk make_chunk(Eigen::MatrixXd X, std::optional<Eigen::MatrixXd> Y, std::size_t stamp) {
  if (X.rows() < 1) throw std::invalid_argument("chunk must hold at least one sample");
  if (!X.allFinite()) throw std::invalid_argument("chunk features must be finite");
  if (Y) {
    if (Y->rows() != X.rows()) throw std::invalid_argument("label rows do not match feature rows");
    for (Eigen::Index t = 0; t < Y->rows(); ++t) {
      double sum = 0.0;
      for (Eigen::Index o = 0; o < Y->cols(); ++o) {
        const double v = (*Y)(t, o);
        if (v != 0.0 && v != 1.0) throw std::invalid_argument("label matrix must be 0/1");
        sum += v;
      }
      if (sum != 1.0) {
        throw std::invalid_argument("label row " + std::to_string(t) + " is not one-hot");
      }
    }
  }
  DataChunk c;
  c.X = std::move(X);
  c.Y = std::move(Y);
  c.stamp = stamp;
  return c;
}

DataChunk concat_chunks(const DataChunk& head, const DataChunk& tail) {
  if (head.features() != tail.features() || head.labeled() != tail.labeled() ||
      head.classes() != tail.classes()) {
    throw std::invalid_argument("concat_chunks: incompatible chunks");
  }
  DataChunk out;
  out.X.resize(head.X.rows() + tail.X.rows(), head.X.cols());
  out.X << head.X, tail.X;
  if (head.Y) {
    Eigen::MatrixXd Y(head.Y->rows() + tail.Y->rows(), head.Y->cols());
    Y << *head.Y, *tail.Y;
    out.Y = std::move(Y);
  }
  out.stamp = tail.stamp;
  return out;
}

Eigen::MatrixXd one_hot_encode(const std::vector<int>& labels, int m) {
  if (m < 1) throw std::invalid_argument("class count must be >= 1");
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), m);
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const int label = labels[t];
    if (label < 1 || label > m) {
      throw std::out_of_range("label " + std::to_string(label) + " at index " + std::to_string(t) +
                              " outside [1, " + std::to_string(m) + "]");
    }
    Y(static_cast<Eigen::Index>(t), label - 1) = 1.0;
  }
  return Y;
}

std::vector<int> class_indices(const Eigen::MatrixXd& Y) {
  std::vector<int> out(static_cast<std::size_t>(Y.rows()));
  for (Eigen::Index t = 0; t < Y.rows(); ++t) {
    Eigen::Index idx = 0;
    Y.row(t).maxCoeff(&idx);
    out[static_cast<std::size_t>(t)] = static_cast<int>(idx);
  }
  return out;
}

double sea_class1_probability(double theta) {
  // Area of {f1 + f2 < theta} inside [0,10]^2, over 100.
  if (theta <= 0.0) return 0.0;
  if (theta >= 20.0) return 1.0;
  if (theta <= 10.0) return theta * theta / 200.0;
  return 1.0 - (20.0 - theta) * (20.0 - theta) / 200.0;
}

std::vector<ThetaSwitch> sea_recurring_schedule(std::size_t samples, std::size_t every) {
  std::vector<ThetaSwitch> schedule;
  if (every == 0) every = samples == 0 ? 1 : samples;
  bool low = true;
  for (std::size_t start = 0; start < std::max<std::size_t>(samples, 1); start += every) {
    schedule.push_back({start, low ? 4.0 : 7.0});
    low = !low;
  }
  return schedule;
}

LabeledStream generate_sea(std::size_t samples, const std::vector<ThetaSwitch>& schedule,
                           std::optional<double> minority_fraction, std::uint64_t seed) {
  if (schedule.empty()) throw std::invalid_argument("SEA schedule is empty");
  if (schedule.front().start != 0) throw std::invalid_argument("SEA schedule must start at index 0");
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    if (schedule[k].start <= schedule[k - 1].start) {
      throw std::invalid_argument("SEA schedule indices must be strictly increasing");
    }
  }
  if (minority_fraction && (*minority_fraction <= 0.0 || *minority_fraction >= 1.0)) {
    throw std::invalid_argument("minority fraction must lie in (0, 1)");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> feature(0.0, 10.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  LabeledStream out;
  out.classes = 2;
  out.X.resize(static_cast<Eigen::Index>(samples), 3);
  out.labels.resize(samples);

  std::size_t active = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    while (active + 1 < schedule.size() && schedule[active + 1].start <= i) ++active;
    const double theta = schedule[active].theta;

    double accept_class1 = 1.0;
    double accept_class2 = 1.0;
    if (minority_fraction) {
      const double p1 = sea_class1_probability(theta);
      const double f = *minority_fraction;
      if (p1 > 0.0 && p1 < 1.0) {
        const double ratio = f * (1.0 - p1) / (p1 * (1.0 - f));
        if (ratio < 1.0) {
          accept_class1 = ratio;
        } else {
          accept_class2 = 1.0 / ratio;
        }
      }
    }

    for (;;) {
      const double f1 = feature(rng);
      const double f2 = feature(rng);
      const double f3 = feature(rng);
      const int label = (f1 + f2 < theta) ? 1 : 2;
      const double u = coin(rng);
      if (u >= (label == 1 ? accept_class1 : accept_class2)) continue;
      const auto r = static_cast<Eigen::Index>(i);
      out.X(r, 0) = f1;
      out.X(r, 1) = f2;
      out.X(r, 2) = f3;
      out.labels[i] = label;
      break;
    }
  }
  return out;
}

double hyperplane_mixing_probability(std::size_t index, std::size_t drift_start,
                                     std::size_t drift_span) {
  if (index < drift_start) return 0.0;
  if (index >= drift_start + drift_span) return 1.0;
  return static_cast<double>(index - drift_start) / static_cast<double>(drift_span);
}

LabeledStream generate_hyperplane(const HyperplaneParams& p, std::uint64_t seed) {
  if (p.dim < 1) throw std::invalid_argument("hyperplane dimension must be >= 1");
  if (p.w.size() != p.dim) throw std::invalid_argument("hyperplane weight length does not match dim");
  if (!p.w_after.empty() && p.w_after.size() != p.dim) {
    throw std::invalid_argument("post-drift weight length does not match dim");
  }
  if (p.drift_start > p.samples) throw std::invalid_argument("drift start beyond stream length");
  const std::vector<double>& w2 = p.w_after.empty() ? p.w : p.w_after;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  LabeledStream out;
  out.classes = 2;
  out.X.resize(static_cast<Eigen::Index>(p.samples), static_cast<Eigen::Index>(p.dim));
  out.labels.resize(p.samples);
  for (std::size_t i = 0; i < p.samples; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < p.dim; ++j) out.X(r, static_cast<Eigen::Index>(j)) = unit(rng);
    const bool second = unit(rng) < hyperplane_mixing_probability(i, p.drift_start, p.drift_span);
    const std::vector<double>& w = second ? w2 : p.w;
    double s = 0.0;
    for (std::size_t j = 0; j < p.dim; ++j) s += out.X(r, static_cast<Eigen::Index>(j)) * w[j];
    out.labels[i] = s > p.w0 ? 1 : 2;
  }
  return out;
}

StreamChunker::StreamChunker(LabeledStream stream, std::size_t chunk_size)
    : stream_(std::move(stream)), chunk_size_(chunk_size) {
  if (chunk_size_ == 0) throw std::invalid_argument("chunk size must be positive");
}

std::optional<DataChunk> StreamChunker::next() {
  if (cursor_ >= stream_.size()) return std::nullopt;
  const std::size_t end = std::min(cursor_ + chunk_size_, stream_.size());
  const auto b = static_cast<Eigen::Index>(cursor_);
  const auto rows = static_cast<Eigen::Index>(end - cursor_);
  std::vector<int> labels(stream_.labels.begin() + static_cast<std::ptrdiff_t>(cursor_),
                          stream_.labels.begin() + static_cast<std::ptrdiff_t>(end));
  cursor_ = end;
  return make_chunk(stream_.X.middleRows(b, rows), one_hot_encode(labels, stream_.classes),
                    ++stamp_);
}

CsvStream::CsvStream(std::string path, std::size_t chunk_size, int label_column)
    : path_(std::move(path)), chunk_size_(chunk_size) {
  if (chunk_size_ == 0) throw std::invalid_argument("chunk size must be positive");
  std::ifstream scan(path_);
  if (!scan) throw std::runtime_error("cannot open " + path_);

  // First pass: header detection, column count, label range.
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(scan, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto cells = split_commas(line);
    if (first) {
      first = false;
      columns_ = cells.size();
      if (columns_ < 2) throw std::runtime_error(path_ + ": need at least one feature and a label");
      const long lc = label_column < 0 ? static_cast<long>(columns_) + label_column : label_column;
      if (lc < 0 || lc >= static_cast<long>(columns_)) {
        throw std::invalid_argument("label column out of range");
      }
      label_col_ = static_cast<std::size_t>(lc);
      features_ = columns_ - 1;
      const bool numeric =
          std::all_of(cells.begin(), cells.end(), [](const std::string& c) { return parse_number(c).has_value(); });
      if (!numeric) {
        has_header_ = true;
        continue;
      }
    }
    if (cells.size() != columns_) {
      throw std::runtime_error(path_ + ": row " + std::to_string(line_no) + " has " +
                               std::to_string(cells.size()) + " columns, expected " +
                               std::to_string(columns_));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) {
        throw std::runtime_error(path_ + ": non-numeric cell at row " + std::to_string(line_no) +
                                 ", column " + std::to_string(c + 1));
      }
      if (c == label_col_) {
        if (*v != std::floor(*v) || *v < 1.0) {
          throw std::runtime_error(path_ + ": label at row " + std::to_string(line_no) +
                                   " must be an integer >= 1");
        }
        classes_ = std::max(classes_, static_cast<int>(*v));
      }
    }
    ++rows_;
  }
  if (rows_ == 0) throw std::runtime_error(path_ + ": no data rows");

  in_.open(path_);
  if (!in_) throw std::runtime_error("cannot reopen " + path_);
}

std::optional<CsvStream::Row> CsvStream::read_row() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (is_blank(line)) continue;
    if (has_header_) {
      has_header_ = false;
      continue;
    }
    const auto cells = split_commas(line);
    Row row;
    row.features.reserve(features_);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double v = *parse_number(cells[c]);  // validated in the first pass
      if (c == label_col_) {
        row.label = static_cast<int>(v);
      } else {
        row.features.push_back(v);
      }
    }
    return row;
  }
  return std::nullopt;
}

std::optional<DataChunk> CsvStream::next() {
  std::vector<Row> rows;
  rows.reserve(chunk_size_);
  while (rows.size() < chunk_size_) {
    auto row = read_row();
    if (!row) break;
    rows.push_back(std::move(*row));
  }
  if (rows.empty()) return std::nullopt;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(features_));
  std::vector<int> labels(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t j = 0; j < features_; ++j) {
      X(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = rows[t].features[j];
    }
    labels[t] = rows[t].label;
  }
  return make_chunk(std::move(X), one_hot_encode(labels, classes_), ++stamp_);
}

void write_csv(const LabeledStream& stream, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (Eigen::Index j = 0; j < stream.X.cols(); ++j) out << 'f' << (j + 1) << ',';
  out << "label\n";
  out.precision(17);
  for (std::size_t t = 0; t < stream.size(); ++t) {
    for (Eigen::Index j = 0; j < stream.X.cols(); ++j) {
      out << stream.X(static_cast<Eigen::Index>(t), j) << ',';
    }
    out << stream.labels[t] << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace dsscn
