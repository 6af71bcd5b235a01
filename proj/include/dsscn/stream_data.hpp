#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dsscn {

/// A time-stamped batch of samples. Rows of X are feature vectors; rows of Y
/// (when present) are one-hot class indicators.
struct DataChunk {
  Eigen::MatrixXd X;
  std::optional<Eigen::MatrixXd> Y;
  std::size_t stamp = 0;

  std::size_t size() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t features() const { return static_cast<std::size_t>(X.cols()); }
  std::size_t classes() const { return Y ? static_cast<std::size_t>(Y->cols()) : 0; }
  bool labeled() const { return Y.has_value(); }

  /// Rows [begin, end) as a new chunk with the same stamp.
  DataChunk slice(std::size_t begin, std::size_t end) const;
};

/// Builds a chunk and checks its invariants: N >= 1, finite X, one-hot rows.
/// Throws std::invalid_argument on violation.
DataChunk make_chunk(Eigen::MatrixXd X, std::optional<Eigen::MatrixXd> Y, std::size_t stamp);

/// Concatenates the rows of two chunks. Both must agree on shape and labeling.
DataChunk concat_chunks(const DataChunk& head, const DataChunk& tail);

/// One-hot encoding of 1-based labels. Throws std::out_of_range naming the
/// offending index when a label falls outside [1, m].
Eigen::MatrixXd one_hot_encode(const std::vector<int>& labels, int m);

/// 0-based class index of each one-hot row.
std::vector<int> class_indices(const Eigen::MatrixXd& Y);

/// Fully materialized labeled stream (labels are 1-based).
struct LabeledStream {
  Eigen::MatrixXd X;
  std::vector<int> labels;
  int classes = 0;

  std::size_t size() const { return labels.size(); }
};

struct ThetaSwitch {
  std::size_t start = 0;
  double theta = 0.0;
};

/// SEA concepts: f1, f2, f3 ~ U[0, 10], class 1 iff f1 + f2 < theta where
/// theta is the schedule entry active at the sample index. f3 is noise.
/// With `minority_fraction` set, class-1 (or class-2) samples are rejected so
/// that class 1 makes up that fraction in expectation.
LabeledStream generate_sea(std::size_t samples, const std::vector<ThetaSwitch>& schedule,
                           std::optional<double> minority_fraction, std::uint64_t seed);

/// Alternating 4 -> 7 -> 4 -> ... schedule switching every `every` samples.
std::vector<ThetaSwitch> sea_recurring_schedule(std::size_t samples, std::size_t every);

/// Class-1 probability of the SEA rule at threshold theta.
double sea_class1_probability(double theta);

struct HyperplaneParams {
  std::size_t samples = 0;
  std::size_t dim = 2;
  std::vector<double> w;
  double w0 = 0.0;
  std::size_t drift_start = 0;
  std::size_t drift_span = 0;
  std::vector<double> w_after;
};

/// Rotating-hyperplane stream: x ~ U[0,1]^dim, class 1 iff sum x_i w_i > w0.
/// Inside [drift_start, drift_start + drift_span) each sample comes from the
/// second concept with probability rising linearly from 0 to 1.
LabeledStream generate_hyperplane(const HyperplaneParams& params, std::uint64_t seed);

/// Probability that sample `index` is drawn from the second concept.
double hyperplane_mixing_probability(std::size_t index, std::size_t drift_start,
                                     std::size_t drift_span);

/// Something that yields DataChunks in stream order.
class ChunkSource {
 public:
  virtual ~ChunkSource() = default;
  virtual std::optional<DataChunk> next() = 0;
  virtual std::size_t features() const = 0;
  virtual int classes() const = 0;
};

/// Chunks an in-memory labeled stream.
class StreamChunker final : public ChunkSource {
 public:
  StreamChunker(LabeledStream stream, std::size_t chunk_size);

  std::optional<DataChunk> next() override;
  std::size_t features() const override { return static_cast<std::size_t>(stream_.X.cols()); }
  int classes() const override { return stream_.classes; }

 private:
  LabeledStream stream_;
  std::size_t chunk_size_;
  std::size_t cursor_ = 0;
  std::size_t stamp_ = 0;
};

/// Reads a comma-separated file in chunks. A leading non-numeric row is taken
/// as a header. The label column (negative counts from the end, default last)
/// must hold integers >= 1; the class count is the largest label in the file.
class CsvStream final : public ChunkSource {
 public:
  CsvStream(std::string path, std::size_t chunk_size, int label_column = -1);

  std::optional<DataChunk> next() override;
  std::size_t features() const override { return features_; }
  int classes() const override { return classes_; }
  std::size_t rows() const { return rows_; }

 private:
  struct Row {
    std::vector<double> features;
    int label = 0;
  };
  std::optional<Row> read_row();

  std::string path_;
  std::size_t chunk_size_;
  std::size_t label_col_ = 0;
  std::size_t columns_ = 0;
  std::size_t features_ = 0;
  int classes_ = 0;
  std::size_t rows_ = 0;
  bool has_header_ = false;
  std::ifstream in_;
  std::size_t line_no_ = 0;
  std::size_t stamp_ = 0;
};

/// Writes a labeled stream as CSV with header f1..fn,label.
void write_csv(const LabeledStream& stream, const std::string& path);

}  // namespace dsscn
