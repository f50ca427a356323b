// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace csispace
{

struct LabeledSeries
{
  std::string label;
  std::vector<double> series; ///< slope |u| in dB, one value per tracker step
  double sample_rate = 0.0;   ///< Hz

  void validate() const;
};

struct DtwConfig
{
  double band_radius = 0.1; ///< Sakoe-Chiba radius as a fraction of the longer series
  std::size_t k = 3;

  void validate() const;
  /// Radius in samples for series of lengths n and m.
  std::size_t radius(std::size_t n, std::size_t m) const;
};

/// Band-constrained DTW with |a_i - b_j| local cost. Throws ContractError when
/// the band cannot connect (0, 0) to (n-1, m-1).
double dtw_distance(std::span<const double> a, std::span<const double> b, const DtwConfig& cfg);

/// Copy of the series with its median subtracted.
std::vector<double> remove_median(std::span<const double> series);

struct Prediction
{
  std::string label;
  double score = 0.0;         ///< fraction of the k neighbours voting for label
  double mean_distance = 0.0; ///< mean DTW distance of those voters
};

/// Majority vote of the k nearest training series (median-removed DTW).
/// Ties go to the label with the smallest mean neighbour distance.
Prediction knn_predict(std::span<const double> query, std::span<const LabeledSeries> train,
                       const DtwConfig& cfg);

/// Leave-one-out predictions over a corpus, in corpus order.
std::vector<std::string> leave_one_out(std::span<const LabeledSeries> corpus, const DtwConfig& cfg);

struct ConfusionMatrix
{
  std::vector<std::string> labels;      ///< sorted
  std::vector<std::vector<double>> rates; ///< rows = truth, columns = prediction, rows sum to 1
  std::vector<std::vector<std::size_t>> counts;

  double accuracy() const;
  std::string to_csv() const;
};

/// Row-normalized confusion matrix. Throws ContractError when lengths differ or
/// a prediction uses a label absent from the truths.
ConfusionMatrix confusion_matrix(std::span<const std::string> predictions,
                                 std::span<const std::string> truths);

// Corpus directory: one `<name>.series` text file per series,
//   # label: <label>
//   # sample_rate: <Hz>
//   <value>
//   ...
void write_corpus(const std::filesystem::path& dir, std::span<const LabeledSeries> corpus);
std::vector<LabeledSeries> read_corpus(const std::filesystem::path& dir);

} // namespace csispace
