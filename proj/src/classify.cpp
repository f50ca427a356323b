// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#include "csispace/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "csispace/csi_core.hpp"

namespace csispace
{

void LabeledSeries::validate() const
{
  if (label.empty())
    throw ContractError("labeled series: empty label");
  if (series.empty())
    throw ContractError("labeled series '" + label + "': empty series");
  for (double v : series)
    if (!std::isfinite(v))
      throw ContractError("labeled series '" + label + "': non-finite value");
}

void DtwConfig::validate() const
{
  if (!(band_radius > 0.0 && band_radius <= 1.0))
    throw ContractError("dtw: band radius must lie in (0, 1]");
  if (k < 1 || k % 2 == 0)
    throw ContractError("knn: k must be odd and >= 1");
}

std::size_t DtwConfig::radius(std::size_t n, std::size_t m) const
{
  return static_cast<std::size_t>(std::ceil(band_radius * static_cast<double>(std::max(n, m))));
}

double dtw_distance(std::span<const double> a, std::span<const double> b, const DtwConfig& cfg)
{
  if (!(cfg.band_radius > 0.0 && cfg.band_radius <= 1.0))
    throw ContractError("dtw: band radius must lie in (0, 1]");
  if (a.empty() || b.empty())
    throw ContractError("dtw: both series must be non-empty");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t w = cfg.radius(n, m);
  const std::size_t gap = n > m ? n - m : m - n;
  if (gap > w)
    throw ContractError(fmt::format("dtw: band radius {} cannot connect series of length {} and {}",
                                    w, n, m));

  constexpr double inf = std::numeric_limits<double>::infinity();
  // Two rolling rows over j = 0..m, column 0 is the virtual start.
  std::vector<double> prev(m + 1, inf);
  std::vector<double> curr(m + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i)
  {
    std::fill(curr.begin(), curr.end(), inf);
    const std::size_t lo = i > w ? i - w : 1;
    const std::size_t hi = std::min(m, i + w);
    for (std::size_t j = lo; j <= hi; ++j)
    {
      const double best = std::min({prev[j - 1], prev[j], curr[j - 1]});
      curr[j] = std::abs(a[i - 1] - b[j - 1]) + best;
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

std::vector<double> remove_median(std::span<const double> series)
{
  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  std::vector<double> out(series.begin(), series.end());
  for (double& v : out)
    v -= median;
  return out;
}

namespace
{
Prediction vote(const std::vector<std::pair<double, const LabeledSeries*>>& neighbours,
                std::size_t k)
{
  std::map<std::string, std::pair<std::size_t, double>> tally; // label -> (votes, distance sum)
  for (std::size_t i = 0; i < k; ++i)
  {
    auto& [votes, sum] = tally[neighbours[i].second->label];
    ++votes;
    sum += neighbours[i].first;
  }
  Prediction best;
  std::size_t best_votes = 0;
  for (const auto& [label, entry] : tally)
  {
    const double mean = entry.second / static_cast<double>(entry.first);
    if (entry.first > best_votes || (entry.first == best_votes && mean < best.mean_distance))
    {
      best_votes = entry.first;
      best.label = label;
      best.mean_distance = mean;
    }
  }
  best.score = static_cast<double>(best_votes) / static_cast<double>(k);
  return best;
}

Prediction knn_on_normalized(const std::vector<double>& query,
                             const std::vector<std::vector<double>>& train_norm,
                             std::span<const LabeledSeries> train, const DtwConfig& cfg,
                             std::size_t skip)
{
  std::vector<std::pair<double, const LabeledSeries*>> dist;
  dist.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    if (i != skip)
      dist.emplace_back(dtw_distance(query, train_norm[i], cfg), &train[i]);
  std::stable_sort(dist.begin(), dist.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  return vote(dist, cfg.k);
}
} // namespace

Prediction knn_predict(std::span<const double> query, std::span<const LabeledSeries> train,
                       const DtwConfig& cfg)
{
  cfg.validate();
  if (train.empty())
    throw ContractError("knn: training set is empty");
  if (cfg.k > train.size())
    throw ContractError(fmt::format("knn: k = {} exceeds training set size {}", cfg.k, train.size()));
  if (query.empty())
    throw ContractError("knn: query series is empty");

  std::vector<std::vector<double>> norm;
  norm.reserve(train.size());
  for (const auto& t : train)
  {
    t.validate();
    norm.push_back(remove_median(t.series));
  }
  return knn_on_normalized(remove_median(query), norm, train, cfg, train.size());
}

std::vector<std::string> leave_one_out(std::span<const LabeledSeries> corpus, const DtwConfig& cfg)
{
  cfg.validate();
  if (cfg.k + 1 > corpus.size())
    throw ContractError("leave_one_out: corpus too small for k");
  std::vector<std::vector<double>> norm;
  norm.reserve(corpus.size());
  for (const auto& s : corpus)
  {
    s.validate();
    norm.push_back(remove_median(s.series));
  }
  std::vector<std::string> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i)
    out.push_back(knn_on_normalized(norm[i], norm, corpus, cfg, i).label);
  return out;
}

double ConfusionMatrix::accuracy() const
{
  std::size_t hit = 0;
  std::size_t total = 0;
  for (std::size_t r = 0; r < counts.size(); ++r)
    for (std::size_t c = 0; c < counts[r].size(); ++c)
    {
      total += counts[r][c];
      if (r == c)
        hit += counts[r][c];
    }
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

std::string ConfusionMatrix::to_csv() const
{
  std::string out = "truth";
  for (const auto& l : labels)
    out += "," + l;
  out += "\n";
  for (std::size_t r = 0; r < labels.size(); ++r)
  {
    out += labels[r];
    for (double v : rates[r])
      out += fmt::format(",{:.6f}", v);
    out += "\n";
  }
  return out;
}

ConfusionMatrix confusion_matrix(std::span<const std::string> predictions,
                                 std::span<const std::string> truths)
{
  if (predictions.size() != truths.size())
    throw ContractError(fmt::format("confusion_matrix: {} predictions for {} truths",
                                    predictions.size(), truths.size()));
  if (truths.empty())
    throw ContractError("confusion_matrix: no samples");
  const std::set<std::string> truth_set(truths.begin(), truths.end());
  for (const auto& p : predictions)
    if (!truth_set.count(p))
      throw ContractError("confusion_matrix: predicted label '" + p + "' is not a truth label");

  ConfusionMatrix cm;
  cm.labels.assign(truth_set.begin(), truth_set.end());
  const std::size_t c = cm.labels.size();
  auto index = [&](const std::string& l) {
    return static_cast<std::size_t>(std::lower_bound(cm.labels.begin(), cm.labels.end(), l) -
                                    cm.labels.begin());
  };
  cm.counts.assign(c, std::vector<std::size_t>(c, 0));
  for (std::size_t i = 0; i < truths.size(); ++i)
    ++cm.counts[index(truths[i])][index(predictions[i])];
  cm.rates.assign(c, std::vector<double>(c, 0.0));
  for (std::size_t r = 0; r < c; ++r)
  {
    std::size_t row = 0;
    for (auto v : cm.counts[r])
      row += v;
    for (std::size_t col = 0; col < c; ++col)
      cm.rates[r][col] = static_cast<double>(cm.counts[r][col]) / static_cast<double>(row);
  }
  return cm;
}

void write_corpus(const std::filesystem::path& dir, std::span<const LabeledSeries> corpus)
{
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < corpus.size(); ++i)
  {
    const auto& s = corpus[i];
    s.validate();
    const auto path = dir / fmt::format("{:04d}_{}.series", i, s.label);
    std::ofstream out(path);
    if (!out)
      throw std::runtime_error("cannot write " + path.string());
    out << fmt::format("# label: {}\n# sample_rate: {}\n", s.label, s.sample_rate);
    for (double v : s.series)
      out << fmt::format("{}\n", v);
  }
}

std::vector<LabeledSeries> read_corpus(const std::filesystem::path& dir)
{
  if (!std::filesystem::is_directory(dir))
    throw ContractError("corpus: " + dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".series")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw ContractError("corpus: no .series files in " + dir.string());

  std::vector<LabeledSeries> out;
  for (const auto& path : files)
  {
    std::ifstream in(path);
    LabeledSeries s;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
      ++line_no;
      if (line.empty())
        continue;
      if (line[0] == '#')
      {
        const auto colon = line.find(':');
        if (colon == std::string::npos)
          continue;
        std::string key = line.substr(1, colon - 1);
        std::string value = line.substr(colon + 1);
        auto trim = [](std::string& t) {
          t.erase(0, t.find_first_not_of(" \t"));
          t.erase(t.find_last_not_of(" \t\r") + 1);
        };
        trim(key);
        trim(value);
        if (key == "label")
          s.label = value;
        else if (key == "sample_rate")
          s.sample_rate = std::stod(value);
        continue;
      }
      std::istringstream parse(line);
      double v = 0.0;
      if (!(parse >> v))
        throw ContractError(fmt::format("corpus: {}:{}: not a number", path.string(), line_no));
      s.series.push_back(v);
    }
    try
    {
      s.validate();
    }
    catch (const ContractError& e)
    {
      throw ContractError(path.string() + ": " + e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

} // namespace csispace
