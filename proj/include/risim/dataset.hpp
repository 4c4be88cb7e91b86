#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "risim/encoders.hpp"
#include "risim/oracle.hpp"

namespace risim {

struct Sample {
  std::size_t index = 0;
  Vec3 rx;
  std::vector<double> features;
  std::vector<double> target;
  std::vector<int> label;  // codebook indices, same layout as target
};

// Per feature standardization fitted on the training split. Zero variance
// features keep scale 1 so they pass through centered but unscaled.
struct Normalization {
  std::vector<double> mean;
  std::vector<double> scale;

  bool empty() const { return mean.empty(); }
  std::size_t width() const { return mean.size(); }
  void apply(std::span<double> x) const;
  void unapply(std::span<double> x) const;
};

Normalization compute_normalization(const std::vector<Sample>& samples);

struct Dataset {
  EncoderKind kind = EncoderKind::PosCen;
  std::size_t ris_index = kAllRis;  // kAllRis on centralized encoders
  std::size_t feature_width = 0;
  std::size_t target_width = 0;
  std::vector<Sample> samples;
  Normalization norm;

  void validate() const;
};

// Raw realizations with their RX placements, before labeling.
struct CorpusRecord {
  std::size_t index = 0;
  Vec3 rx;
  ChannelRealization channels;
};

struct Corpus {
  std::vector<CorpusRecord> records;
};

// Training placements cycle the 3x3 grid (corners at +-width/2, row major in
// x then y); test placements are uniform in the square.
struct RxGrid {
  Vec3 center;
  double width = 4.0;

  Vec3 point(std::size_t i) const;
  Vec3 uniform(std::mt19937_64& rng) const;
};

enum class PlacementMode { TrainGrid, TestUniform };

Corpus generate_corpus(const Scene& scene, const ClusterConfig& clusters, const RxGrid& grid,
                       std::size_t n, PlacementMode mode, std::uint64_t seed);

// Joint label (direct link included) and per RIS labels (direct link excluded).
struct LabelSet {
  OracleResult joint;
  std::vector<OracleResult> per_ris;
};

std::vector<LabelSet> label_corpus(const Corpus& corpus, const std::vector<GroupMap>& maps,
                                   const Codebook& cb, double tx_power_watts, double noise_watts,
                                   std::uint64_t budget = kDefaultOracleBudget);

// Encode a labeled corpus for one learning variant. Pass the training split's
// normalization via reuse_norm for test datasets; otherwise it is fitted here.
Dataset make_dataset(const Scene& scene, const Corpus& corpus,
                     const std::vector<LabelSet>& labels, EncoderKind kind, std::size_t m,
                     const Codebook& cb, const Normalization* reuse_norm = nullptr,
                     double log_floor = kDefaultLogFloor);

Dataset generate_dataset(const Scene& scene, const ClusterConfig& clusters, const RxGrid& grid,
                         std::size_t n, PlacementMode mode, EncoderKind kind, std::size_t m,
                         const std::vector<GroupMap>& maps, const Codebook& cb,
                         double tx_power_watts, double noise_watts, std::uint64_t seed,
                         std::uint64_t budget = kDefaultOracleBudget);

void save_corpus(const Corpus& corpus, std::ostream& os);
void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(std::istream& is);
Corpus load_corpus(const std::string& path);

void save_labels(const std::vector<LabelSet>& labels, std::ostream& os);
void save_labels(const std::vector<LabelSet>& labels, const std::string& path);
std::vector<LabelSet> load_labels(std::istream& is);
std::vector<LabelSet> load_labels(const std::string& path);

void save_dataset(const Dataset& ds, std::ostream& os);
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(std::istream& is);
Dataset load_dataset(const std::string& path);

}  // namespace risim
