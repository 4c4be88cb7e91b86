#include "risim/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "risim/rng.hpp"

namespace risim {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

void append_double(std::string& line, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, res.ptr);
}

double read_double(std::istream& is, const char* what) {
  double v = 0.0;
  if (!(is >> v)) throw std::runtime_error(std::string("parse: truncated ") + what);
  if (!std::isfinite(v)) throw std::runtime_error(std::string("parse: non finite ") + what);
  return v;
}

long long read_int(std::istream& is, const char* what) {
  long long v = 0;
  if (!(is >> v)) throw std::runtime_error(std::string("parse: truncated ") + what);
  return v;
}

void expect_tag(std::istream& is, const char* tag) {
  std::string tok;
  if (!(is >> tok) || tok != tag)
    throw std::runtime_error(std::string("parse: expected ") + tag);
}

void expect_end(std::istream& is, const char* what) {
  std::string tok;
  if (is >> tok) throw std::runtime_error(std::string("parse: trailing data in ") + what);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return is;
}

void write_oracle_result(std::string& line, const OracleResult& r) {
  append_double(line, r.rate);
  line += ' ';
  append_double(line, r.gain.real());
  line += ' ';
  append_double(line, r.gain.imag());
  for (int f : r.config.indices) {
    line += ' ';
    line += std::to_string(f);
  }
}

OracleResult read_oracle_result(std::istream& is, std::size_t num_ris, std::size_t groups) {
  OracleResult r;
  r.rate = read_double(is, "label rate");
  const double re = read_double(is, "label gain");
  const double im = read_double(is, "label gain");
  r.gain = {re, im};
  r.config = PhaseConfig::zeros(num_ris, groups);
  for (int& f : r.config.indices) f = static_cast<int>(read_int(is, "label index"));
  return r;
}

}  // namespace

void Normalization::apply(std::span<double> x) const {
  require(x.size() == mean.size(), "normalization: width mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (x[i] - mean[i]) / scale[i];
}

void Normalization::unapply(std::span<double> x) const {
  require(x.size() == mean.size(), "normalization: width mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = x[i] * scale[i] + mean[i];
}

Normalization compute_normalization(const std::vector<Sample>& samples) {
  require(!samples.empty(), "normalization: no samples");
  const std::size_t w = samples[0].features.size();
  Normalization norm;
  norm.mean.assign(w, 0.0);
  norm.scale.assign(w, 0.0);
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (const Sample& s : samples) {
    require(s.features.size() == w, "normalization: ragged features");
    for (std::size_t i = 0; i < w; ++i) norm.mean[i] += s.features[i];
  }
  for (std::size_t i = 0; i < w; ++i) norm.mean[i] *= inv;
  for (const Sample& s : samples)
    for (std::size_t i = 0; i < w; ++i) {
      const double d = s.features[i] - norm.mean[i];
      norm.scale[i] += d * d;
    }
  for (std::size_t i = 0; i < w; ++i) {
    const double sd = std::sqrt(norm.scale[i] * inv);
    norm.scale[i] = sd > 1e-9 * (1.0 + std::abs(norm.mean[i])) ? sd : 1.0;
  }
  return norm;
}

void Dataset::validate() const {
  require(feature_width > 0 && target_width > 0, "dataset: zero widths");
  require(is_centralized(kind) == (ris_index == kAllRis), "dataset: ris index vs kind mismatch");
  require(norm.mean.size() == feature_width && norm.scale.size() == feature_width,
          "dataset: normalization width mismatch");
  for (double s : norm.scale) require(std::isfinite(s) && s > 0.0, "dataset: bad scale");
  for (double m : norm.mean) require(std::isfinite(m), "dataset: bad mean");
  for (const Sample& s : samples) {
    require(s.features.size() == feature_width, "dataset: feature width mismatch");
    require(s.target.size() == target_width && s.label.size() == target_width,
            "dataset: target width mismatch");
  }
}

Vec3 RxGrid::point(std::size_t i) const {
  require(i < 9, "grid: point index out of range");
  const double offs[3] = {-width / 2.0, 0.0, width / 2.0};
  return center + Vec3{offs[i / 3], offs[i % 3], 0.0};
}

Vec3 RxGrid::uniform(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(-width / 2.0, width / 2.0);
  const double dx = u(rng);
  const double dy = u(rng);
  return center + Vec3{dx, dy, 0.0};
}

Corpus generate_corpus(const Scene& scene, const ClusterConfig& clusters, const RxGrid& grid,
                       std::size_t n, PlacementMode mode, std::uint64_t seed) {
  require(n >= 1, "corpus: need at least one record");
  scene.validate();
  clusters.validate();
  Corpus corpus;
  corpus.records.resize(n);
  Scene local = scene;
  for (std::size_t i = 0; i < n; ++i) {
    CorpusRecord& rec = corpus.records[i];
    rec.index = i;
    if (mode == PlacementMode::TrainGrid) {
      rec.rx = grid.point(i % 9);
    } else {
      std::mt19937_64 rng = substream(seed, i, stream_tag::kRxPosition);
      rec.rx = grid.uniform(rng);
    }
    local.rx = rec.rx;
    rec.channels = sample_realization(local, clusters, seed, i);
  }
  return corpus;
}

std::vector<LabelSet> label_corpus(const Corpus& corpus, const std::vector<GroupMap>& maps,
                                   const Codebook& cb, double tx_power_watts, double noise_watts,
                                   std::uint64_t budget) {
  std::vector<LabelSet> labels(corpus.records.size());
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const ChannelRealization& r = corpus.records[i].channels;
    LabelSet& ls = labels[i];
    ls.joint = exhaustive_joint(r, maps, cb, tx_power_watts, noise_watts, budget);
    ls.per_ris.resize(maps.size());
    for (std::size_t m = 0; m < maps.size(); ++m)
      ls.per_ris[m] =
          exhaustive_per_ris(r.h[m], r.g[m], maps[m], cb, tx_power_watts, noise_watts, budget);
  }
  return labels;
}

Dataset make_dataset(const Scene& scene, const Corpus& corpus,
                     const std::vector<LabelSet>& labels, EncoderKind kind, std::size_t m,
                     const Codebook& cb, const Normalization* reuse_norm, double log_floor) {
  require(labels.size() == corpus.records.size(), "dataset: label count mismatch");
  require(!corpus.records.empty(), "dataset: empty corpus");
  Dataset ds;
  ds.kind = kind;
  ds.ris_index = is_centralized(kind) ? kAllRis : m;
  ds.samples.resize(corpus.records.size());
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const CorpusRecord& rec = corpus.records[i];
    Sample& s = ds.samples[i];
    s.index = rec.index;
    s.rx = rec.rx;
    s.features = is_position(kind) ? encode_position(scene, rec.rx, kind, m)
                                   : encode_channel(rec.channels, kind, m, log_floor);
    const PhaseConfig& cfg =
        is_centralized(kind) ? labels[i].joint.config : labels[i].per_ris.at(m).config;
    s.label = cfg.indices;
    s.target = encode_label_slice(s.label, cb);
    // Joint 1-bit labels come in near-degenerate +- pairs (only the direct
    // link separates a config from its global flip), which drags per-bit
    // regression towards zero. Fold the training target onto the
    // first-bit-positive representative; the flip stays inside the codebook,
    // so decoded outputs remain feasible, and the stored label keeps the
    // oracle's own choice.
    if (is_centralized(kind) && cb.bits == 1 && s.label[0] == 1)
      for (double& v : s.target) v = -v;
  }
  ds.feature_width = ds.samples[0].features.size();
  ds.target_width = ds.samples[0].target.size();
  if (reuse_norm) {
    require(reuse_norm->width() == ds.feature_width, "dataset: reused normalization mismatch");
    ds.norm = *reuse_norm;
  } else {
    ds.norm = compute_normalization(ds.samples);
  }
  ds.validate();
  return ds;
}

Dataset generate_dataset(const Scene& scene, const ClusterConfig& clusters, const RxGrid& grid,
                         std::size_t n, PlacementMode mode, EncoderKind kind, std::size_t m,
                         const std::vector<GroupMap>& maps, const Codebook& cb,
                         double tx_power_watts, double noise_watts, std::uint64_t seed,
                         std::uint64_t budget) {
  const Corpus corpus = generate_corpus(scene, clusters, grid, n, mode, seed);
  const std::vector<LabelSet> labels =
      label_corpus(corpus, maps, cb, tx_power_watts, noise_watts, budget);
  return make_dataset(scene, corpus, labels, kind, m, cb, nullptr, kDefaultLogFloor);
}

void save_corpus(const Corpus& corpus, std::ostream& os) {
  require(!corpus.records.empty(), "corpus: nothing to save");
  const std::size_t num_ris = corpus.records[0].channels.h.size();
  os << "RISCORPUS v1\n" << corpus.records.size() << ' ' << num_ris;
  for (std::size_t m = 0; m < num_ris; ++m) os << ' ' << corpus.records[0].channels.h[m].size();
  os << '\n';
  std::string line;
  for (const CorpusRecord& rec : corpus.records) {
    line.clear();
    line += std::to_string(rec.index);
    for (double v : {rec.rx.x, rec.rx.y, rec.rx.z}) {
      line += ' ';
      append_double(line, v);
    }
    for (const auto* block : {&rec.channels.h, &rec.channels.g}) {
      for (const std::vector<cd>& link : *block) {
        for (cd z : link) {
          line += ' ';
          append_double(line, z.real());
          line += ' ';
          append_double(line, z.imag());
        }
      }
    }
    line += ' ';
    append_double(line, rec.channels.h0.real());
    line += ' ';
    append_double(line, rec.channels.h0.imag());
    line += '\n';
    os << line;
  }
  if (!os) throw std::runtime_error("corpus: write failed");
}

Corpus load_corpus(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (header != "RISCORPUS v1") throw std::runtime_error("corpus: bad header");
  const long long n = read_int(is, "record count");
  const long long num_ris = read_int(is, "ris count");
  if (n < 1 || num_ris < 1) throw std::runtime_error("corpus: bad counts");
  std::vector<std::size_t> k(num_ris);
  for (auto& v : k) v = static_cast<std::size_t>(read_int(is, "element count"));
  Corpus corpus;
  corpus.records.resize(n);
  for (CorpusRecord& rec : corpus.records) {
    rec.index = static_cast<std::size_t>(read_int(is, "record index"));
    rec.rx.x = read_double(is, "rx");
    rec.rx.y = read_double(is, "rx");
    rec.rx.z = read_double(is, "rx");
    rec.channels.h.resize(num_ris);
    rec.channels.g.resize(num_ris);
    for (auto* block : {&rec.channels.h, &rec.channels.g}) {
      for (long long m = 0; m < num_ris; ++m) {
        (*block)[m].resize(k[m]);
        for (cd& z : (*block)[m]) {
          const double re = read_double(is, "coefficient");
          const double im = read_double(is, "coefficient");
          z = {re, im};
        }
      }
    }
    const double re = read_double(is, "h0");
    const double im = read_double(is, "h0");
    rec.channels.h0 = {re, im};
  }
  expect_end(is, "corpus");
  return corpus;
}

void save_labels(const std::vector<LabelSet>& labels, std::ostream& os) {
  require(!labels.empty(), "labels: nothing to save");
  const std::size_t num_ris = labels[0].per_ris.size();
  const std::size_t groups = labels[0].joint.config.groups_per_ris;
  os << "RISLABELS v1\n" << labels.size() << ' ' << num_ris << ' ' << groups << '\n';
  std::string line;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i].per_ris.size() == num_ris, "labels: ragged per ris list");
    line.clear();
    line += std::to_string(i);
    line += ' ';
    write_oracle_result(line, labels[i].joint);
    for (const OracleResult& r : labels[i].per_ris) {
      line += ' ';
      write_oracle_result(line, r);
    }
    line += '\n';
    os << line;
  }
  if (!os) throw std::runtime_error("labels: write failed");
}

std::vector<LabelSet> load_labels(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (header != "RISLABELS v1") throw std::runtime_error("labels: bad header");
  const long long n = read_int(is, "label count");
  const long long num_ris = read_int(is, "ris count");
  const long long groups = read_int(is, "group count");
  if (n < 1 || num_ris < 1 || groups < 1) throw std::runtime_error("labels: bad counts");
  std::vector<LabelSet> labels(n);
  for (long long i = 0; i < n; ++i) {
    const long long idx = read_int(is, "label index");
    if (idx != i) throw std::runtime_error("labels: record out of order");
    labels[i].joint = read_oracle_result(is, num_ris, groups);
    labels[i].per_ris.resize(num_ris);
    for (long long m = 0; m < num_ris; ++m)
      labels[i].per_ris[m] = read_oracle_result(is, 1, groups);
  }
  expect_end(is, "labels");
  return labels;
}

void save_dataset(const Dataset& ds, std::ostream& os) {
  ds.validate();
  require(!ds.samples.empty(), "dataset: nothing to save");
  os << "RISDATASET v1 " << to_string(ds.kind) << ' ';
  if (ds.ris_index == kAllRis)
    os << '-';
  else
    os << ds.ris_index;
  os << ' ' << ds.samples.size() << ' ' << ds.feature_width << ' ' << ds.target_width << '\n';
  std::string line = "norm_mean";
  for (double v : ds.norm.mean) {
    line += ' ';
    append_double(line, v);
  }
  line += "\nnorm_scale";
  for (double v : ds.norm.scale) {
    line += ' ';
    append_double(line, v);
  }
  line += '\n';
  os << line;
  char buf[64];
  for (const Sample& s : ds.samples) {
    line.clear();
    line += std::to_string(s.index);
    std::snprintf(buf, sizeof buf, " %.3f %.3f %.3f", s.rx.x, s.rx.y, s.rx.z);
    line += buf;
    for (double v : s.features) {
      line += ' ';
      append_double(line, v);
    }
    for (double v : s.target) {
      line += ' ';
      append_double(line, v);
    }
    for (int v : s.label) {
      line += ' ';
      line += std::to_string(v);
    }
    line += '\n';
    os << line;
  }
  if (!os) throw std::runtime_error("dataset: write failed");
}

Dataset load_dataset(std::istream& is) {
  expect_tag(is, "RISDATASET");
  expect_tag(is, "v1");
  std::string kind_name, ris_field;
  if (!(is >> kind_name >> ris_field)) throw std::runtime_error("dataset: bad header");
  Dataset ds;
  ds.kind = encoder_from_string(kind_name);
  if (ris_field == "-") {
    ds.ris_index = kAllRis;
  } else {
    ds.ris_index = static_cast<std::size_t>(std::stoull(ris_field));
  }
  const long long n = read_int(is, "sample count");
  const long long fw = read_int(is, "feature width");
  const long long tw = read_int(is, "target width");
  if (n < 1 || fw < 1 || tw < 1) throw std::runtime_error("dataset: bad counts");
  ds.feature_width = static_cast<std::size_t>(fw);
  ds.target_width = static_cast<std::size_t>(tw);
  expect_tag(is, "norm_mean");
  ds.norm.mean.resize(fw);
  for (double& v : ds.norm.mean) v = read_double(is, "norm mean");
  expect_tag(is, "norm_scale");
  ds.norm.scale.resize(fw);
  for (double& v : ds.norm.scale) v = read_double(is, "norm scale");
  ds.samples.resize(n);
  for (Sample& s : ds.samples) {
    s.index = static_cast<std::size_t>(read_int(is, "sample index"));
    s.rx.x = read_double(is, "rx");
    s.rx.y = read_double(is, "rx");
    s.rx.z = read_double(is, "rx");
    s.features.resize(fw);
    for (double& v : s.features) v = read_double(is, "feature");
    s.target.resize(tw);
    for (double& v : s.target) v = read_double(is, "target");
    s.label.resize(tw);
    for (int& v : s.label) v = static_cast<int>(read_int(is, "label"));
  }
  expect_end(is, "dataset");
  ds.validate();
  return ds;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  auto os = open_out(path);
  save_corpus(corpus, os);
}

Corpus load_corpus(const std::string& path) {
  auto is = open_in(path);
  return load_corpus(is);
}

void save_labels(const std::vector<LabelSet>& labels, const std::string& path) {
  auto os = open_out(path);
  save_labels(labels, os);
}

std::vector<LabelSet> load_labels(const std::string& path) {
  auto is = open_in(path);
  return load_labels(is);
}

void save_dataset(const Dataset& ds, const std::string& path) {
  auto os = open_out(path);
  save_dataset(ds, os);
}

Dataset load_dataset(const std::string& path) {
  auto is = open_in(path);
  return load_dataset(is);
}

}  // namespace risim
