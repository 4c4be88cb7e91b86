#include "risim/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "risim/rng.hpp"

namespace risim {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// Shared tail of evaluate() and metrics_from_rates_csv(): summary statistics
// and the common threshold CDF grid.
Metrics finalize_metrics(std::vector<std::pair<Approach, std::vector<double>>> rates) {
  require(!rates.empty() && rates[0].first == Approach::Exhaustive,
          "metrics: exhaustive rates must come first");
  Metrics metrics;
  const std::vector<double>& ex = rates[0].second;
  require(!ex.empty(), "metrics: no samples");
  double ex_mean = 0.0;
  for (double r : ex) ex_mean += r;
  ex_mean /= static_cast<double>(ex.size());
  require(ex_mean > 0.0, "metrics: degenerate exhaustive mean");

  double lo = rates[0].second[0], hi = rates[0].second[0];
  for (const auto& [a, rs] : rates) {
    require(rs.size() == ex.size(), "metrics: ragged rate vectors");
    for (double r : rs) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  if (hi > lo) {
    metrics.thresholds.resize(200);
    for (std::size_t k = 0; k < 200; ++k)
      metrics.thresholds[k] = lo + (hi - lo) * static_cast<double>(k) / 199.0;
  } else {
    metrics.thresholds = {lo};
  }

  for (auto& [a, rs] : rates) {
    ApproachMetrics am;
    am.approach = a;
    double mean = 0.0;
    for (double r : rs) mean += r;
    mean /= static_cast<double>(rs.size());
    am.mean_rate = mean;
    am.normalized = mean / ex_mean;
    am.outage5 = outage_rate(rs, 0.05);
    metrics.cdf.push_back(outage_cdf(rs, metrics.thresholds));
    am.rates = std::move(rs);
    metrics.per_approach.push_back(std::move(am));
  }
  return metrics;
}

}  // namespace

std::string to_string(Approach a) {
  switch (a) {
    case Approach::Exhaustive: return "exhaustive";
    case Approach::Random: return "random";
    case Approach::NoRis: return "no_ris";
    case Approach::PosCen: return "pos_cen";
    case Approach::PosInd: return "pos_ind";
    case Approach::ChanCen: return "chan_cen";
    case Approach::ChanInd: return "chan_ind";
    case Approach::PosFl: return "pos_fl";
    case Approach::ChanFl: return "chan_fl";
  }
  throw std::domain_error("approach: bad value");
}

Approach approach_from_string(const std::string& name) {
  for (Approach a : kAllApproaches)
    if (to_string(a) == name) return a;
  throw std::domain_error("approach: unknown name " + name);
}

bool is_trained(Approach a) {
  return a != Approach::Exhaustive && a != Approach::Random && a != Approach::NoRis;
}

bool is_federated(Approach a) { return a == Approach::PosFl || a == Approach::ChanFl; }

EncoderKind approach_encoder(Approach a) {
  switch (a) {
    case Approach::PosCen: return EncoderKind::PosCen;
    case Approach::PosInd:
    case Approach::PosFl: return EncoderKind::PosInd;
    case Approach::ChanCen: return EncoderKind::ChanCen;
    case Approach::ChanInd:
    case Approach::ChanFl: return EncoderKind::ChanInd;
    default: throw std::domain_error("approach: not a trained one");
  }
}

void ExperimentConfig::validate() const {
  setup.validate();
  clusters.validate();
  hyper.validate();
  require(n_train >= 1 && n_test >= 1, "config: sample counts must be positive");
  require(!approaches.empty(), "config: approach list empty");
  require(oracle_budget >= 1, "config: oracle budget must be positive");
  require(nn_dims_mode == "table2" || nn_dims_mode == "formula", "config: bad nn_dims_mode");
  for (Eigen::Index d : nn_hidden_cen) require(d >= 1, "config: bad hidden width");
  for (Eigen::Index d : nn_hidden_ind) require(d >= 1, "config: bad hidden width");
  require(fl_rounds >= 0 && fl_local_epochs >= 0, "config: bad fl schedule");
  require(std::isfinite(grid_width) && grid_width > 0.0, "config: bad grid width");
  require(std::isfinite(chan_log_floor), "config: bad log floor");
}

std::vector<Eigen::Index> ExperimentConfig::hidden_for(EncoderKind kind) const {
  if (nn_dims_mode == "table2")
    return is_centralized(kind) ? nn_hidden_cen : nn_hidden_ind;
  const std::size_t covered =
      (is_centralized(kind) ? setup.num_ris() : 1) * setup.elements_per_ris();
  const std::size_t out =
      (is_centralized(kind) ? setup.num_ris() : 1) * setup.groups_per_ris;
  return {static_cast<Eigen::Index>(3 * covered), static_cast<Eigen::Index>(3 * covered / 2),
          static_cast<Eigen::Index>(out)};
}

RxGrid ExperimentConfig::rx_grid() const {
  RxGrid grid;
  grid.center = grid_center_set ? grid_center : nominal_rx(setup);
  grid.width = grid_width;
  return grid;
}

const ApproachMetrics& Metrics::of(Approach a) const {
  for (const ApproachMetrics& am : per_approach)
    if (am.approach == a) return am;
  throw std::domain_error("metrics: approach not present: " + to_string(a));
}

std::vector<double> outage_cdf(std::span<const double> samples,
                               std::span<const double> thresholds) {
  require(!samples.empty(), "outage_cdf: empty samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out(thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), thresholds[i]);
    out[i] = static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
  }
  return out;
}

double outage_rate(std::span<const double> samples, double probability) {
  require(!samples.empty(), "outage_rate: empty samples");
  require(probability > 0.0 && probability < 1.0, "outage_rate: probability outside (0,1)");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = std::ceil(probability * static_cast<double>(sorted.size())) - 1.0;
  const std::size_t idx = static_cast<std::size_t>(std::max(0.0, pos));
  return sorted[std::min(idx, sorted.size() - 1)];
}

namespace {

// Raw (unnormalized) feature matrices per encoder kind and RIS, built lazily
// and shared by the approaches that use the same encoder.
class FeatureCache {
 public:
  FeatureCache(const Scene& scene, const Corpus& corpus, double log_floor)
      : scene_(scene), corpus_(corpus), log_floor_(log_floor) {}

  const Eigen::MatrixXd& raw(EncoderKind kind, std::size_t m) {
    const auto key = std::make_pair(static_cast<int>(kind), m);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const std::size_t n = corpus_.records.size();
    Eigen::MatrixXd x;
    for (std::size_t i = 0; i < n; ++i) {
      const CorpusRecord& rec = corpus_.records[i];
      const std::vector<double> feats =
          is_position(kind) ? encode_position(scene_, rec.rx, kind, m)
                            : encode_channel(rec.channels, kind, m, log_floor_);
      if (i == 0) x.resize(static_cast<Eigen::Index>(feats.size()), n);
      for (std::size_t j = 0; j < feats.size(); ++j)
        x(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = feats[j];
    }
    return cache_.emplace(key, std::move(x)).first->second;
  }

 private:
  const Scene& scene_;
  const Corpus& corpus_;
  double log_floor_;
  std::map<std::pair<int, std::size_t>, Eigen::MatrixXd> cache_;
};

Eigen::MatrixXd normalized_copy(const Eigen::MatrixXd& raw, const Normalization& norm) {
  require(static_cast<std::size_t>(raw.rows()) == norm.width(),
          "evaluate: normalization width mismatch");
  Eigen::MatrixXd x = raw;
  for (Eigen::Index j = 0; j < x.rows(); ++j)
    x.row(j) = (x.row(j).array() - norm.mean[j]) / norm.scale[j];
  return x;
}

std::vector<double> trained_rates(const TrainedApproach& ta, FeatureCache& cache,
                                  const Corpus& test, const std::vector<GroupMap>& maps,
                                  const Codebook& cb, double power, double noise) {
  const ApproachPredictor& ap = ta.predictor;
  ap.validate();
  const std::size_t n = test.records.size();
  const std::size_t num_ris = ap.num_ris;
  const std::size_t groups = ap.groups_per_ris;
  std::vector<PhaseConfig> cfgs(n, PhaseConfig::zeros(num_ris, groups));
  if (ap.nets.size() == 1 && is_centralized(ap.nets[0].kind)) {
    const Predictor& p = ap.nets[0];
    const Eigen::MatrixXd y =
        forward_batch(p.model, normalized_copy(cache.raw(p.kind, kAllRis), p.norm));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < num_ris * groups; ++j)
        cfgs[i].indices[j] = y(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) >= 0.0
                                 ? 0
                                 : 1;
  } else {
    for (std::size_t m = 0; m < num_ris; ++m) {
      const Predictor& p = ap.nets[m];
      const Eigen::MatrixXd y =
          forward_batch(p.model, normalized_copy(cache.raw(p.kind, m), p.norm));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < groups; ++j)
          cfgs[i].at(m, j) =
              y(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) >= 0.0 ? 0 : 1;
    }
  }
  std::vector<double> rates(n);
  for (std::size_t i = 0; i < n; ++i)
    rates[i] = achievable_rate(test.records[i].channels, cfgs[i], maps, cb, power, noise);
  return rates;
}

}  // namespace

Metrics evaluate(const ExperimentConfig& cfg, const Scene& scene,
                 const std::vector<GroupMap>& maps, const Codebook& cb, const Corpus& test,
                 const std::vector<LabelSet>& test_labels,
                 const std::vector<TrainedApproach>& trained) {
  const std::size_t n = test.records.size();
  require(n >= 1, "evaluate: empty test corpus");
  require(test_labels.size() == n, "evaluate: label count mismatch");
  const double power = cfg.setup.tx_power_watts;
  const double noise = cfg.setup.noise_watts();

  std::vector<std::pair<Approach, std::vector<double>>> rates;
  std::vector<double> ex(n), rnd(n), nor(n);
  for (std::size_t i = 0; i < n; ++i) {
    // re-evaluate the oracle config through the same accumulation path as every
    // other approach so per realization dominance is exact, not up to an ulp
    ex[i] = achievable_rate(test.records[i].channels, test_labels[i].joint.config, maps, cb,
                            power, noise);
    std::mt19937_64 rng = substream(cfg.seed, i, stream_tag::kRandomBaseline);
    const PhaseConfig rc = random_config(cfg.setup.num_ris(), cfg.setup.groups_per_ris, cb, rng);
    rnd[i] = achievable_rate(test.records[i].channels, rc, maps, cb, power, noise);
    nor[i] = no_ris_rate(test.records[i].channels, power, noise);
  }
  rates.emplace_back(Approach::Exhaustive, std::move(ex));
  rates.emplace_back(Approach::Random, std::move(rnd));
  rates.emplace_back(Approach::NoRis, std::move(nor));

  FeatureCache cache(scene, test, cfg.chan_log_floor);
  for (const TrainedApproach& ta : trained)
    rates.emplace_back(ta.approach, trained_rates(ta, cache, test, maps, cb, power, noise));

  return finalize_metrics(std::move(rates));
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Scene scene = build_scene(cfg.setup);
  const std::vector<GroupMap> maps = build_group_maps(cfg.setup);
  const Codebook cb = build_codebook(cfg.setup);
  const RxGrid grid = cfg.rx_grid();
  const double power = cfg.setup.tx_power_watts;
  const double noise = cfg.setup.noise_watts();

  RunResult out;
  const Corpus train_corpus = generate_corpus(scene, cfg.clusters, grid, cfg.n_train,
                                              PlacementMode::TrainGrid,
                                              derive_seed(cfg.seed, stream_tag::kTrainData));
  const Corpus test_corpus = generate_corpus(scene, cfg.clusters, grid, cfg.n_test,
                                             PlacementMode::TestUniform,
                                             derive_seed(cfg.seed, stream_tag::kTestData));
  double t0 = now_seconds();
  const std::vector<LabelSet> train_labels =
      label_corpus(train_corpus, maps, cb, power, noise, cfg.oracle_budget);
  const std::vector<LabelSet> test_labels =
      label_corpus(test_corpus, maps, cb, power, noise, cfg.oracle_budget);
  out.label_seconds = now_seconds() - t0;

  t0 = now_seconds();
  std::map<int, std::vector<Dataset>> train_sets;
  const auto sets_for = [&](EncoderKind kind) -> const std::vector<Dataset>& {
    auto it = train_sets.find(static_cast<int>(kind));
    if (it != train_sets.end()) return it->second;
    std::vector<Dataset> sets;
    if (is_centralized(kind)) {
      sets.push_back(make_dataset(scene, train_corpus, train_labels, kind, kAllRis, cb, nullptr,
                                  cfg.chan_log_floor));
    } else {
      for (std::size_t m = 0; m < cfg.setup.num_ris(); ++m)
        sets.push_back(
            make_dataset(scene, train_corpus, train_labels, kind, m, cb, nullptr,
                         cfg.chan_log_floor));
    }
    return train_sets.emplace(static_cast<int>(kind), std::move(sets)).first->second;
  };

  for (Approach a : kAllApproaches) {
    if (!is_trained(a)) continue;
    if (std::find(cfg.approaches.begin(), cfg.approaches.end(), a) == cfg.approaches.end())
      continue;
    const EncoderKind kind = approach_encoder(a);
    const std::vector<Dataset>& sets = sets_for(kind);
    const std::vector<Eigen::Index> hidden = cfg.hidden_for(kind);
    TrainResult res = is_federated(a)
                          ? train_federated(sets, hidden, cfg.fl_rounds, cfg.fl_local_epochs,
                                            cfg.hyper)
                          : train_variant(sets, hidden, cfg.hyper);
    TrainedApproach ta;
    ta.approach = a;
    ta.predictor = make_approach_predictor(sets, res.models, cfg.setup.num_ris(),
                                           cfg.setup.groups_per_ris, cfg.chan_log_floor);
    ta.loss_curves = std::move(res.loss_curves);
    out.trained.push_back(std::move(ta));
  }
  out.train_seconds = now_seconds() - t0;

  t0 = now_seconds();
  out.metrics = evaluate(cfg, scene, maps, cb, test_corpus, test_labels, out.trained);
  out.eval_seconds = now_seconds() - t0;
  return out;
}

void emit_results(const Metrics& metrics, const std::string& config_echo,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const auto open = [&](const char* name) {
    std::ofstream os(fs::path(out_dir) / name);
    if (!os) throw std::runtime_error(std::string("emit: cannot write ") + name + " in " + out_dir);
    return os;
  };

  {
    auto os = open("summary.csv");
    os << "approach,mean_rate,normalized_rate,outage5_rate\n";
    for (const ApproachMetrics& am : metrics.per_approach)
      os << to_string(am.approach) << ',' << fmt_double(am.mean_rate) << ','
         << fmt_double(am.normalized) << ',' << fmt_double(am.outage5) << '\n';
  }
  {
    auto os = open("rates.csv");
    os << "sample";
    for (const ApproachMetrics& am : metrics.per_approach) os << ',' << to_string(am.approach);
    for (const ApproachMetrics& am : metrics.per_approach)
      os << ',' << to_string(am.approach) << "_ratio";
    os << '\n';
    const std::vector<double>& ex = metrics.per_approach.front().rates;
    std::string line;
    for (std::size_t i = 0; i < ex.size(); ++i) {
      line = std::to_string(i);
      for (const ApproachMetrics& am : metrics.per_approach) {
        line += ',';
        line += fmt_double(am.rates[i]);
      }
      for (const ApproachMetrics& am : metrics.per_approach) {
        line += ',';
        line += fmt_double(ex[i] > 0.0 ? am.rates[i] / ex[i] : 1.0);
      }
      line += '\n';
      os << line;
    }
  }
  {
    auto os = open("cdf.csv");
    os << "threshold";
    for (const ApproachMetrics& am : metrics.per_approach) os << ',' << to_string(am.approach);
    os << '\n';
    for (std::size_t k = 0; k < metrics.thresholds.size(); ++k) {
      os << fmt_double(metrics.thresholds[k]);
      for (std::size_t a = 0; a < metrics.per_approach.size(); ++a)
        os << ',' << fmt_double(metrics.cdf[a][k]);
      os << '\n';
    }
  }
  {
    auto os = open("manifest.txt");
    os << "risim 1.0.0\n";
    os << config_echo;
  }
}

Metrics metrics_from_rates_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("report: cannot open " + path);
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("report: empty rates file");
  std::vector<Approach> order;
  {
    std::istringstream hs(header);
    std::string col;
    if (!std::getline(hs, col, ',') || col != "sample")
      throw std::runtime_error("report: bad rates header");
    while (std::getline(hs, col, ',')) {
      if (col.size() > 6 && col.substr(col.size() - 6) == "_ratio") break;
      order.push_back(approach_from_string(col));
    }
  }
  if (order.empty()) throw std::runtime_error("report: no approaches in rates file");
  std::vector<std::pair<Approach, std::vector<double>>> rates;
  for (Approach a : order) rates.emplace_back(a, std::vector<double>{});
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    if (!std::getline(ls, cell, ',')) throw std::runtime_error("report: bad rates row");
    for (auto& [a, rs] : rates) {
      if (!std::getline(ls, cell, ',')) throw std::runtime_error("report: short rates row");
      rs.push_back(std::stod(cell));
    }
  }
  return finalize_metrics(std::move(rates));
}

std::string render_summary(const Metrics& metrics) {
  std::ostringstream os;
  os << "approach     mean_rate  normalized  outage5\n";
  char buf[128];
  for (const ApproachMetrics& am : metrics.per_approach) {
    std::snprintf(buf, sizeof buf, "%-12s %9.4f  %10.4f  %7.4f\n", to_string(am.approach).c_str(),
                  am.mean_rate, am.normalized, am.outage5);
    os << buf;
  }
  return os.str();
}

}  // namespace risim
