#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "risim/config.hpp"
#include "risim/rng.hpp"

namespace fs = std::filesystem;
using namespace risim;

namespace {

struct CommonFlags {
  int setup = 0;
  std::string approaches;
  std::uint64_t seed = 0;
  long long n_train = -1;
  long long n_test = -1;
  std::string config_path;
  std::string out_dir = "out";
  std::string nn_dims;
  long long oracle_budget = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--setup", f.setup, "Table preset 1, 2, or 3")->check(CLI::Range(1, 3));
  cmd->add_option("--approach", f.approaches,
                  "Comma separated approaches (or 'all'): exhaustive, random, no_ris, pos_cen, "
                  "pos_ind, chan_cen, chan_ind, pos_fl, chan_fl");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--n-train", f.n_train, "Training samples")->check(CLI::PositiveNumber);
  cmd->add_option("--n-test", f.n_test, "Test samples")->check(CLI::PositiveNumber);
  cmd->add_option("--config", f.config_path, "key=value config file");
  cmd->add_option("--out", f.out_dir, "Run directory for artifacts");
  cmd->add_option("--nn-dims", f.nn_dims, "Hidden layer widths, comma separated");
  cmd->add_option("--oracle-budget", f.oracle_budget,
                  "Refuse exhaustive searches above this many candidates");
}

// defaults, then the config file (explicit --config, else <out>/run_config.txt
// if present), then command line flags.
ExperimentConfig build_config(const CLI::App* cmd, const CommonFlags& f) {
  ExperimentConfig cfg;
  std::string path = f.config_path;
  if (path.empty()) {
    const fs::path saved = fs::path(f.out_dir) / "run_config.txt";
    if (fs::exists(saved)) path = saved.string();
  }
  if (!path.empty()) apply_config_file(cfg, path);
  if (cmd->count("--setup")) apply_config_key(cfg, "setup", std::to_string(f.setup));
  if (cmd->count("--seed")) apply_config_key(cfg, "seed", std::to_string(f.seed));
  if (cmd->count("--n-train")) apply_config_key(cfg, "n_train", std::to_string(f.n_train));
  if (cmd->count("--n-test")) apply_config_key(cfg, "n_test", std::to_string(f.n_test));
  if (cmd->count("--approach")) apply_config_key(cfg, "approaches", f.approaches);
  if (cmd->count("--oracle-budget"))
    apply_config_key(cfg, "oracle_budget", std::to_string(f.oracle_budget));
  if (cmd->count("--nn-dims")) {
    apply_config_key(cfg, "nn_hidden_cen", f.nn_dims);
    apply_config_key(cfg, "nn_hidden_ind", f.nn_dims);
  }
  cfg.validate();
  return cfg;
}

fs::path in_out(const CommonFlags& f, const char* name) { return fs::path(f.out_dir) / name; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

Corpus load_corpus_at(const CommonFlags& f, const char* name) {
  const fs::path path = in_out(f, name);
  if (!fs::exists(path))
    throw std::runtime_error(path.string() + " not found (run gen-data first)");
  return load_corpus(path.string());
}

std::vector<LabelSet> load_labels_at(const CommonFlags& f, const char* name) {
  const fs::path path = in_out(f, name);
  if (!fs::exists(path)) throw std::runtime_error(path.string() + " not found (run label first)");
  return load_labels(path.string());
}

std::vector<Approach> requested_trained(const ExperimentConfig& cfg) {
  std::vector<Approach> out;
  for (Approach a : kAllApproaches) {
    if (!is_trained(a)) continue;
    for (Approach b : cfg.approaches)
      if (a == b) {
        out.push_back(a);
        break;
      }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> predictor_paths(const CommonFlags& f, Approach a,
                                                                 std::size_t num_ris) {
  std::vector<std::pair<std::string, std::string>> out;
  const std::string base = to_string(a);
  if (is_centralized(approach_encoder(a))) {
    out.emplace_back(in_out(f, (base + ".ckpt").c_str()).string(),
                     in_out(f, (base + ".norm").c_str()).string());
    return out;
  }
  for (std::size_t m = 0; m < num_ris; ++m) {
    const std::string stem = base + "_ris" + std::to_string(m);
    out.emplace_back(in_out(f, (stem + ".ckpt").c_str()).string(),
                     in_out(f, (stem + ".norm").c_str()).string());
  }
  return out;
}

void save_loss_csv(const fs::path& path, const std::vector<std::vector<double>>& curves) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "epoch";
  if (curves.size() == 1) {
    os << ",loss";
  } else {
    for (std::size_t m = 0; m < curves.size(); ++m) os << ",ris" << m << "_loss";
  }
  os << '\n';
  const std::size_t epochs = curves.empty() ? 0 : curves[0].size();
  char buf[32];
  for (std::size_t e = 0; e < epochs; ++e) {
    os << e;
    for (const std::vector<double>& curve : curves) {
      std::snprintf(buf, sizeof buf, "%.12g", curve[e]);
      os << ',' << buf;
    }
    os << '\n';
  }
}

void save_trained(const CommonFlags& f, const TrainedApproach& ta) {
  const auto paths = predictor_paths(f, ta.approach, ta.predictor.num_ris);
  for (std::size_t i = 0; i < paths.size(); ++i)
    save_predictor(ta.predictor.nets[i], paths[i].first, paths[i].second);
  save_loss_csv(in_out(f, (to_string(ta.approach) + "_loss.csv").c_str()), ta.loss_curves);
}

TrainedApproach load_trained(const CommonFlags& f, const ExperimentConfig& cfg, Approach a) {
  TrainedApproach ta;
  ta.approach = a;
  ta.predictor.num_ris = cfg.setup.num_ris();
  ta.predictor.groups_per_ris = cfg.setup.groups_per_ris;
  for (const auto& [ckpt, norm] : predictor_paths(f, a, cfg.setup.num_ris())) {
    if (!fs::exists(ckpt))
      throw std::runtime_error(ckpt + " not found (train " + to_string(a) + " first)");
    ta.predictor.nets.push_back(load_predictor(ckpt, norm));
  }
  ta.predictor.validate();
  return ta;
}

int cmd_gen_data(const CLI::App* cmd, const CommonFlags& f) {
  const ExperimentConfig cfg = build_config(cmd, f);
  fs::create_directories(f.out_dir);
  const Scene scene = build_scene(cfg.setup);
  const RxGrid grid = cfg.rx_grid();
  const Corpus train = generate_corpus(scene, cfg.clusters, grid, cfg.n_train,
                                       PlacementMode::TrainGrid,
                                       derive_seed(cfg.seed, stream_tag::kTrainData));
  const Corpus test = generate_corpus(scene, cfg.clusters, grid, cfg.n_test,
                                      PlacementMode::TestUniform,
                                      derive_seed(cfg.seed, stream_tag::kTestData));
  save_corpus(train, in_out(f, "train_corpus.txt").string());
  save_corpus(test, in_out(f, "test_corpus.txt").string());
  write_text(in_out(f, "run_config.txt"), config_echo(cfg));
  std::cout << "wrote " << in_out(f, "train_corpus.txt").string() << " (" << cfg.n_train
            << " samples)\n";
  std::cout << "wrote " << in_out(f, "test_corpus.txt").string() << " (" << cfg.n_test
            << " samples)\n";
  std::cout << "wrote " << in_out(f, "run_config.txt").string() << '\n';
  return 0;
}

int cmd_label(const CLI::App* cmd, const CommonFlags& f) {
  const ExperimentConfig cfg = build_config(cmd, f);
  const Scene scene = build_scene(cfg.setup);
  (void)scene;
  const std::vector<GroupMap> maps = build_group_maps(cfg.setup);
  const Codebook cb = build_codebook(cfg.setup);
  const double power = cfg.setup.tx_power_watts;
  const double noise = cfg.setup.noise_watts();
  for (const auto& [corpus_name, label_name] :
       {std::make_pair("train_corpus.txt", "train_labels.txt"),
        std::make_pair("test_corpus.txt", "test_labels.txt")}) {
    const Corpus corpus = load_corpus_at(f, corpus_name);
    const std::vector<LabelSet> labels =
        label_corpus(corpus, maps, cb, power, noise, cfg.oracle_budget);
    save_labels(labels, in_out(f, label_name).string());
    std::cout << "wrote " << in_out(f, label_name).string() << " (" << labels.size()
              << " labels)\n";
  }
  return 0;
}

int cmd_train(const CLI::App* cmd, const CommonFlags& f, bool dump_datasets) {
  const ExperimentConfig cfg = build_config(cmd, f);
  const Scene scene = build_scene(cfg.setup);
  const Codebook cb = build_codebook(cfg.setup);
  const Corpus corpus = load_corpus_at(f, "train_corpus.txt");
  const std::vector<LabelSet> labels = load_labels_at(f, "train_labels.txt");
  const std::vector<Approach> wanted = requested_trained(cfg);
  if (wanted.empty()) throw std::runtime_error("no trained approaches requested");
  std::map<int, std::vector<Dataset>> cache;
  const auto sets_for = [&](EncoderKind kind) -> const std::vector<Dataset>& {
    auto it = cache.find(static_cast<int>(kind));
    if (it != cache.end()) return it->second;
    std::vector<Dataset> sets;
    if (is_centralized(kind)) {
      sets.push_back(
          make_dataset(scene, corpus, labels, kind, kAllRis, cb, nullptr, cfg.chan_log_floor));
    } else {
      for (std::size_t m = 0; m < cfg.setup.num_ris(); ++m)
        sets.push_back(make_dataset(scene, corpus, labels, kind, m, cb, nullptr,
                                    cfg.chan_log_floor));
    }
    if (dump_datasets) {
      for (const Dataset& ds : sets) {
        std::string stem = to_string(kind) + "_train";
        if (!is_centralized(kind)) stem += "_ris" + std::to_string(ds.ris_index);
        save_dataset(ds, in_out(f, (stem + ".ds").c_str()).string());
        std::cout << "wrote " << in_out(f, (stem + ".ds").c_str()).string() << '\n';
      }
    }
    return cache.emplace(static_cast<int>(kind), std::move(sets)).first->second;
  };
  for (Approach a : wanted) {
    const EncoderKind kind = approach_encoder(a);
    const std::vector<Dataset>& sets = sets_for(kind);
    const std::vector<Eigen::Index> hidden = cfg.hidden_for(kind);
    TrainResult res =
        is_federated(a)
            ? train_federated(sets, hidden, cfg.fl_rounds, cfg.fl_local_epochs, cfg.hyper)
            : train_variant(sets, hidden, cfg.hyper);
    TrainedApproach ta;
    ta.approach = a;
    ta.predictor = make_approach_predictor(sets, res.models, cfg.setup.num_ris(),
                                           cfg.setup.groups_per_ris, cfg.chan_log_floor);
    ta.loss_curves = std::move(res.loss_curves);
    save_trained(f, ta);
    double final_loss = 0.0;
    for (const auto& curve : ta.loss_curves)
      if (!curve.empty()) final_loss += curve.back();
    if (!ta.loss_curves.empty()) final_loss /= static_cast<double>(ta.loss_curves.size());
    std::printf("trained %s (final epoch mse %.6f)\n", to_string(a).c_str(), final_loss);
  }
  return 0;
}

int cmd_eval(const CLI::App* cmd, const CommonFlags& f) {
  const ExperimentConfig cfg = build_config(cmd, f);
  const Scene scene = build_scene(cfg.setup);
  const std::vector<GroupMap> maps = build_group_maps(cfg.setup);
  const Codebook cb = build_codebook(cfg.setup);
  const Corpus test = load_corpus_at(f, "test_corpus.txt");
  const std::vector<LabelSet> labels = load_labels_at(f, "test_labels.txt");
  std::vector<TrainedApproach> trained;
  for (Approach a : requested_trained(cfg)) trained.push_back(load_trained(f, cfg, a));
  const Metrics metrics = evaluate(cfg, scene, maps, cb, test, labels, trained);
  emit_results(metrics, config_echo(cfg), f.out_dir);
  std::cout << render_summary(metrics);
  return 0;
}

int cmd_run_setup(const CLI::App* cmd, const CommonFlags& f) {
  const ExperimentConfig cfg = build_config(cmd, f);
  fs::create_directories(f.out_dir);
  write_text(in_out(f, "run_config.txt"), config_echo(cfg));
  const RunResult run = run_experiment(cfg);
  for (const TrainedApproach& ta : run.trained) save_trained(f, ta);
  emit_results(run.metrics, config_echo(cfg), f.out_dir);
  std::cout << render_summary(run.metrics);
  std::printf("label %.1f s, train %.1f s, eval %.1f s\n", run.label_seconds, run.train_seconds,
              run.eval_seconds);
  return 0;
}

int cmd_report(const CLI::App* cmd, const CommonFlags& f) {
  const ExperimentConfig cfg = build_config(cmd, f);
  const fs::path rates = in_out(f, "rates.csv");
  if (!fs::exists(rates))
    throw std::runtime_error(rates.string() + " not found (run eval or run-setup first)");
  const Metrics metrics = metrics_from_rates_csv(rates.string());
  emit_results(metrics, config_echo(cfg), f.out_dir);
  std::cout << render_summary(metrics);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi RIS link simulator and phase configuration learning toolkit"};
  app.require_subcommand(1);

  CommonFlags f;
  bool dump_datasets = false;
  CLI::App* gen = app.add_subcommand("gen-data", "Synthesize train and test channel corpora");
  CLI::App* lab = app.add_subcommand("label", "Exhaustive oracle labels for both corpora");
  CLI::App* tr = app.add_subcommand("train", "Train the requested learning approaches");
  tr->add_flag("--dump-datasets", dump_datasets, "Also write encoded dataset files");
  CLI::App* ev = app.add_subcommand("eval", "Evaluate approaches on the test corpus");
  CLI::App* run = app.add_subcommand("run-setup", "Full pipeline in one shot");
  CLI::App* rep = app.add_subcommand("report", "Recompute summary and CDF from rates.csv");
  for (CLI::App* cmd : {gen, lab, tr, ev, run, rep}) add_common(cmd, f);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_data(gen, f);
    if (lab->parsed()) return cmd_label(lab, f);
    if (tr->parsed()) return cmd_train(tr, f, dump_datasets);
    if (ev->parsed()) return cmd_eval(ev, f);
    if (run->parsed()) return cmd_run_setup(run, f);
    if (rep->parsed()) return cmd_report(rep, f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
