#include "risim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace risim {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* want) {
  throw std::domain_error("config: key " + key + " expects " + want + ", got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = first + value.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc{} || res.ptr != last) bad(key, value, "a real number");
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc{} || res.ptr != last) bad(key, value, "an integer");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc{} || res.ptr != last) bad(key, value, "an unsigned integer");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad(key, value, "true or false");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream is(value);
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    items.push_back(item.substr(b, e - b + 1));
  }
  return items;
}

std::vector<Eigen::Index> parse_dims(const std::string& key, const std::string& value) {
  std::vector<Eigen::Index> dims;
  for (const std::string& item : split_list(value))
    dims.push_back(static_cast<Eigen::Index>(parse_int(key, item)));
  if (dims.empty()) bad(key, value, "a comma separated list of widths");
  return dims;
}

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  SetupSpec& s = cfg.setup;
  ClusterConfig& c = cfg.clusters;
  TrainHyper& h = cfg.hyper;
  if (key == "setup") {
    const long long id = parse_int(key, value);
    if (id < 1 || id > 3) bad(key, value, "1, 2, or 3");
    cfg.setup = table_setup(static_cast<int>(id));
  } else if (key == "d_h") {
    s.d_h = parse_double(key, value);
  } else if (key == "x1") {
    s.x1 = parse_double(key, value);
  } else if (key == "y1") {
    s.y1 = parse_double(key, value);
  } else if (key == "x2") {
    s.x2 = parse_double(key, value);
  } else if (key == "y2") {
    s.y2 = parse_double(key, value);
  } else if (key == "wall") {
    s.wall = parse_bool(key, value);
  } else if (key == "wall_loss_db") {
    s.wall_loss_db = parse_double(key, value);
  } else if (key == "rows") {
    s.rows = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "cols") {
    s.cols = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "groups_per_ris") {
    s.groups_per_ris = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "phase_bits") {
    s.phase_bits = static_cast<int>(parse_int(key, value));
  } else if (key == "tx_power_watts") {
    s.tx_power_watts = parse_double(key, value);
  } else if (key == "noise_dbm") {
    s.noise_dbm = parse_double(key, value);
  } else if (key == "carrier_hz") {
    s.carrier_hz = parse_double(key, value);
  } else if (key == "spacing_wavelengths") {
    s.spacing_wavelengths = parse_double(key, value);
  } else if (key == "pathloss_exponent_ris") {
    s.pathloss_exponent_ris = parse_double(key, value);
  } else if (key == "pathloss_exponent_direct") {
    s.pathloss_exponent_direct = parse_double(key, value);
  } else if (key == "pattern") {
    if (value != "isotropic" && value != "cosine_power") bad(key, value, "isotropic or cosine_power");
    s.pattern = value;
  } else if (key == "pattern_exponent") {
    s.pattern_exponent = parse_double(key, value);
  } else if (key == "num_clusters") {
    c.num_clusters = static_cast<std::size_t>(parse_int(key, value));
    c.rays_per_cluster.assign(c.num_clusters, c.rays_per_cluster.empty() ? 8 : c.rays_per_cluster[0]);
  } else if (key == "rays_per_cluster") {
    std::vector<std::size_t> rays;
    for (const std::string& item : split_list(value))
      rays.push_back(static_cast<std::size_t>(parse_int(key, item)));
    if (rays.empty()) bad(key, value, "a comma separated list of ray counts");
    if (rays.size() == 1) rays.assign(c.num_clusters, rays[0]);
    c.rays_per_cluster = std::move(rays);
  } else if (key == "azimuth_center_min") {
    c.azimuth_center_min = parse_double(key, value);
  } else if (key == "azimuth_center_max") {
    c.azimuth_center_max = parse_double(key, value);
  } else if (key == "elevation_center_min") {
    c.elevation_center_min = parse_double(key, value);
  } else if (key == "elevation_center_max") {
    c.elevation_center_max = parse_double(key, value);
  } else if (key == "intra_cluster_spread") {
    c.intra_cluster_spread = parse_double(key, value);
  } else if (key == "los_probability") {
    c.los_probability = parse_double(key, value);
  } else if (key == "learning_rate") {
    h.learning_rate = parse_double(key, value);
  } else if (key == "epochs") {
    h.epochs = static_cast<int>(parse_int(key, value));
  } else if (key == "batch_size") {
    h.batch_size = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "lambda") {
    h.lambda = parse_double(key, value);
  } else if (key == "optimizer") {
    if (value == "adam") h.optimizer = TrainHyper::Optimizer::Adam;
    else if (value == "sgd") h.optimizer = TrainHyper::Optimizer::Sgd;
    else bad(key, value, "adam or sgd");
  } else if (key == "beta1") {
    h.beta1 = parse_double(key, value);
  } else if (key == "beta2") {
    h.beta2 = parse_double(key, value);
  } else if (key == "epsilon") {
    h.epsilon = parse_double(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_u64(key, value);
    h.seed = cfg.seed;
  } else if (key == "n_train") {
    cfg.n_train = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "n_test") {
    cfg.n_test = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "approaches") {
    std::vector<Approach> list;
    for (const std::string& item : split_list(value)) {
      if (item == "all") {
        list.assign(std::begin(kAllApproaches), std::end(kAllApproaches));
        continue;
      }
      list.push_back(approach_from_string(item));
    }
    if (list.empty()) bad(key, value, "a comma separated list of approaches");
    cfg.approaches = std::move(list);
  } else if (key == "oracle_budget") {
    cfg.oracle_budget = parse_u64(key, value);
  } else if (key == "nn_hidden_cen") {
    cfg.nn_hidden_cen = parse_dims(key, value);
  } else if (key == "nn_hidden_ind") {
    cfg.nn_hidden_ind = parse_dims(key, value);
  } else if (key == "nn_dims_mode") {
    if (value != "table2" && value != "formula") bad(key, value, "table2 or formula");
    cfg.nn_dims_mode = value;
  } else if (key == "fl_rounds") {
    cfg.fl_rounds = static_cast<int>(parse_int(key, value));
  } else if (key == "fl_local_epochs") {
    cfg.fl_local_epochs = static_cast<int>(parse_int(key, value));
  } else if (key == "grid_width") {
    cfg.grid_width = parse_double(key, value);
  } else if (key == "grid_center_x") {
    cfg.grid_center.x = parse_double(key, value);
    cfg.grid_center_set = true;
  } else if (key == "grid_center_y") {
    cfg.grid_center.y = parse_double(key, value);
    cfg.grid_center_set = true;
  } else if (key == "grid_center_z") {
    cfg.grid_center.z = parse_double(key, value);
    cfg.grid_center_set = true;
  } else if (key == "chan_log_floor") {
    cfg.chan_log_floor = parse_double(key, value);
  } else {
    throw std::domain_error("config: unknown key " + key);
  }
}

void apply_config_text(ExperimentConfig& cfg, std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::domain_error("config: line " + std::to_string(lineno) + " is not key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw std::domain_error("config: line " + std::to_string(lineno) + " has no key");
    apply_config_key(cfg, key, value);
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  apply_config_text(cfg, is);
}

std::string config_echo(const ExperimentConfig& cfg) {
  const SetupSpec& s = cfg.setup;
  const ClusterConfig& c = cfg.clusters;
  const TrainHyper& h = cfg.hyper;
  std::ostringstream os;
  os << "setup=" << s.setup_id << '\n';
  os << "d_h=" << fmt(s.d_h) << '\n';
  os << "x1=" << fmt(s.x1) << '\n';
  os << "y1=" << fmt(s.y1) << '\n';
  os << "x2=" << fmt(s.x2) << '\n';
  os << "y2=" << fmt(s.y2) << '\n';
  os << "wall=" << (s.wall ? "true" : "false") << '\n';
  os << "wall_loss_db=" << fmt(s.wall_loss_db) << '\n';
  os << "rows=" << s.rows << '\n';
  os << "cols=" << s.cols << '\n';
  os << "groups_per_ris=" << s.groups_per_ris << '\n';
  os << "phase_bits=" << s.phase_bits << '\n';
  os << "tx_power_watts=" << fmt(s.tx_power_watts) << '\n';
  os << "noise_dbm=" << fmt(s.noise_dbm) << '\n';
  os << "carrier_hz=" << fmt(s.carrier_hz) << '\n';
  os << "spacing_wavelengths=" << fmt(s.spacing_wavelengths) << '\n';
  os << "pathloss_exponent_ris=" << fmt(s.pathloss_exponent_ris) << '\n';
  os << "pathloss_exponent_direct=" << fmt(s.pathloss_exponent_direct) << '\n';
  os << "pattern=" << s.pattern << '\n';
  os << "pattern_exponent=" << fmt(s.pattern_exponent) << '\n';
  os << "num_clusters=" << c.num_clusters << '\n';
  os << "rays_per_cluster=";
  for (std::size_t i = 0; i < c.rays_per_cluster.size(); ++i)
    os << (i ? "," : "") << c.rays_per_cluster[i];
  os << '\n';
  os << "azimuth_center_min=" << fmt(c.azimuth_center_min) << '\n';
  os << "azimuth_center_max=" << fmt(c.azimuth_center_max) << '\n';
  os << "elevation_center_min=" << fmt(c.elevation_center_min) << '\n';
  os << "elevation_center_max=" << fmt(c.elevation_center_max) << '\n';
  os << "intra_cluster_spread=" << fmt(c.intra_cluster_spread) << '\n';
  os << "los_probability=" << fmt(c.los_probability) << '\n';
  os << "learning_rate=" << fmt(h.learning_rate) << '\n';
  os << "epochs=" << h.epochs << '\n';
  os << "batch_size=" << h.batch_size << '\n';
  os << "lambda=" << fmt(h.lambda) << '\n';
  os << "optimizer=" << (h.optimizer == TrainHyper::Optimizer::Adam ? "adam" : "sgd") << '\n';
  os << "beta1=" << fmt(h.beta1) << '\n';
  os << "beta2=" << fmt(h.beta2) << '\n';
  os << "epsilon=" << fmt(h.epsilon) << '\n';
  os << "seed=" << cfg.seed << '\n';
  os << "n_train=" << cfg.n_train << '\n';
  os << "n_test=" << cfg.n_test << '\n';
  os << "approaches=";
  for (std::size_t i = 0; i < cfg.approaches.size(); ++i)
    os << (i ? "," : "") << to_string(cfg.approaches[i]);
  os << '\n';
  os << "oracle_budget=" << cfg.oracle_budget << '\n';
  os << "nn_hidden_cen=";
  for (std::size_t i = 0; i < cfg.nn_hidden_cen.size(); ++i)
    os << (i ? "," : "") << cfg.nn_hidden_cen[i];
  os << '\n';
  os << "nn_hidden_ind=";
  for (std::size_t i = 0; i < cfg.nn_hidden_ind.size(); ++i)
    os << (i ? "," : "") << cfg.nn_hidden_ind[i];
  os << '\n';
  os << "nn_dims_mode=" << cfg.nn_dims_mode << '\n';
  os << "fl_rounds=" << cfg.fl_rounds << '\n';
  os << "fl_local_epochs=" << cfg.fl_local_epochs << '\n';
  os << "grid_width=" << fmt(cfg.grid_width) << '\n';
  if (cfg.grid_center_set) {
    os << "grid_center_x=" << fmt(cfg.grid_center.x) << '\n';
    os << "grid_center_y=" << fmt(cfg.grid_center.y) << '\n';
    os << "grid_center_z=" << fmt(cfg.grid_center.z) << '\n';
  }
  os << "chan_log_floor=" << fmt(cfg.chan_log_floor) << '\n';
  return os.str();
}

}  // namespace risim
