#include "risim/ris_core.hpp"

#include <cmath>
#include <stdexcept>

namespace risim {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace

std::vector<cd> group_products(std::span<const cd> h, std::span<const cd> g, const GroupMap& map) {
  require(h.size() == map.num_elements() && g.size() == map.num_elements(),
          "group_products: channel length mismatch");
  std::vector<cd> out(map.num_groups, cd(0.0, 0.0));
  for (std::size_t k = 0; k < map.num_elements(); ++k) out[map.assignment[k]] += g[k] * h[k];
  return out;
}

Codebook make_codebook(int bits) {
  require(bits >= 1 && bits <= 16, "codebook: bits must be in [1,16]");
  Codebook cb;
  cb.bits = bits;
  const std::size_t n = std::size_t{1} << bits;
  cb.entries.resize(n);
  const double step = std::pow(2.0, 1.0 - bits) * kPi;
  for (std::size_t f = 0; f < n; ++f) {
    // Quarter-turn entries are exact values; polar() would smear them by an
    // ulp and break the exact tie between a 1-bit config and its global flip.
    if ((4 * f) % n == 0) {
      static constexpr cd quarter[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
      cb.entries[f] = quarter[(4 * f) / n % 4];
    } else {
      cb.entries[f] = std::polar(1.0, step * static_cast<double>(f));
    }
  }
  return cb;
}

void GroupMap::validate() const {
  require(num_groups >= 1, "group map: needs at least one group");
  require(!assignment.empty(), "group map: empty assignment");
  std::vector<std::size_t> count(num_groups, 0);
  for (std::uint32_t a : assignment) {
    require(a < num_groups, "group map: group id out of range");
    ++count[a];
  }
  for (std::size_t c : count) require(c > 0, "group map: empty group");
}

GroupMap GroupMap::blocks(std::size_t rows, std::size_t cols, std::size_t block_rows,
                          std::size_t block_cols) {
  require(block_rows >= 1 && block_cols >= 1, "group map: empty block grid");
  require(rows % block_rows == 0 && cols % block_cols == 0,
          "group map: blocks must tile the grid evenly");
  GroupMap map;
  map.num_groups = block_rows * block_cols;
  map.assignment.resize(rows * cols);
  const std::size_t pr = rows / block_rows;
  const std::size_t pc = cols / block_cols;
  for (std::size_t p = 0; p < rows; ++p)
    for (std::size_t q = 0; q < cols; ++q)
      map.assignment[p * cols + q] = static_cast<std::uint32_t>((p / pr) * block_cols + q / pc);
  return map;
}

GroupMap GroupMap::contiguous(std::size_t num_elements, std::size_t num_groups) {
  require(num_groups >= 1 && num_elements % num_groups == 0,
          "group map: groups must divide element count");
  GroupMap map;
  map.num_groups = num_groups;
  map.assignment.resize(num_elements);
  const std::size_t run = num_elements / num_groups;
  for (std::size_t k = 0; k < num_elements; ++k)
    map.assignment[k] = static_cast<std::uint32_t>(k / run);
  return map;
}

PhaseConfig PhaseConfig::zeros(std::size_t num_ris, std::size_t groups_per_ris) {
  PhaseConfig cfg;
  cfg.num_ris = num_ris;
  cfg.groups_per_ris = groups_per_ris;
  cfg.indices.assign(num_ris * groups_per_ris, 0);
  return cfg;
}

void PhaseConfig::validate(const Codebook& cb) const {
  require(num_ris >= 1 && groups_per_ris >= 1, "phase config: empty shape");
  require(indices.size() == num_ris * groups_per_ris, "phase config: index count mismatch");
  for (int f : indices)
    require(f >= 0 && static_cast<std::size_t>(f) < cb.size(),
            "phase config: codebook index out of range");
}

std::vector<std::vector<cd>> expand(const PhaseConfig& cfg, const std::vector<GroupMap>& maps,
                                    const Codebook& cb) {
  cfg.validate(cb);
  require(maps.size() == cfg.num_ris, "expand: one group map per ris required");
  std::vector<std::vector<cd>> out(cfg.num_ris);
  for (std::size_t m = 0; m < cfg.num_ris; ++m) {
    const GroupMap& map = maps[m];
    map.validate();
    require(map.num_groups == cfg.groups_per_ris, "expand: group count mismatch");
    out[m].resize(map.num_elements());
    for (std::size_t k = 0; k < map.num_elements(); ++k)
      out[m][k] = cb.entries[static_cast<std::size_t>(cfg.at(m, map.assignment[k]))];
  }
  return out;
}

cd cascaded_gain(const ChannelRealization& r, const PhaseConfig& cfg,
                 const std::vector<GroupMap>& maps, const Codebook& cb) {
  cfg.validate(cb);
  require(r.h.size() == cfg.num_ris && r.g.size() == cfg.num_ris,
          "cascaded_gain: realization has wrong ris count");
  require(maps.size() == cfg.num_ris, "cascaded_gain: one group map per ris required");
  cd gain = r.h0;
  for (std::size_t m = 0; m < cfg.num_ris; ++m) {
    require(maps[m].num_groups == cfg.groups_per_ris, "cascaded_gain: group count mismatch");
    const std::vector<cd> prod = group_products(r.h[m], r.g[m], maps[m]);
    for (std::size_t i = 0; i < maps[m].num_groups; ++i)
      gain += cb.entries[static_cast<std::size_t>(cfg.at(m, i))] * prod[i];
  }
  return gain;
}

double rate_from_gain(cd gain, double tx_power_watts, double noise_watts) {
  require(std::isfinite(tx_power_watts) && tx_power_watts > 0.0, "rate: power must be positive");
  require(std::isfinite(noise_watts) && noise_watts > 0.0, "rate: noise must be positive");
  return std::log2(1.0 + tx_power_watts / noise_watts * std::norm(gain));
}

double achievable_rate(const ChannelRealization& r, const PhaseConfig& cfg,
                       const std::vector<GroupMap>& maps, const Codebook& cb,
                       double tx_power_watts, double noise_watts) {
  return rate_from_gain(cascaded_gain(r, cfg, maps, cb), tx_power_watts, noise_watts);
}

double per_ris_rate(std::span<const cd> h, std::span<const cd> g, std::span<const int> indices,
                    const GroupMap& map, const Codebook& cb, double tx_power_watts,
                    double noise_watts) {
  map.validate();
  require(indices.size() == map.num_groups, "per_ris_rate: index count mismatch");
  for (int f : indices)
    require(f >= 0 && static_cast<std::size_t>(f) < cb.size(),
            "per_ris_rate: codebook index out of range");
  const std::vector<cd> prod = group_products(h, g, map);
  cd gain = 0.0;
  for (std::size_t i = 0; i < map.num_groups; ++i)
    gain += cb.entries[static_cast<std::size_t>(indices[i])] * prod[i];
  return rate_from_gain(gain, tx_power_watts, noise_watts);
}

}  // namespace risim
