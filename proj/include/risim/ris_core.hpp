#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "risim/channel.hpp"

namespace risim {

// Discrete phase alphabet with 2^bits entries exp(j * 2^(1-bits) * pi * f).
struct Codebook {
  int bits = 1;
  std::vector<cd> entries;
  std::size_t size() const { return entries.size(); }
};

Codebook make_codebook(int bits);

// Assignment of the K elements of one RIS to phase groups.
struct GroupMap {
  std::size_t num_groups = 0;
  std::vector<std::uint32_t> assignment;  // length K, values < num_groups

  std::size_t num_elements() const { return assignment.size(); }
  void validate() const;

  // Rectangular tiling of a rows x cols grid into block_rows x block_cols blocks
  // of equal size, block index row major.
  static GroupMap blocks(std::size_t rows, std::size_t cols, std::size_t block_rows,
                         std::size_t block_cols);
  // First num_elements/num_groups elements in group 0, next run in group 1, ...
  static GroupMap contiguous(std::size_t num_elements, std::size_t num_groups);
};

// Codebook indices for all groups of all RISs, RIS major:
// indices[m * groups_per_ris + i] drives group i of RIS m.
struct PhaseConfig {
  std::size_t num_ris = 0;
  std::size_t groups_per_ris = 0;
  std::vector<int> indices;

  static PhaseConfig zeros(std::size_t num_ris, std::size_t groups_per_ris);
  int at(std::size_t m, std::size_t i) const { return indices[m * groups_per_ris + i]; }
  int& at(std::size_t m, std::size_t i) { return indices[m * groups_per_ris + i]; }
  std::span<const int> ris(std::size_t m) const {
    return {indices.data() + m * groups_per_ris, groups_per_ris};
  }
  void validate(const Codebook& cb) const;
  bool operator==(const PhaseConfig&) const = default;
};

// Per element phase vectors, one per RIS.
std::vector<std::vector<cd>> expand(const PhaseConfig& cfg, const std::vector<GroupMap>& maps,
                                    const Codebook& cb);

// Per group sums of g[k]*h[k], the only statistic a group's phase multiplies.
std::vector<cd> group_products(std::span<const cd> h, std::span<const cd> g, const GroupMap& map);

// sum_m sum_k g_m[k] phi_m[k] h_m[k] + h0
cd cascaded_gain(const ChannelRealization& r, const PhaseConfig& cfg,
                 const std::vector<GroupMap>& maps, const Codebook& cb);

double rate_from_gain(cd gain, double tx_power_watts, double noise_watts);

double achievable_rate(const ChannelRealization& r, const PhaseConfig& cfg,
                       const std::vector<GroupMap>& maps, const Codebook& cb,
                       double tx_power_watts, double noise_watts);

// Rate through a single RIS with the direct link excluded.
double per_ris_rate(std::span<const cd> h, std::span<const cd> g, std::span<const int> indices,
                    const GroupMap& map, const Codebook& cb, double tx_power_watts,
                    double noise_watts);

}  // namespace risim
