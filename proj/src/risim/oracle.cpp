#include "risim/oracle.hpp"

#include <stdexcept>
#include <string>

namespace risim {

namespace {

int digit_of(std::uint64_t candidate, std::size_t group, std::size_t num_groups, int bits) {
  const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
  return static_cast<int>((candidate >> (bits * (num_groups - 1 - group))) & mask);
}

// Table of per RIS gains for every per RIS configuration, group 0 taken as the
// most significant base 2^bits digit so table order matches RIS major
// lexicographic order of the index vector.
std::vector<cd> ris_table(std::span<const cd> h, std::span<const cd> g, const GroupMap& map,
                          const Codebook& cb) {
  const std::vector<cd> part = group_products(h, g, map);
  const std::size_t n = std::size_t{1} << (cb.bits * static_cast<int>(map.num_groups));
  std::vector<cd> table(n);
  for (std::uint64_t f = 0; f < n; ++f) {
    cd v = 0.0;
    for (std::size_t i = 0; i < map.num_groups; ++i)
      v += cb.entries[static_cast<std::size_t>(digit_of(f, i, map.num_groups, cb.bits))] * part[i];
    table[f] = v;
  }
  return table;
}

std::uint64_t per_ris_candidates(const GroupMap& map, const Codebook& cb, std::uint64_t budget) {
  const std::size_t width = static_cast<std::size_t>(cb.bits) * map.num_groups;
  if (width >= 63 || (std::uint64_t{1} << width) > budget)
    throw std::runtime_error("exhaustive search: candidate count exceeds budget of " +
                             std::to_string(budget));
  return std::uint64_t{1} << width;
}

void config_from_digits(PhaseConfig& cfg, std::span<const std::uint64_t> digits,
                        std::size_t num_groups, int bits) {
  for (std::size_t m = 0; m < digits.size(); ++m)
    for (std::size_t i = 0; i < num_groups; ++i)
      cfg.at(m, i) = digit_of(digits[m], i, num_groups, bits);
}

}  // namespace

OracleResult exhaustive_joint(const ChannelRealization& r, const std::vector<GroupMap>& maps,
                              const Codebook& cb, double tx_power_watts, double noise_watts,
                              std::uint64_t budget) {
  if (maps.empty()) throw std::domain_error("exhaustive_joint: needs at least one ris");
  if (r.h.size() != maps.size() || r.g.size() != maps.size())
    throw std::domain_error("exhaustive_joint: realization has wrong ris count");
  const std::size_t num_groups = maps[0].num_groups;
  for (const GroupMap& map : maps) {
    map.validate();
    if (map.num_groups != num_groups)
      throw std::domain_error("exhaustive_joint: group counts must match across ris");
  }
  const std::size_t m_count = maps.size();
  const std::uint64_t per_ris = per_ris_candidates(maps[0], cb, budget);
  std::uint64_t total = 1;
  for (std::size_t m = 0; m < m_count; ++m) {
    if (total > budget / per_ris)
      throw std::runtime_error("exhaustive search: candidate count exceeds budget of " +
                               std::to_string(budget));
    total *= per_ris;
  }

  std::vector<std::vector<cd>> tables(m_count);
  for (std::size_t m = 0; m < m_count; ++m) tables[m] = ris_table(r.h[m], r.g[m], maps[m], cb);

  std::vector<std::uint64_t> digits(m_count, 0);
  std::vector<std::uint64_t> best_digits(m_count, 0);
  std::vector<cd> prefix(m_count + 1);
  prefix[0] = r.h0;
  double best = -1.0;

  // Depth first over RIS digits in lexicographic order; strict > keeps the
  // first best candidate.
  auto descend = [&](auto&& self, std::size_t m) -> void {
    if (m + 1 == m_count) {
      const cd base = prefix[m];
      const std::vector<cd>& table = tables[m];
      for (std::uint64_t c = 0; c < per_ris; ++c) {
        const double v = std::norm(base + table[c]);
        if (v > best) {
          best = v;
          digits[m] = c;
          best_digits = digits;
        }
      }
      return;
    }
    for (std::uint64_t c = 0; c < per_ris; ++c) {
      digits[m] = c;
      prefix[m + 1] = prefix[m] + tables[m][c];
      self(self, m + 1);
    }
  };
  descend(descend, 0);

  OracleResult out;
  out.config = PhaseConfig::zeros(m_count, num_groups);
  config_from_digits(out.config, best_digits, num_groups, cb.bits);
  out.gain = cascaded_gain(r, out.config, maps, cb);
  out.rate = rate_from_gain(out.gain, tx_power_watts, noise_watts);
  return out;
}

OracleResult exhaustive_per_ris(std::span<const cd> h, std::span<const cd> g, const GroupMap& map,
                                const Codebook& cb, double tx_power_watts, double noise_watts,
                                std::uint64_t budget) {
  map.validate();
  if (h.size() != map.num_elements() || g.size() != map.num_elements())
    throw std::domain_error("exhaustive_per_ris: channel length mismatch");
  const std::uint64_t n = per_ris_candidates(map, cb, budget);
  const std::vector<cd> table = ris_table(h, g, map, cb);
  double best = -1.0;
  std::uint64_t best_c = 0;
  for (std::uint64_t c = 0; c < n; ++c) {
    const double v = std::norm(table[c]);
    if (v > best) {
      best = v;
      best_c = c;
    }
  }
  OracleResult out;
  out.config = PhaseConfig::zeros(1, map.num_groups);
  config_from_digits(out.config, {&best_c, 1}, map.num_groups, cb.bits);
  const std::vector<cd> prod = group_products(h, g, map);
  cd gain = 0.0;
  for (std::size_t i = 0; i < map.num_groups; ++i)
    gain += cb.entries[static_cast<std::size_t>(out.config.at(0, i))] * prod[i];
  out.gain = gain;
  out.rate = rate_from_gain(gain, tx_power_watts, noise_watts);
  return out;
}

PhaseConfig random_config(std::size_t num_ris, std::size_t groups_per_ris, const Codebook& cb,
                          std::mt19937_64& rng) {
  PhaseConfig cfg = PhaseConfig::zeros(num_ris, groups_per_ris);
  const std::uint64_t mask = cb.size() - 1;  // codebook sizes are powers of two
  for (int& f : cfg.indices) f = static_cast<int>(rng() & mask);
  return cfg;
}

double no_ris_rate(const ChannelRealization& r, double tx_power_watts, double noise_watts) {
  return rate_from_gain(r.h0, tx_power_watts, noise_watts);
}

}  // namespace risim
