#pragma once

#include <cstdint>

#include "risim/ris_core.hpp"

namespace risim {

inline constexpr std::uint64_t kDefaultOracleBudget = std::uint64_t{1} << 24;

struct OracleResult {
  PhaseConfig config;
  double rate = 0.0;
  cd gain = 0.0;  // cascaded gain of config (per RIS variant: without h0)
};

// Exhaustive sweep of all joint configurations, Eq. (6) style: per RIS tables of
// partial gains indexed by the 2^(bits*K0) per RIS configurations, then an
// odometer over the RIS major product space. Candidates are ranked by |gain|^2
// with strict > in lexicographic order, so the first best candidate wins and the
// result does not depend on how later ties fall. Refuses when the candidate
// count exceeds the budget.
OracleResult exhaustive_joint(const ChannelRealization& r, const std::vector<GroupMap>& maps,
                              const Codebook& cb, double tx_power_watts, double noise_watts,
                              std::uint64_t budget = kDefaultOracleBudget);

// Same sweep for a single RIS with the direct link excluded.
OracleResult exhaustive_per_ris(std::span<const cd> h, std::span<const cd> g, const GroupMap& map,
                                const Codebook& cb, double tx_power_watts, double noise_watts,
                                std::uint64_t budget = kDefaultOracleBudget);

PhaseConfig random_config(std::size_t num_ris, std::size_t groups_per_ris, const Codebook& cb,
                          std::mt19937_64& rng);

double no_ris_rate(const ChannelRealization& r, double tx_power_watts, double noise_watts);

}  // namespace risim
