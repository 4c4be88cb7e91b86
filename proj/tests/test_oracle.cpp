#include <random>

#include "doctest.h"
#include "risim/oracle.hpp"
#include "risim/rng.hpp"

using namespace risim;

namespace {

// Fully independent reference: enumerate every joint configuration in
// lexicographic order and keep the first best through cascaded_gain.
OracleResult naive_joint(const ChannelRealization& r, const std::vector<GroupMap>& maps,
                         const Codebook& cb, double power, double noise) {
  const std::size_t num_ris = maps.size();
  const std::size_t groups = maps[0].num_groups;
  PhaseConfig cfg = PhaseConfig::zeros(num_ris, groups);
  OracleResult best;
  best.config = cfg;
  best.gain = cascaded_gain(r, cfg, maps, cb);
  best.rate = rate_from_gain(best.gain, power, noise);
  const std::size_t total = cfg.indices.size();
  while (true) {
    std::size_t pos = total;
    while (pos > 0) {
      --pos;
      cfg.indices[pos] += 1;
      if (cfg.indices[pos] < static_cast<int>(cb.size())) break;
      cfg.indices[pos] = 0;
      if (pos == 0) return best;
    }
    const cd gain = cascaded_gain(r, cfg, maps, cb);
    const double rate = rate_from_gain(gain, power, noise);
    if (rate > best.rate) {
      best.rate = rate;
      best.gain = gain;
      best.config = cfg;
    }
  }
}

ChannelRealization random_realization(std::size_t num_ris, std::size_t elements,
                                      std::mt19937_64& rng) {
  ChannelRealization r;
  r.h.resize(num_ris);
  r.g.resize(num_ris);
  for (std::size_t m = 0; m < num_ris; ++m) {
    for (std::size_t k = 0; k < elements; ++k) {
      r.h[m].push_back(complex_gaussian(rng, 1.0));
      r.g[m].push_back(complex_gaussian(rng, 1.0));
    }
  }
  r.h0 = complex_gaussian(rng, 1.0);
  return r;
}

}  // namespace

TEST_CASE("joint oracle prefers the first best configuration in lex order") {
  ChannelRealization r;
  r.h = {{cd{1, 0}, cd{-1, 0}}};
  r.g = {{cd{1, 0}, cd{1, 0}}};
  r.h0 = cd{0, 0};
  const std::vector<GroupMap> maps = {GroupMap::contiguous(2, 2)};
  const Codebook cb = make_codebook(1);
  const OracleResult res = exhaustive_joint(r, maps, cb, 1.0, 1.0);
  CHECK(res.config.at(0, 0) == 0);
  CHECK(res.config.at(0, 1) == 1);
  CHECK(res.rate == doctest::Approx(2.321928094887362).epsilon(1e-15));
  CHECK(std::abs(res.gain - cd{2.0, 0.0}) < 1e-15);
}

TEST_CASE("zero incident channel labels as the all zero configuration") {
  ChannelRealization r;
  r.h = {{cd{0, 0}, cd{0, 0}}, {cd{0, 0}, cd{0, 0}}};
  r.g = {{cd{1, 0}, cd{1, 0}}, {cd{1, 0}, cd{1, 0}}};
  r.h0 = cd{1, 0};
  const std::vector<GroupMap> maps = {GroupMap::contiguous(2, 2), GroupMap::contiguous(2, 2)};
  const Codebook cb = make_codebook(1);
  const OracleResult res = exhaustive_joint(r, maps, cb, 1.0, 1.0);
  for (int idx : res.config.indices) CHECK(idx == 0);
}

TEST_CASE("per ris oracle on the quarter phase example") {
  // h = [1, e^{j3pi/4}], g = [1, 1], q = 1, two groups: flipping the second
  // element to -1 rotates its term to e^{-j pi/4}, |sum|^2 = 2 + sqrt(2).
  const std::vector<cd> h = {cd{1, 0}, std::polar(1.0, 3 * kPi / 4)};
  const std::vector<cd> g = {cd{1, 0}, cd{1, 0}};
  const GroupMap map = GroupMap::contiguous(2, 2);
  const Codebook cb = make_codebook(1);
  const OracleResult res = exhaustive_per_ris(h, g, map, cb, 1.0, 1.0);
  CHECK(res.config.at(0, 0) == 0);
  CHECK(res.config.at(0, 1) == 1);
  CHECK(res.rate == doctest::Approx(2.142156429781392).epsilon(1e-12));
}

TEST_CASE("joint oracle agrees with the naive enumerator on random instances") {
  std::mt19937_64 rng = substream(123, 0, 0);
  std::uniform_int_distribution<int> ris_d(1, 2), el_d(1, 8), grp_d(1, 3), bit_d(1, 2);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t num_ris = static_cast<std::size_t>(ris_d(rng));
    const std::size_t groups = static_cast<std::size_t>(grp_d(rng));
    std::size_t elements = static_cast<std::size_t>(el_d(rng));
    elements = std::max(elements, groups);
    elements -= elements % groups;  // contiguous maps need equal batches
    const Codebook cb = make_codebook(bit_d(rng));
    const std::vector<GroupMap> maps(num_ris, GroupMap::contiguous(elements, groups));
    const ChannelRealization r = random_realization(num_ris, elements, rng);
    const OracleResult fast = exhaustive_joint(r, maps, cb, 1.0, 1e-2);
    const OracleResult slow = naive_joint(r, maps, cb, 1.0, 1e-2);
    CHECK(fast.rate == slow.rate);
    CHECK(fast.config.indices == slow.config.indices);
  }
}

TEST_CASE("oracle refuses budgets it cannot afford") {
  ChannelRealization r;
  r.h = {{cd{1, 0}, cd{1, 0}}};
  r.g = {{cd{1, 0}, cd{1, 0}}};
  const std::vector<GroupMap> maps = {GroupMap::contiguous(2, 2)};
  const Codebook cb = make_codebook(1);
  CHECK_THROWS_AS(exhaustive_joint(r, maps, cb, 1.0, 1.0, 3), std::runtime_error);
  CHECK_NOTHROW(exhaustive_joint(r, maps, cb, 1.0, 1.0, 4));
}

TEST_CASE("random config indices stay inside the codebook") {
  const Codebook cb = make_codebook(2);
  std::mt19937_64 rng = substream(5, 0, 0);
  int seen[4] = {0, 0, 0, 0};
  for (int i = 0; i < 200; ++i) {
    const PhaseConfig cfg = random_config(3, 4, cb, rng);
    CHECK(cfg.indices.size() == 12);
    for (int idx : cfg.indices) {
      REQUIRE(idx >= 0);
      REQUIRE(idx < 4);
      ++seen[idx];
    }
  }
  for (int count : seen) CHECK(count > 0);
}

TEST_CASE("no ris rate uses only the direct link") {
  ChannelRealization r;
  r.h = {{cd{1, 0}}};
  r.g = {{cd{1, 0}}};
  r.h0 = cd{2, 0};
  CHECK(no_ris_rate(r, 1.0, 1.0) == doctest::Approx(std::log2(5.0)));
}
