#include "doctest.h"
#include "risim/ris_core.hpp"

using namespace risim;

TEST_CASE("one bit codebook is plus minus one") {
  const Codebook cb = make_codebook(1);
  REQUIRE(cb.size() == 2);
  CHECK(std::abs(cb.entries[0] - cd{1.0, 0.0}) < 1e-15);
  CHECK(std::abs(cb.entries[1] - cd{-1.0, 0.0}) < 1e-15);
}

TEST_CASE("two bit codebook walks the quarter circle") {
  const Codebook cb = make_codebook(2);
  REQUIRE(cb.size() == 4);
  const double phases[] = {0.0, kPi / 2, kPi, 3 * kPi / 2};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(cb.entries[i]) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::arg(cb.entries[i] * std::polar(1.0, -phases[i])) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK_THROWS(make_codebook(0));
  CHECK_THROWS(make_codebook(17));
}

TEST_CASE("block group map tiles the panel row major") {
  const GroupMap map = GroupMap::blocks(4, 4, 2, 2);
  REQUIRE(map.num_groups == 4);
  REQUIRE(map.assignment.size() == 16);
  // element k = p*4+q; block id = (p/2)*2 + q/2
  CHECK(map.assignment[0] == 0);
  CHECK(map.assignment[2] == 1);
  CHECK(map.assignment[5] == 0);
  CHECK(map.assignment[10] == 3);
  CHECK(map.assignment[15] == 3);
  const GroupMap contig = GroupMap::contiguous(8, 4);
  CHECK(contig.assignment[0] == 0);
  CHECK(contig.assignment[1] == 0);
  CHECK(contig.assignment[7] == 3);
  CHECK_THROWS(GroupMap::contiguous(7, 3));
}

TEST_CASE("phase config shape and validation") {
  PhaseConfig cfg = PhaseConfig::zeros(2, 3);
  CHECK(cfg.indices.size() == 6);
  cfg.at(1, 2) = 1;
  CHECK(cfg.ris(1)[2] == 1);
  const Codebook cb = make_codebook(1);
  CHECK_NOTHROW(cfg.validate(cb));
  cfg.at(0, 0) = 5;
  CHECK_THROWS(cfg.validate(cb));
}

TEST_CASE("cascaded gain on a hand example") {
  // one RIS, two elements, two groups, q=1: g=[1,1], h=[1,-1], h0=0
  ChannelRealization r;
  r.h = {{cd{1, 0}, cd{-1, 0}}};
  r.g = {{cd{1, 0}, cd{1, 0}}};
  r.h0 = cd{0, 0};
  const std::vector<GroupMap> maps = {GroupMap::contiguous(2, 2)};
  const Codebook cb = make_codebook(1);
  PhaseConfig cfg = PhaseConfig::zeros(1, 2);
  cfg.at(0, 1) = 1;  // phases (+1, -1)
  const cd gain = cascaded_gain(r, cfg, maps, cb);
  CHECK(std::abs(gain - cd{2.0, 0.0}) < 1e-15);
  CHECK(rate_from_gain(gain, 1.0, 1.0) == doctest::Approx(2.321928094887362).epsilon(1e-15));
  cfg.at(0, 1) = 0;  // phases (+1, +1) cancel
  CHECK(std::abs(cascaded_gain(r, cfg, maps, cb)) < 1e-15);
}

TEST_CASE("group products sum element products per group") {
  const std::vector<cd> h = {cd{1, 0}, cd{0, 1}, cd{2, 0}, cd{0, -1}};
  const std::vector<cd> g = {cd{1, 0}, cd{1, 0}, cd{1, 0}, cd{3, 0}};
  const GroupMap map = GroupMap::contiguous(4, 2);
  const std::vector<cd> prod = group_products(h, g, map);
  REQUIRE(prod.size() == 2);
  CHECK(std::abs(prod[0] - cd{1, 1}) < 1e-15);
  CHECK(std::abs(prod[1] - cd{2, -3}) < 1e-15);
}

TEST_CASE("rate from gain validates its inputs") {
  CHECK(rate_from_gain(cd{0, 0}, 1.0, 1.0) == 0.0);
  CHECK(rate_from_gain(cd{1, 0}, 4.0, 1.0) == doctest::Approx(2.321928094887362));
  CHECK_THROWS(rate_from_gain(cd{1, 0}, 0.0, 1.0));
  CHECK_THROWS(rate_from_gain(cd{1, 0}, 1.0, 0.0));
}

TEST_CASE("per ris rate excludes the direct link") {
  const std::vector<cd> h = {cd{1, 0}, cd{1, 0}};
  const std::vector<cd> g = {cd{1, 0}, cd{1, 0}};
  const GroupMap map = GroupMap::contiguous(2, 2);
  const Codebook cb = make_codebook(1);
  const int idx[] = {0, 0};
  const double rate = per_ris_rate(h, g, std::span<const int>(idx, 2), map, cb, 1.0, 1.0);
  CHECK(rate == doctest::Approx(std::log2(5.0)));
}
