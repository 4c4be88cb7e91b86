#include "risim/setup.hpp"

#include <cmath>
#include <stdexcept>

namespace risim {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace

double SetupSpec::noise_watts() const { return 1e-3 * std::pow(10.0, noise_dbm / 10.0); }

void SetupSpec::validate() const {
  require(setup_id >= 0 && setup_id <= 3, "setup: id must be 0 (custom) or 1..3");
  require(rows >= 1 && cols >= 1, "setup: empty grid");
  require(groups_per_ris >= 1 && elements_per_ris() % groups_per_ris == 0,
          "setup: groups must divide the element count");
  require(phase_bits >= 1, "setup: phase bits must be >= 1");
  require(std::isfinite(tx_power_watts) && tx_power_watts > 0.0, "setup: bad tx power");
  require(std::isfinite(noise_dbm), "setup: bad noise level");
  require(pattern == "isotropic" || pattern == "cosine", "setup: unknown pattern");
  require(std::isfinite(wall_loss_db) && wall_loss_db >= 0.0, "setup: bad wall loss");
}

SetupSpec table_setup(int setup_id) {
  SetupSpec spec;
  spec.setup_id = setup_id;
  switch (setup_id) {
    case 1:
      spec.d_h = 20.0;
      spec.x1 = 25.0;
      spec.y1 = 25.0;
      spec.x2 = 25.0;
      spec.y2 = 35.0;
      spec.wall = false;
      break;
    case 2:
    case 3:
      spec.d_h = 10.0;
      spec.x1 = 5.0;
      spec.y1 = 27.5;
      spec.x2 = 5.0;
      spec.y2 = 32.5;
      spec.wall = setup_id == 3;
      break;
    default:
      throw std::domain_error("setup: preset id must be 1, 2, or 3");
  }
  return spec;
}

Vec3 nominal_rx(const SetupSpec& spec) { return {spec.d_h, 30.0, 1.0}; }

Scene build_scene(const SetupSpec& spec) {
  spec.validate();
  Scene scene;
  scene.tx = {0.0, 30.0, 2.0};
  scene.rx = nominal_rx(spec);
  scene.carrier_hz = spec.carrier_hz;
  scene.pathloss_exponent_ris = spec.pathloss_exponent_ris;
  scene.pathloss_exponent_direct = spec.pathloss_exponent_direct;
  scene.direct_penetration_loss_db = spec.wall ? spec.wall_loss_db : 0.0;
  scene.pattern = spec.pattern == "isotropic" ? RadiationPattern::isotropic()
                                              : RadiationPattern::cosine_power(spec.pattern_exponent);
  const Vec3 centers[4] = {{spec.d_h - 5.0, 25.0, 2.0},
                           {spec.d_h - 5.0, 35.0, 2.0},
                           {spec.x1, spec.y1, 2.0},
                           {spec.x2, spec.y2, 2.0}};
  const Vec3 mid = 0.5 * (scene.tx + scene.rx);
  for (const Vec3& c : centers) {
    RisSite site;
    site.center = c;
    site.geometry.rows = spec.rows;
    site.geometry.cols = spec.cols;
    site.geometry.spacing_wavelengths = spec.spacing_wavelengths;
    site.geometry.normal = {mid.x >= c.x ? 1.0 : -1.0, 0.0, 0.0};
    site.geometry.up = {0.0, 0.0, 1.0};
    scene.ris.push_back(site);
  }
  scene.validate();
  return scene;
}

std::vector<GroupMap> build_group_maps(const SetupSpec& spec) {
  spec.validate();
  GroupMap map;
  bool tiled = false;
  for (std::size_t br = static_cast<std::size_t>(std::sqrt(spec.groups_per_ris)); br >= 1; --br) {
    if (spec.groups_per_ris % br != 0) continue;
    const std::size_t bc = spec.groups_per_ris / br;
    if (spec.rows % br == 0 && spec.cols % bc == 0) {
      map = GroupMap::blocks(spec.rows, spec.cols, br, bc);
      tiled = true;
      break;
    }
  }
  if (!tiled) map = GroupMap::contiguous(spec.elements_per_ris(), spec.groups_per_ris);
  return std::vector<GroupMap>(spec.num_ris(), map);
}

Codebook build_codebook(const SetupSpec& spec) { return make_codebook(spec.phase_bits); }

}  // namespace risim
