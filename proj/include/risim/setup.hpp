#pragma once

#include <string>

#include "risim/ris_core.hpp"

namespace risim {

// Table driven experiment geometry. setup_id 1..3 selects a preset, 0 keeps
// the custom field values. The wall applies a penetration loss to the direct
// link only.
struct SetupSpec {
  int setup_id = 1;
  double d_h = 20.0;
  double x1 = 25.0, y1 = 25.0;
  double x2 = 25.0, y2 = 35.0;
  bool wall = false;

  std::size_t rows = 8, cols = 8;
  std::size_t groups_per_ris = 4;
  int phase_bits = 1;
  double tx_power_watts = 1.0;
  double noise_dbm = -100.0;
  double carrier_hz = 3.5e9;
  double spacing_wavelengths = 0.5;
  double pathloss_exponent_ris = 2.0;
  double pathloss_exponent_direct = 3.5;
  double wall_loss_db = 10.0;
  std::string pattern = "isotropic";
  double pattern_exponent = 1.0;

  std::size_t num_ris() const { return 4; }
  std::size_t elements_per_ris() const { return rows * cols; }
  double noise_watts() const;
  void validate() const;
};

SetupSpec table_setup(int setup_id);

Vec3 nominal_rx(const SetupSpec& spec);

// TX (0,30,2), RX (d_h,30,1), RIS at (d_h-5,25,2), (d_h-5,35,2), (x1,y1,2),
// (x2,y2,2); surfaces face +-x towards the TX/RX midpoint.
Scene build_scene(const SetupSpec& spec);

// Near-square block tiling realizing groups_per_ris on the rows x cols grid,
// identical for every RIS; falls back to contiguous runs when no block grid
// divides evenly.
std::vector<GroupMap> build_group_maps(const SetupSpec& spec);

Codebook build_codebook(const SetupSpec& spec);

}  // namespace risim
