#include <sstream>

#include "doctest.h"
#include "risim/config.hpp"

using namespace risim;

TEST_CASE("table presets place tx, rx, and the four ris") {
  const SetupSpec s1 = table_setup(1);
  CHECK(s1.d_h == 20.0);
  CHECK_FALSE(s1.wall);
  const Scene scene1 = build_scene(s1);
  CHECK(scene1.tx.x == 0.0);
  CHECK(scene1.tx.y == 30.0);
  CHECK(scene1.tx.z == 2.0);
  const Vec3 rx1 = nominal_rx(s1);
  CHECK(rx1.x == 20.0);
  CHECK(rx1.y == 30.0);
  CHECK(rx1.z == 1.0);
  REQUIRE(scene1.ris.size() == 4);
  CHECK(scene1.ris[0].center.x == 15.0);
  CHECK(scene1.ris[0].center.y == 25.0);
  CHECK(scene1.ris[0].center.z == 2.0);
  CHECK(scene1.ris[1].center.x == 15.0);
  CHECK(scene1.ris[1].center.y == 35.0);
  CHECK(scene1.ris[2].center.x == 25.0);
  CHECK(scene1.ris[2].center.y == 25.0);
  CHECK(scene1.ris[3].center.x == 25.0);
  CHECK(scene1.ris[3].center.y == 35.0);
  CHECK(scene1.direct_penetration_loss_db == 0.0);

  const SetupSpec s2 = table_setup(2);
  CHECK(s2.d_h == 10.0);
  CHECK_FALSE(s2.wall);
  const Scene scene2 = build_scene(s2);
  CHECK(scene2.ris[0].center.x == 5.0);
  CHECK(scene2.ris[2].center.x == 5.0);
  CHECK(scene2.ris[2].center.y == 27.5);
  CHECK(scene2.ris[3].center.y == 32.5);

  const SetupSpec s3 = table_setup(3);
  CHECK(s3.wall);
  CHECK(s3.d_h == s2.d_h);
  const Scene scene3 = build_scene(s3);
  CHECK(scene3.direct_penetration_loss_db == 10.0);

  CHECK_THROWS(table_setup(4));
}

TEST_CASE("panels face the midpoint between tx and the nominal rx") {
  const Scene scene = build_scene(table_setup(1));
  // mid = (10, 30): ris at x=15 face -x, ris at x=25 face... also -x
  CHECK(scene.ris[0].geometry.normal.x == -1.0);
  CHECK(scene.ris[2].geometry.normal.x == -1.0);
  const Scene scene2 = build_scene(table_setup(2));
  // mid = (5, 30): panels at x=5 face +x (ties go toward positive x)
  CHECK(scene2.ris[0].geometry.normal.x == 1.0);
}

TEST_CASE("noise power converts dbm to watts") {
  SetupSpec spec = table_setup(1);
  CHECK(spec.noise_watts() == doctest::Approx(1e-13).epsilon(1e-12));
  spec.noise_dbm = 0.0;
  CHECK(spec.noise_watts() == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("group maps tile the panel into k0 blocks") {
  SetupSpec spec = table_setup(1);
  const std::vector<GroupMap> maps = build_group_maps(spec);
  REQUIRE(maps.size() == 4);
  for (const GroupMap& map : maps) {
    CHECK(map.num_groups == 4);
    CHECK(map.assignment.size() == 64);
    std::vector<std::size_t> counts(4, 0);
    for (int gid : map.assignment) ++counts[static_cast<std::size_t>(gid)];
    for (std::size_t c : counts) CHECK(c == 16);
  }
  // element k = p*8+q; 4x4 blocks: element (0,0) group 0, (0,4) group 1,
  // (4,0) group 2, (4,4) group 3
  CHECK(maps[0].assignment[0] == 0);
  CHECK(maps[0].assignment[4] == 1);
  CHECK(maps[0].assignment[32] == 2);
  CHECK(maps[0].assignment[36] == 3);
}

TEST_CASE("config keys apply in order and reject unknowns") {
  ExperimentConfig cfg;
  apply_config_key(cfg, "setup", "2");
  CHECK(cfg.setup.d_h == 10.0);
  apply_config_key(cfg, "d_h", "12.5");
  CHECK(cfg.setup.d_h == 12.5);
  apply_config_key(cfg, "seed", "99");
  CHECK(cfg.seed == 99);
  CHECK(cfg.hyper.seed == 99);
  apply_config_key(cfg, "approaches", "random,pos_cen");
  REQUIRE(cfg.approaches.size() == 2);
  CHECK(cfg.approaches[0] == Approach::Random);
  CHECK_THROWS(apply_config_key(cfg, "bogus_key", "1"));
  CHECK_THROWS(apply_config_key(cfg, "epochs", "ten"));
  CHECK_THROWS(apply_config_key(cfg, "setup", "7"));
  CHECK_THROWS(apply_config_key(cfg, "optimizer", "rmsprop"));
}

TEST_CASE("config text supports comments and blank lines") {
  ExperimentConfig cfg;
  std::istringstream is(
      "# a comment\n"
      "\n"
      "setup=3\n"
      "n_train = 123   # inline comment\n"
      "nn_hidden_ind=32, 16, 4\n"
      "rays_per_cluster=6,6,6\n");
  apply_config_text(cfg, is);
  CHECK(cfg.setup.wall);
  CHECK(cfg.n_train == 123);
  REQUIRE(cfg.nn_hidden_ind.size() == 3);
  CHECK(cfg.nn_hidden_ind[1] == 16);
  CHECK(cfg.clusters.rays_per_cluster == std::vector<std::size_t>{6, 6, 6});
  std::istringstream bad("not a key value line\n");
  CHECK_THROWS(apply_config_text(cfg, bad));
}

TEST_CASE("config echo round trips exactly") {
  ExperimentConfig cfg;
  apply_config_key(cfg, "setup", "3");
  apply_config_key(cfg, "learning_rate", "0.0005");
  apply_config_key(cfg, "approaches", "exhaustive,random,chan_cen");
  apply_config_key(cfg, "grid_center_x", "11.0");
  apply_config_key(cfg, "grid_center_y", "30.0");
  apply_config_key(cfg, "grid_center_z", "1.0");
  apply_config_key(cfg, "intra_cluster_spread", "0.0625");
  const std::string echo = config_echo(cfg);
  ExperimentConfig back;
  std::istringstream is(echo);
  apply_config_text(back, is);
  CHECK(config_echo(back) == echo);
  CHECK(back.setup.wall == cfg.setup.wall);
  CHECK(back.hyper.learning_rate == cfg.hyper.learning_rate);
  CHECK(back.grid_center_set);
  CHECK(back.grid_center.x == 11.0);
}

TEST_CASE("default experiment config validates") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.hidden_for(EncoderKind::PosCen) == std::vector<Eigen::Index>{256, 128, 16});
  CHECK(cfg.hidden_for(EncoderKind::ChanInd) == std::vector<Eigen::Index>{64, 32, 4});
  cfg.nn_dims_mode = "formula";
  // centralized: 3MK = 768, 3MK/2 = 384, MK0 = 16
  CHECK(cfg.hidden_for(EncoderKind::ChanCen) ==
        std::vector<Eigen::Index>{768, 384, 16});
  CHECK(cfg.hidden_for(EncoderKind::PosInd) == std::vector<Eigen::Index>{192, 96, 4});
  cfg.n_train = 0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("rx grid recenters with the setup or an explicit override") {
  ExperimentConfig cfg;
  apply_config_key(cfg, "setup", "2");
  CHECK(cfg.rx_grid().center.x == 10.0);
  apply_config_key(cfg, "grid_center_x", "20.0");
  apply_config_key(cfg, "grid_center_y", "30.0");
  apply_config_key(cfg, "grid_center_z", "1.0");
  CHECK(cfg.rx_grid().center.x == 20.0);
}
