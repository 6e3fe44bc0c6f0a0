#include <doctest.h>

#include "iccsim/config.hpp"
#include "iccsim/sha256.hpp"

using namespace iccsim;

TEST_CASE("sha256 known vectors") {
  CHECK(Sha256::of("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(Sha256::of("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  // 56-byte message exercises the two-block padding path
  CHECK(Sha256::of("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("canonical config round-trips byte-identically") {
  ScenarioConfig c;
  c.name = "demo";
  c.g = 0.02;
  c.delta = 0.025;
  c.temperature_list_uk = std::vector<double>{0, 5, 10, 50, 100};
  c.recoil_geometry = RecoilGeometry::Counterpropagating;
  c.n_samples = 4096;
  const std::string once = serialize_config(c);
  const ScenarioConfig parsed = parse_config_text(once);
  const std::string twice = serialize_config(parsed);
  CHECK(once == twice);
  CHECK(config_fingerprint(c) == config_fingerprint(parsed));
}

TEST_CASE("mutually exclusive fields are enforced") {
  ScenarioConfig c;
  c.g = 0.02;
  c.delta = 0.025;
  CHECK_NOTHROW(c.validate());
  SUBCASE("both nu_y and g") {
    c.nu_y_hz = 1.5e6;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("neither nu_dip nor delta") {
    c.delta.reset();
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("two thermal sources") {
    c.temperature_uk = 10.0;
    c.per_mode_occupations = std::vector<double>{0, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("explicit recoil needs both wave vectors") {
    c.recoil_geometry = RecoilGeometry::Explicit;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
}

TEST_CASE("unknown keys are rejected with a config error") {
  CHECK_THROWS_AS(parse_config_text("[scenario]\nnu_q_hz = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[scenario]\nname demo\n"), ConfigError);
}

TEST_CASE("scenario resolution reproduces the conversion table") {
  ScenarioConfig c;
  c.g = 0.02;
  c.delta = 0.025;
  const TrapScenario s = make_scenario(c);
  CHECK(s.nu_y_hz == doctest::Approx(1.565e6).epsilon(0.005));
  CHECK(s.nu_dip_hz == doctest::Approx(245e3).epsilon(0.005));
  const DimensionlessQuench q = to_dimensionless(s);
  CHECK(q.g == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(q.delta == doctest::Approx(0.025).epsilon(1e-12));
}

TEST_CASE("fingerprint tracks content") {
  ScenarioConfig a;
  a.g = 0.02;
  a.delta = 0.025;
  ScenarioConfig b = a;
  CHECK(config_fingerprint(a) == config_fingerprint(b));
  b.t_max_us = 61.0;
  CHECK(config_fingerprint(a) != config_fingerprint(b));
}

TEST_CASE("automatic time grid satisfies the density rule") {
  ScenarioConfig c;
  c.g = 0.02;
  c.delta = 0.025;
  c.t_max_us = 60.0;
  c.n_samples = 0;
  const double max_omega = 2.41;
  const auto t = make_time_grid(c, max_omega, 2.0 * M_PI * 1e6);
  REQUIRE(t.size() >= 2);
  const double dtau = (t[1] - t[0]) * 2.0 * M_PI * 1e6;
  CHECK(dtau * max_omega <= 0.05 + 1e-9);
  CHECK(t[t.size() - 1] == doctest::Approx(60e-6));
}
