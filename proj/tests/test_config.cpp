#include <cmath>

#include "doctest.h"
#include "iongrad/config.hpp"
#include "iongrad/errors.hpp"

using namespace iongrad;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config uses defaults") {
  const auto c = parse_config(R"({"schema_version": 1})");
  CHECK(c.crystal.n_ions == CrystalSpec{}.n_ions);
  CHECK(c.outputs.csv);
  CHECK(c.outputs.json);
}

TEST_CASE("frequencies convert once to rad/s") {
  const auto c = parse_config(R"({
    // comment
    "schema_version": 1,
    "crystal": {"axial_hz": 1.0e5, "radial_x_hz": 1.0e6, "radial_y_hz": 1.1e6},
    "drive": {"detuning_hz": 1.0e3}
  })");
  CHECK(c.crystal.omega_ax == doctest::Approx(constants::two_pi * 1e5));
  CHECK(c.drive.detuning == doctest::Approx(constants::two_pi * 1e3));
}

TEST_CASE("null times are infinite") {
  const auto c = parse_config(R"({"schema_version": 1, "noise": {"t1_s": null, "n_max": null}})");
  CHECK(std::isinf(c.noise.t1));
  CHECK_FALSE(c.n_max.has_value());
  CHECK(parse_config(R"({"schema_version": 1, "noise": {"n_max": 12}})").n_max == 12);
}

TEST_CASE("unknown keys report their path") {
  CHECK(error_of(R"({"schema_version": 1, "crystal": {"n_ion": 3}})").find("crystal.n_ion") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "colour": 3})").find("colour") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "noise": {"t1_model": "fast"}})").find("noise.t1_model") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "crystal": {"n_ions": "eight"}})").find("crystal.n_ions") != std::string::npos);
}

TEST_CASE("schema version is required and checked") {
  CHECK_FALSE(error_of(R"({"crystal": {}})").empty());
  CHECK_FALSE(error_of(R"({"schema_version": 2})").empty());
  CHECK_FALSE(error_of("{ not json").empty());
}

TEST_CASE("shipped config loads") {
  const auto c = load_config(IONGRAD_SOURCE_DIR "/configs/paper_default.json");
  CHECK(c.crystal.n_ions == 8);
  CHECK(c.crystal.omega_ax == doctest::Approx(constants::two_pi * 342.2e3));
  CHECK(c.drive.n_loops == 4);
  CHECK(c.drive.gate_time() == doctest::Approx(200e-6));
  CHECK(c.drive.target_ions == std::array<int, 2>{0, 7});
  CHECK(c.noise.t2 == 0.2);
  CHECK(c.experiment.sequence.n_shots == 200);
  CHECK(c.budget_radial == Direction::radial_x);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}
