#include <cstdio>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "cygan/config.hpp"

namespace {

using cygan::Json;

TEST(OmegaSpec, KindNames) {
  for (const char* k : {"inv_loglog", "inv_log", "exp_neg_sqrt_log"}) {
    const auto s = cygan::parse_omega_argument(k);
    EXPECT_EQ(s.kind, k);
    EXPECT_FALSE(s.almost_periodic());
    EXPECT_EQ(cygan::make_gap_width(s).name(), k);
  }
  EXPECT_THROW(cygan::parse_omega_argument("{\"kind\": \"bogus\"}"), cygan::PreconditionError);
}

TEST(OmegaSpec, AlmostPeriodicRoundTrip) {
  const auto s = cygan::parse_omega_argument(
      R"({"kind": "product", "polys": [[1, 1], [2, [0, 1]]], "lambdas": [1, 1.4142135623730951],
          "strict": false, "A": 3, "quad_points": 32})");
  EXPECT_TRUE(s.almost_periodic());
  ASSERT_EQ(s.polys.size(), 2u);
  EXPECT_EQ(s.polys[1][1], std::complex<double>(0.0, 1.0));
  EXPECT_EQ(s.A, 3);
  EXPECT_FALSE(s.strict);
  const auto back = cygan::omega_spec_from_json(cygan::to_json(s));
  EXPECT_EQ(back, s);
  // Shortest round-trip doubles survive text serialization.
  EXPECT_EQ(cygan::omega_spec_from_json(Json::parse(cygan::to_json(s).dump())), s);
}

TEST(OmegaSpec, DefaultsAndDensity) {
  const auto s = cygan::omega_spec_from_json(Json::parse(R"({"kind": "sum", "polys": [[1, 1], [1, 1]]})"));
  EXPECT_EQ(s.lambdas, (std::vector<double>{1.0, 1.0}));
  EXPECT_TRUE(s.independent);
  EXPECT_EQ(s.quad_points, 64);
  EXPECT_EQ(cygan::combine_mode(s), cygan::CombineMode::sum);
  EXPECT_NEAR(cygan::make_density_spec(s).moment(2), 20.0, 1e-9);
  EXPECT_THROW(cygan::combine_mode(cygan::parse_omega_argument("inv_log")), cygan::PreconditionError);
}

TEST(OmegaSpec, MalformedInput) {
  EXPECT_THROW(cygan::parse_omega_argument("{\"kind\": "), cygan::PreconditionError);
  EXPECT_THROW(cygan::omega_spec_from_json(Json::parse(R"({"kind": "product"})")), cygan::PreconditionError);
  EXPECT_THROW(cygan::omega_spec_from_json(Json::parse(R"({"kind": "product", "polys": [["a"]]})")),
               cygan::PreconditionError);
  EXPECT_THROW(cygan::omega_spec_from_json(Json::parse(R"({"kind": "sum", "polys": [[1]], "A": "two"})")),
               cygan::PreconditionError);
  EXPECT_THROW(cygan::omega_spec_from_json(Json::parse(R"({"kind": "sum", "polys": [[1]], "lambda_den": 0})")),
               cygan::PreconditionError);
  EXPECT_THROW(cygan::omega_spec_from_json(Json(3)), cygan::PreconditionError);
  EXPECT_THROW(cygan::parse_omega_argument("/nonexistent/spec.json"), cygan::PreconditionError);
}

TEST(OmegaSpec, ReadsFiles) {
  const auto path = std::filesystem::temp_directory_path() / "cygan_test_spec.json";
  {
    std::ofstream out(path);
    out << R"({"kind": "product", "polys": [[1, 1]], "strict": false})";
  }
  const auto s = cygan::parse_omega_argument(path.string());
  EXPECT_EQ(s.kind, "product");
  EXPECT_NEAR(cygan::make_gap_width(s)(1000.0), cygan::make_gap_width(s).eval(1000.0), 0.0);
  std::filesystem::remove(path);
}

TEST(ExperimentConfig, RoundTripAndValidation) {
  cygan::ExperimentConfig c;
  c.omega = cygan::parse_omega_argument("exp_neg_sqrt_log");
  c.X = 250.5;
  c.samples = 321;
  c.Q = 128;
  c.mode = cygan::SampleMode::fast;
  c.j_max = 6;
  c.offset = 0.125;
  c.out_dir = "runs/a";
  c.threads = 2;
  const auto back = cygan::experiment_config_from_json(Json::parse(cygan::to_json(c).dump()));
  EXPECT_EQ(back, c);

  const auto defaults = cygan::experiment_config_from_json(Json::object());
  EXPECT_EQ(defaults, cygan::ExperimentConfig{});

  for (const char* bad : {R"({"X": 5})", R"({"samples": 3})", R"({"j_max": 5})", R"({"j_max": 10})",
                          R"({"offset": 1.0})", R"({"mode": "slow"})", R"({"Q": 0})", R"({"X": "big"})"}) {
    EXPECT_THROW(cygan::experiment_config_from_json(Json::parse(bad)), cygan::PreconditionError) << bad;
  }
  EXPECT_THROW(cygan::experiment_config_from_json(Json::array()), cygan::PreconditionError);
}

TEST(ExperimentConfig, ThreadCount) {
  cygan::ExperimentConfig c;
  EXPECT_GE(c.thread_count(), 1u);
  c.threads = 3;
  EXPECT_EQ(c.thread_count(), 3u);
}

}  // namespace
