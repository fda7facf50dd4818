// SPDX-License-Identifier: Apache-2.0
//
// srbf - robust transmit beamforming for symbiotic radio
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "srbf/scenario_io.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace {

srbf::ErrorCode code_of(const std::string& text) {
  try {
    srbf::parse_scenario(text);
  } catch (const srbf::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << text;
  return srbf::ErrorCode::io_error;
}

TEST(ParseReal, LiteralsPiAndDbm) {
  EXPECT_EQ(srbf::parse_real("2.5"), 2.5);
  EXPECT_EQ(srbf::parse_real("pi"), std::numbers::pi);
  EXPECT_EQ(srbf::parse_real("-pi/3"), -std::numbers::pi / 3.0);
  EXPECT_EQ(srbf::parse_real("2*pi/3"), 2.0 * std::numbers::pi / 3.0);
  EXPECT_NEAR(srbf::parse_real("-100 dBm"), 1e-13, 1e-27);
  EXPECT_NEAR(srbf::parse_real("30dBm"), 1.0, 1e-15);
  EXPECT_THROW(srbf::parse_real("abc"), srbf::Error);
  EXPECT_THROW(srbf::parse_real(""), srbf::Error);
}

TEST(Scenario, EmptyDocumentIsReference) {
  const srbf::SystemConfig cfg = srbf::parse_scenario("# nothing\n\n");
  const srbf::SystemConfig ref = srbf::SystemConfig::reference();
  EXPECT_EQ(srbf::format_scenario(cfg), srbf::format_scenario(ref));
}

TEST(Scenario, OverridesAndBroadcast) {
  const srbf::SystemConfig cfg = srbf::parse_scenario(
      "M = 4\nK = 3\nL_k = 2\nnoise_power_k = -90 dBm\nuser_distances = 100, 150, 200\n"
      "doa_k = -pi/3, 0, pi/3\nas_k = 0.02\nrate_target_cellular_k = 2\n"
      "rate_target_iot_k = 0.1\nplacement = seeded_random\n");
  EXPECT_EQ(cfg.M, 4);
  EXPECT_EQ(cfg.K, 3);
  EXPECT_EQ(cfg.L_k, (std::vector<int>{2, 2, 2}));
  EXPECT_EQ(cfg.noise_power_k.size(), 3u);
  EXPECT_NEAR(cfg.noise_power_k[2], 1e-12, 1e-26);
  EXPECT_EQ(cfg.doa_k[1], 0.0);
  EXPECT_EQ(cfg.placement, srbf::Placement::seeded_random);
  EXPECT_EQ(cfg.device_count(), 6);
}

TEST(Scenario, GeneralModelSelectedByL) {
  const srbf::SystemConfig cfg = srbf::parse_scenario("L = 5\n");
  EXPECT_EQ(cfg.model, srbf::ChannelModel::general);
  EXPECT_EQ(cfg.device_count(), 5);
}

TEST(Scenario, Errors) {
  EXPECT_EQ(code_of("bogus = 1\n"), srbf::ErrorCode::invalid_config);
  EXPECT_EQ(code_of("M = 4\nM = 5\n"), srbf::ErrorCode::parse_error);
  EXPECT_EQ(code_of("M 4\n"), srbf::ErrorCode::parse_error);
  EXPECT_EQ(code_of("L = 3\nL_k = 2\n"), srbf::ErrorCode::invalid_config);
  EXPECT_EQ(code_of("alpha = 0\n"), srbf::ErrorCode::invalid_config);
  EXPECT_EQ(code_of("user_distances = 1, 2, 3\n"), srbf::ErrorCode::invalid_config);
  EXPECT_EQ(code_of("placement = diagonal\n"), srbf::ErrorCode::parse_error);
}

TEST(Scenario, FormatRoundTripsExactly) {
  srbf::SystemConfig cfg = srbf::SystemConfig::reference();
  cfg.alpha = 0.1 + 0.2;
  cfg.doa_k = {-1.0 / 3.0, 2.0 / 7.0};
  cfg.placement = srbf::Placement::seeded_random;
  const std::string text = srbf::format_scenario(cfg);
  const srbf::SystemConfig back = srbf::parse_scenario(text);
  EXPECT_EQ(back.alpha, cfg.alpha);
  EXPECT_EQ(back.doa_k, cfg.doa_k);
  EXPECT_EQ(back.noise_power_k, cfg.noise_power_k);
  EXPECT_EQ(srbf::format_scenario(back), text);
}

TEST(Scenario, MissingFileIsIoError) {
  try {
    srbf::load_scenario("/nonexistent/scenario.cfg");
    FAIL();
  } catch (const srbf::Error& e) {
    EXPECT_EQ(e.code(), srbf::ErrorCode::io_error);
  }
}

}  // namespace
