#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "impzone/config.hpp"
#include "support.hpp"

using namespace impzone;
using namespace impzone::testing;

namespace {

Json minimal() {
  return Json::parse(R"({
    "system": {"A": [[-1, 1.2], [0, 0.2]], "B": [[3], [-2]], "period": 1},
    "state_set": {"lower": [0.5, 0], "upper": [4.5, 4]},
    "input_set": {"lower": [-0.2], "upper": [0.2]},
    "target": {"lower": [2.5, 1.5], "upper": [4, 3.5]}
  })");
}

std::string error_message(const Json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    return e.what();
  }
  ADD_FAILURE() << "no error";
  return {};
}

}  // namespace

TEST(Config, Defaults) {
  const ProblemConfig c = parse_config(minimal());
  EXPECT_EQ(c.horizon, 5);
  EXPECT_EQ(c.directions, 16);
  EXPECT_EQ(c.Q, Matrix::Identity(2, 2));
  EXPECT_FALSE(c.x0.has_value());
  EXPECT_FALSE(c.Q_f.has_value());
  EXPECT_TRUE(c.target.is_box());
}

TEST(Config, RoundTrip) {
  ProblemConfig c = example_config();
  c.Q_f = 2.0 * Matrix::Identity(2, 2);
  c.seed = 7;
  c.input_set = SetSpec::hrep((Matrix(2, 1) << 1, -1).finished(), vec({0.2, 0.2}));
  const ProblemConfig back = parse_config(to_json(c));
  EXPECT_TRUE(back == c);
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(Config, ScalarWeights) {
  Json j = minimal();
  j["mpc"] = {{"Q", 3.0}, {"R", 10}, {"Q_O", {{1, 0}, {0, 2}}}};
  const ProblemConfig c = parse_config(j);
  EXPECT_EQ(c.Q, 3.0 * Matrix::Identity(2, 2));
  EXPECT_EQ(c.R(0, 0), 10.0);
  EXPECT_EQ(c.Q_O(1, 1), 2.0);
}

TEST(Config, ErrorsNameTheKey) {
  Json j = minimal();
  j.erase("target");
  EXPECT_NE(error_message(j).find("target"), std::string::npos);

  j = minimal();
  j["system"]["B"] = {{1}, {2}, {3}};
  EXPECT_NE(error_message(j).find("system.B"), std::string::npos);

  j = minimal();
  j["mpc"] = {{"horizon", 0}};
  EXPECT_NE(error_message(j).find("mpc.horizon"), std::string::npos);

  j = minimal();
  j["approximation"] = {{"directions", "many"}};
  EXPECT_NE(error_message(j).find("approximation.directions"), std::string::npos);

  j = minimal();
  j["system"]["period"] = -1;
  EXPECT_NE(error_message(j).find("system.period"), std::string::npos);

  j = minimal();
  j["input_set"] = {{"lower", {-1}}, {"upper", {1, 2}}};
  error_message(j);

  EXPECT_THROW(parse_config(Json::array()), Error);
}

TEST(Config, LoadFromFile) {
  const auto dir = std::filesystem::temp_directory_path() / "impzone_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "ok.json") << to_json(example_config()).dump(2);
    std::ofstream(dir / "bad.json") << "{ not json";
  }
  EXPECT_TRUE(load_config(dir / "ok.json") == example_config());
  EXPECT_THROW(load_config(dir / "bad.json"), Error);
  EXPECT_THROW(load_config(dir / "missing.json"), Error);
  std::filesystem::remove_all(dir);
}

TEST(Config, ExampleSets) {
  const SetsResult& s = example_sets();
  EXPECT_TRUE((s.report.valid == Validity::Valid));
  EXPECT_NEAR(s.equilibria.G(0, 0), 16.9432, 1e-3);
  EXPECT_NEAR(s.equilibria.G(1, 0), 9.0330, 1e-3);
  EXPECT_FALSE(s.report.icis.is_empty());
  const MpcConfig t = make_mpc_config(example_config(), s, MpcVariant::ArtificialVariables);
  EXPECT_NO_THROW(t.validate());
  EXPECT_TRUE(is_subset(s.report.icis, t.state_admissible, 1e-7));
  EXPECT_EQ(parse_variant("setbased"), MpcVariant::SetBased);
  EXPECT_EQ(parse_variant("tracking"), MpcVariant::ArtificialVariables);
  EXPECT_THROW(parse_variant("pid"), Error);
}
