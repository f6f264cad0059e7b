#include <gtest/gtest.h>

#include <filesystem>

#include "json.hpp"
#include "rigcov/config.h"
#include "rigcov/error.h"
#include "rigcov/io.h"

namespace rigcov {
namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kInvalidInput;
}

TEST(Format, NineSignificantDigits) {
  EXPECT_EQ(format_number(1.0 / 3), "0.333333333");
  EXPECT_EQ(format_number(1234567890123.0), "1.23456789e+12");
  EXPECT_EQ(format_number(std::nan("")), "nan");
}

TEST(Config, Defaults) {
  const SimConfig c = default_config(3);
  EXPECT_EQ(c.robots.size(), 6u);
  EXPECT_EQ(c.graph.num_edges(), 9);
  EXPECT_EQ(c.mpc.horizon, 10);
  EXPECT_EQ(c.mpc.S_r, Eigen::MatrixXd::Identity(2, 2));
  EXPECT_DOUBLE_EQ(c.terminal.c_fraction, 0.5);
  EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, ParsesExplicitFields) {
  const char* text = R"({
    "seed": 4, "steps": 12, "epsilon": 0.02,
    "density": {"type": "uniform"},
    "model": {"type": "drag", "kappa": 0.3},
    "robots": [{"position": [0.2, 0.2]}, {"position": [0.8, 0.3]}, {"position": [0.5, 0.8], "velocity": [0.1, 0]}],
    "graph": {"n": 3, "edges": [[0, 1], [0, 2], [1, 2]]},
    "mpc": {"horizon": 8, "mu": 0.4, "S_r": 2.0, "Q": [1, 1, 0.1, 0.1], "R": [[0.5, 0], [0, 0.5]]},
    "faults": [{"at_step": 5, "robot": 2}]
  })";
  const SimConfig c = parse_config(text);
  EXPECT_EQ(c.seed, 4u);
  EXPECT_EQ(c.steps, 12);
  EXPECT_TRUE(c.density.is_uniform());
  EXPECT_EQ(c.robots[0].model.type, "drag");
  EXPECT_DOUBLE_EQ(c.robots[0].model.kappa, 0.3);
  EXPECT_DOUBLE_EQ(c.robots[2].velocity.x(), 0.1);
  EXPECT_EQ(c.mpc.horizon, 8);
  EXPECT_DOUBLE_EQ(c.mpc.S_r(1, 1), 2.0);
  EXPECT_DOUBLE_EQ(c.mpc.Q(2, 2), 0.1);
  EXPECT_DOUBLE_EQ(c.mpc.R(0, 0), 0.5);
  ASSERT_EQ(c.faults.size(), 1u);
  EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, SeedOverrideChangesRandomDraws) {
  const SimConfig a = parse_config("{}", 1);
  const SimConfig b = parse_config("{}", 2);
  const SimConfig a2 = parse_config("{}", 1);
  EXPECT_NE(a.robots[0].position, b.robots[0].position);
  EXPECT_EQ(a.robots[0].position, a2.robots[0].position);
}

TEST(Config, Rejections) {
  EXPECT_EQ(kind_of([] { parse_config("{not json"); }), ErrorKind::kConfig);
  EXPECT_EQ(kind_of([] { parse_config(R"({"model": {"type": "unicycle"}})"); }), ErrorKind::kConfig);
  EXPECT_EQ(kind_of([] { load_config("/nonexistent/missing.json"); }), ErrorKind::kIo);

  SimConfig c = default_config(1);
  c.graph = Graph(6, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}, {3, 5}});
  try {
    validate_config(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    EXPECT_NE(std::string(e.what()).find("0,1,2,3"), std::string::npos) << e.what();
  }

  c = default_config(1);
  c.robots[1].position = c.robots[0].position;
  EXPECT_EQ(kind_of([&] { validate_config(c); }), ErrorKind::kConfig);
  c = default_config(1);
  c.robots[0].position = Eigen::Vector2d(1.5, 0.5);
  EXPECT_EQ(kind_of([&] { validate_config(c); }), ErrorKind::kConfig);
  c = default_config(1);
  c.faults = {{3, 9}};
  EXPECT_EQ(kind_of([&] { validate_config(c); }), ErrorKind::kConfig);
}

TEST(Io, GraphRoundTrip) {
  const HennebergResult r = henneberg_generate(7, 5, 0.5);
  const std::string text = graph_to_json(r.graph, &r.log);
  EXPECT_EQ(graph_from_json(text), r.graph);
  const nlohmann::json j = nlohmann::json::parse(text);
  EXPECT_EQ(j["henneberg_log"].size(), 5u);
  EXPECT_EQ(kind_of([] { graph_from_json("[1,2]"); }), ErrorKind::kInvalidInput);
}

TEST(Io, FrameworkAndPositions) {
  const Framework fw = framework_from_json(
      R"({"graph": {"n": 3, "edges": [[0,1],[1,2],[0,2]]}, "positions": [[0,0],[1,0],[0,1]]})");
  EXPECT_EQ(fw.size(), 3);
  EXPECT_EQ(positions_from_json(R"({"positions": [[0.1, 0.2]]})").size(), 1u);
  EXPECT_EQ(positions_from_json("[[0.1, 0.2], [0.3, 0.4]]").size(), 2u);
}

TEST(Io, FilesRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "rigcov_io_test.txt";
  write_text_file(path.string(), "abc\n");
  EXPECT_EQ(read_text_file(path.string()), "abc\n");
  std::filesystem::remove(path);
  EXPECT_EQ(kind_of([] { write_text_file("/nonexistent/dir/x", "a"); }), ErrorKind::kIo);
}

}  // namespace
}  // namespace rigcov
