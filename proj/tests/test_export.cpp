#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace xainav;
using namespace xainav::testing;

namespace {

TrialRecord sample_trial() {
  std::mt19937_64 rng(3);
  const auto policy = Policy<double>::random(rng);
  return run_trial(policy, generate_scenarios(8, 1)[0], Condition{});
}

}  // namespace

TEST(Trace, CsvShapeAndRoundTrip) {
  const auto rec = sample_trial();
  const auto csv = trace_csv(rec);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 1 + 15 + 2 + 15 + 5 - 1);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), long(rec.frames.size()) + 1);

  TraceSamples s;
  std::istringstream in(csv);
  read_trace_csv(in, s);
  ASSERT_EQ(s.lidar.size(), rec.frames.size() * 15);
  ASSERT_EQ(s.goal.size(), rec.frames.size() * 2);
  for (std::size_t t = 0; t < rec.frames.size(); ++t) {
    for (std::size_t j = 0; j < 15; ++j) {
      EXPECT_EQ(s.lidar[t * 15 + j], rec.frames[t].attribution.raw.g[j]);
      EXPECT_EQ(s.g_star[t * 15 + j], rec.frames[t].attribution.processed.g_star[j]);
    }
    EXPECT_EQ(s.goal[t * 2], rec.frames[t].attribution.raw.goal()[0]);
  }
}

TEST(Trace, RejectsGarbage) {
  TraceSamples s;
  std::istringstream no_header("1,2,3\n");
  EXPECT_THROW(read_trace_csv(no_header, s), std::invalid_argument);
  std::istringstream bad_cell("timestep,g0\n0,abc\n");
  EXPECT_THROW(read_trace_csv(bad_cell, s), std::invalid_argument);
  std::istringstream short_row("timestep,g0\n0,1,2\n");
  EXPECT_THROW(read_trace_csv(short_row, s), std::invalid_argument);
}

TEST(Histogram, CountsAndEdges) {
  const auto h = histogram("x", {0.0, 0.1, 0.5, 0.99, 1.0}, 0.0, 1.0, 10);
  EXPECT_EQ(h.total(), 5);
  EXPECT_EQ(h.counts[0], 1);
  EXPECT_EQ(h.counts[1], 1);
  EXPECT_EQ(h.counts[5], 1);
  EXPECT_EQ(h.counts[9], 2);  // top edge joins the last bin
  EXPECT_THROW(histogram("x", {1.5}, 0.0, 1.0, 10), std::invalid_argument);
  EXPECT_THROW(histogram("x", {}, 1.0, 1.0, 10), std::invalid_argument);
}

TEST(Histogram, ProcessedSupportInUnitInterval) {
  const auto rec = sample_trial();
  TraceSamples s;
  std::istringstream in(trace_csv(rec));
  read_trace_csv(in, s);
  const auto hs = attribution_histograms(s, 20);
  ASSERT_EQ(hs.size(), 3u);
  EXPECT_EQ(hs[2].series, "g_star");
  EXPECT_EQ(hs[2].lo, 0.0);
  EXPECT_EQ(hs[2].hi, 1.0);
  EXPECT_EQ(hs[2].total(), long(s.g_star.size()));
  EXPECT_EQ(hs[0].total(), long(s.lidar.size()));
  EXPECT_EQ(hs[0].lo, hs[1].lo);  // shared raw range

  const auto csv = histograms_csv(hs);
  EXPECT_EQ(csv.rfind("series,bin_lo,bin_hi,count\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 20);
  const auto svg = histograms_svg(hs);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("log count"), std::string::npos);
}

TEST(SceneMap, CsvAndSvgContents) {
  const auto rec = sample_trial();
  const auto scene = generate_scenarios(8, 1)[0].scene;
  const auto& f = rec.frozen_frame();
  const auto csv = scene_map_csv(scene, f);
  std::istringstream in(csv);
  std::string line;
  int rays = 0, obstacles = 0, robots = 0, goals = 0;
  while (std::getline(in, line)) {
    rays += line.rfind("ray,", 0) == 0;
    obstacles += line.rfind("obstacle,", 0) == 0;
    robots += line.rfind("robot,", 0) == 0;
    goals += line.rfind("goal,", 0) == 0;
  }
  EXPECT_EQ(rays, 15);
  EXPECT_EQ(obstacles, 5);
  EXPECT_EQ(robots, 1);
  EXPECT_EQ(goals, 1);
  const auto svg = scene_map_svg(scene, f);
  EXPECT_NE(svg.find("<polygon"), std::string::npos);
  EXPECT_EQ(std::count_if(svg.begin(), svg.end(), [](char) { return false; }), 0);
  std::size_t lines = 0;
  for (auto pos = svg.find("<line"); pos != std::string::npos; pos = svg.find("<line", pos + 1)) ++lines;
  EXPECT_EQ(lines, 15u);
}
