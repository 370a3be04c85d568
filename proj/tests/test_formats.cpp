#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "crowdseg/advection.hpp"
#include "crowdseg/config.hpp"
#include "crowdseg/errors.hpp"
#include "crowdseg/flow_field.hpp"
#include "crowdseg/frame.hpp"
#include "crowdseg/image_io.hpp"
#include "crowdseg/scalar_field.hpp"
#include "crowdseg/segmentation.hpp"
#include "test_util.hpp"

using namespace crowdseg;
using testutil::TempDir;
using testutil::same_bytes;

TEST_CASE("flo files round-trip byte-exactly") {
  TempDir dir("flo");
  const FlowField f = testutil::random_flow(17, 11, 8);
  write_flo(f, dir.file("a.flo"));
  const FlowField r = read_flo(dir.file("a.flo"));
  CHECK(r.width == 17);
  CHECK(r.height == 11);
  write_flo(r, dir.file("b.flo"));
  CHECK(same_bytes(dir.file("a.flo"), dir.file("b.flo")));
}

TEST_CASE("flo header layout is the Middlebury format") {
  TempDir dir("flohdr");
  FlowField f = make_flow_field(2, 1);
  f.u_at(0, 0) = 1.0;
  f.v_at(1, 0) = -2.0;
  write_flo(f, dir.file("a.flo"));
  const auto bytes = testutil::read_bytes(dir.file("a.flo"));
  REQUIRE(bytes.size() == 4 + 4 + 4 + 2 * 2 * 4);
  float magic;
  std::memcpy(&magic, bytes.data(), 4);
  CHECK(magic == 202021.25f);
  std::int32_t w, h;
  std::memcpy(&w, bytes.data() + 4, 4);
  std::memcpy(&h, bytes.data() + 8, 4);
  CHECK(w == 2);
  CHECK(h == 1);
  float u0;
  std::memcpy(&u0, bytes.data() + 12, 4);
  CHECK(u0 == 1.0f);
}

TEST_CASE("flo reader rejects a bad magic") {
  TempDir dir("flobad");
  std::ofstream(dir.file("x.flo"), std::ios::binary) << "garbage data here";
  CHECK_THROWS_AS(read_flo(dir.file("x.flo")), IoError);
}

TEST_CASE("fmap files round-trip byte-exactly and carry the header") {
  TempDir dir("fmap");
  FlowMap m;
  m.cols = 9;
  m.rows = 7;
  m.T = 12.5;
  m.direction = Direction::backward;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 63; ++i) {
    m.final_x.push_back(testutil::uniform(rng, 0.0, 8.0));
    m.final_y.push_back(testutil::uniform(rng, 0.0, 6.0));
  }
  write_fmap(m, dir.file("a.fmap"));
  const auto bytes = testutil::read_bytes(dir.file("a.fmap"));
  REQUIRE(bytes.size() == 16 + 2 * 63 * 4);
  CHECK(bytes[0] == 'F');
  CHECK(bytes[1] == 'M');
  CHECK(bytes[2] == 'A');
  CHECK(bytes[3] == 'P');
  CHECK(static_cast<unsigned char>(bytes[4]) == 9);  // uint16 cols LE
  CHECK(bytes[5] == 0);
  CHECK(static_cast<unsigned char>(bytes[12]) == 1);  // direction byte

  const FlowMap r = read_fmap(dir.file("a.fmap"));
  CHECK(r.cols == 9);
  CHECK(r.rows == 7);
  CHECK(r.direction == Direction::backward);
  CHECK(r.T == doctest::Approx(12.5));
  write_fmap(r, dir.file("b.fmap"));
  CHECK(same_bytes(dir.file("a.fmap"), dir.file("b.fmap")));
}

TEST_CASE("sfld files round-trip byte-exactly") {
  TempDir dir("sfld");
  const ScalarField f = testutil::random_scalar(13, 21, 5);
  write_sfld(f, dir.file("a.sfld"));
  const auto bytes = testutil::read_bytes(dir.file("a.sfld"));
  REQUIRE(bytes.size() == 12 + 13 * 21 * 4);
  CHECK(bytes[0] == 'S');
  const ScalarField r = read_sfld(dir.file("a.sfld"));
  CHECK(r.cols == 13);
  CHECK(r.rows == 21);
  write_sfld(r, dir.file("b.sfld"));
  CHECK(same_bytes(dir.file("a.sfld"), dir.file("b.sfld")));
}

TEST_CASE("pgm frames round-trip byte-exactly") {
  TempDir dir("pgm");
  Frame f = make_frame(16, 12);
  std::mt19937_64 rng(7);
  for (auto& v : f.intensity) v = std::round(testutil::uniform(rng, 0.0, 1.0) * 255.0) / 255.0;
  save_frame_pgm(f, dir.file("a.pgm"));
  const Frame r = load_frame(dir.file("a.pgm"));
  save_frame_pgm(r, dir.file("b.pgm"));
  CHECK(same_bytes(dir.file("a.pgm"), dir.file("b.pgm")));
  CHECK(r.intensity == f.intensity);
}

TEST_CASE("png frames round-trip byte-exactly") {
  TempDir dir("png");
  Frame f = make_frame(20, 14);
  std::mt19937_64 rng(9);
  for (auto& v : f.intensity) v = std::round(testutil::uniform(rng, 0.0, 1.0) * 255.0) / 255.0;
  save_frame_png(f, dir.file("a.png"));
  const Frame r = load_frame(dir.file("a.png"));
  CHECK(r.intensity == f.intensity);
  save_frame_png(r, dir.file("b.png"));
  CHECK(same_bytes(dir.file("a.png"), dir.file("b.png")));
}

TEST_CASE("label maps round-trip through 16-bit big-endian PGM") {
  TempDir dir("labels");
  LabelMap m;
  m.cols = 5;
  m.rows = 4;
  m.labels = {0, 1, 1, 2, 2, 0, 1, 1, 2, 2, 3, 3, 3, 0, 0, 3, 3, 3, 0, 3};
  m.count = 3;
  write_label_pgm(m, dir.file("a.pgm"));
  const auto bytes = testutil::read_bytes(dir.file("a.pgm"));
  // header "P5\n5 4\n65535\n" then big-endian samples
  const std::string header(bytes.begin(), bytes.begin() + 12);
  CHECK(header == "P5\n5 4\n65535");
  // first sample is 0x0000, second is 0x0001 big-endian
  CHECK(bytes[13] == 0);
  CHECK(bytes[14] == 0);
  CHECK(bytes[15] == 0);
  CHECK(bytes[16] == 1);

  const LabelMap r = read_label_pgm(dir.file("a.pgm"));
  CHECK(r.labels == m.labels);
  CHECK(r.count == 3);
  write_label_pgm(r, dir.file("b.pgm"));
  CHECK(same_bytes(dir.file("a.pgm"), dir.file("b.pgm")));
}

TEST_CASE("label pgm reader rejects non-contiguous labels") {
  TempDir dir("labelbad");
  LabelMap m;
  m.cols = 2;
  m.rows = 1;
  m.labels = {1, 5};
  m.count = 5;
  write_label_pgm(m, dir.file("bad.pgm"));
  CHECK_THROWS_AS(read_label_pgm(dir.file("bad.pgm")), IoError);
}

TEST_CASE("stats jsonl round-trips byte-exactly") {
  TempDir dir("stats");
  std::vector<SegmentStats> stats(2);
  stats[0].label = 1;
  stats[0].area = 320;
  stats[0].mean_flow = {0.75, -1.25};
  stats[0].mean_magnitude = 1.4577379737113251;
  stats[1].label = 2;
  stats[1].area = 151;
  stats[1].mean_flow = {-0.1, 0.0};
  stats[1].mean_magnitude = 0.1;
  write_stats_jsonl(stats, dir.file("a.jsonl"));
  const auto r = read_stats_jsonl(dir.file("a.jsonl"));
  REQUIRE(r.size() == 2);
  CHECK(r[0].label == 1);
  CHECK(r[0].area == 320);
  CHECK(r[0].mean_flow.x == 0.75);
  CHECK(r[0].mean_magnitude == stats[0].mean_magnitude);
  write_stats_jsonl(r, dir.file("b.jsonl"));
  CHECK(same_bytes(dir.file("a.jsonl"), dir.file("b.jsonl")));
}

TEST_CASE("config round-trips losslessly") {
  PipelineConfig c;
  c.flow_smoothness = 0.7301;
  c.flow_iterations = 141;
  c.flow_window = 4;
  c.advect_T = 17.25;
  c.advect_h = 0.125;
  c.advect_grid_step = 2.0;
  c.advect_mode = FlowMode::unsteady;
  c.ftle_sigma = 2.25;
  c.ftle_margin = 7;
  c.ftle_combine = CombineMode::backward_only;
  c.seg_min_area = 99;
  c.seg_vacuum_threshold = 0.033;
  c.seg_merge_angle_deg = 45.5;
  c.seg_merge_band = 3;
  const std::string text = serialize_config(c);
  const PipelineConfig r = parse_config_text(text);
  CHECK(r == c);
  CHECK(serialize_config(r) == text);
}

TEST_CASE("config parser handles comments, blanks and whitespace") {
  const PipelineConfig c = parse_config_text(
      "# pipeline settings\n"
      "\n"
      "  advect.T   =  12.5   # integration length in frames\n"
      "flow.window = sliding(6)\n"
      "ftle.combine = forward_only\n");
  CHECK(c.advect_T == 12.5);
  CHECK(c.flow_window == 6);
  CHECK(c.ftle_combine == CombineMode::forward_only);
  CHECK(c.flow_iterations == 200);  // untouched defaults stay
}

TEST_CASE("config parser rejects unknown keys by name") {
  CHECK_THROWS_WITH_AS(parse_config_text("ftle.sigmah = 1.5\n"),
                       "unknown config key 'ftle.sigmah'", ValueError);
}

TEST_CASE("config validation names the offending key") {
  CHECK_THROWS_WITH_AS(parse_config_text("ftle.sigma = -2\n"),
                       "config key 'ftle.sigma': must be positive", ValueError);
  CHECK_THROWS_WITH_AS(parse_config_text("advect.T = banana\n"),
                       "config key 'advect.T': not a number: 'banana'", ValueError);
  CHECK_THROWS_AS(parse_config_text("flow.window = sliding(0)\n"), ValueError);
  CHECK_THROWS_AS(parse_config_text("advect.T = 1\nadvect.h = 2\n"), ValueError);
  CHECK_THROWS_AS(parse_config_text("seg.mergeAngleDeg = 181\n"), ValueError);
}

TEST_CASE("config file round-trips through disk") {
  TempDir dir("cfg");
  PipelineConfig c;
  c.advect_T = 42.0;
  save_config(c, dir.file("a.cfg"));
  const PipelineConfig r = load_config(dir.file("a.cfg"));
  CHECK(r == c);
  save_config(r, dir.file("b.cfg"));
  CHECK(same_bytes(dir.file("a.cfg"), dir.file("b.cfg")));
}

TEST_CASE("pgm16 big-endian bytes decode to the right values") {
  TempDir dir("pgm16");
  Gray16 img{2, 1, {0x0102, 0xfffe}};
  write_pgm16(img, dir.file("x.pgm"));
  const Gray16 r = read_pgm16(dir.file("x.pgm"));
  CHECK(r.pixels[0] == 0x0102);
  CHECK(r.pixels[1] == 0xfffe);
  const auto bytes = testutil::read_bytes(dir.file("x.pgm"));
  const size_t off = bytes.size() - 4;
  CHECK(static_cast<unsigned char>(bytes[off]) == 0x01);
  CHECK(static_cast<unsigned char>(bytes[off + 1]) == 0x02);
  CHECK(static_cast<unsigned char>(bytes[off + 2]) == 0xff);
  CHECK(static_cast<unsigned char>(bytes[off + 3]) == 0xfe);
}
