#include "crowdseg/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <set>

#include <nlohmann/json.hpp>

#include "crowdseg/errors.hpp"
#include "crowdseg/image_io.hpp"

namespace crowdseg {

namespace {

// 4-neighbor offsets in deterministic visit order: up, left, right, down.
constexpr int kDx[4] = {0, -1, 1, 0};
constexpr int kDy[4] = {-1, 0, 0, 1};

// Remaps surviving positive labels to 1..count preserving ascending order.
void compact_labels(LabelMap& m) {
  std::set<int> present;
  for (int v : m.labels)
    if (v > 0) present.insert(v);
  std::map<int, int> remap;
  int next = 1;
  for (int old : present) remap[old] = next++;
  for (int& v : m.labels)
    if (v > 0) v = remap[v];
  m.count = next - 1;
}

void check_flow_covers(const LabelMap& map, const FlowField& flow) {
  if (map.offset_x < 0 || map.offset_y < 0 ||
      map.offset_x + map.cols > flow.width || map.offset_y + map.rows > flow.height)
    throw ValueError("label map does not fit flow field");
}

}  // namespace

LabelMap watershed(const ScalarField& height) {
  if (height.cols < 3 || height.rows < 3) throw ValueError("height field too small");
  validate_scalar_field(height);

  const int w = height.cols, h = height.rows;
  const size_t n = static_cast<size_t>(w) * h;
  std::vector<int> label(n, -1);
  std::vector<std::uint8_t> seen(n, 0);

  // Pass 1: regional minima become seeds, labeled in row-major discovery order.
  int next_label = 1;
  std::vector<int> plateau;
  for (size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    const double v = height.values[start];
    plateau.clear();
    plateau.push_back(static_cast<int>(start));
    seen[start] = 1;
    bool is_min = true;
    for (size_t qi = 0; qi < plateau.size(); ++qi) {
      const int p = plateau[qi];
      const int x = p % w, y = p / w;
      for (int k = 0; k < 4; ++k) {
        const int nx = x + kDx[k], ny = y + kDy[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const int q = ny * w + nx;
        if (height.values[q] == v) {
          if (!seen[q]) {
            seen[q] = 1;
            plateau.push_back(q);
          }
        } else if (height.values[q] < v) {
          is_min = false;
        }
      }
    }
    if (is_min) {
      for (int p : plateau) label[p] = next_label;
      ++next_label;
    }
  }

  // Pass 2: flood by ascending height; FIFO among equal heights. Each pixel
  // is claimed by the first front that reaches it (fronts advance in height
  // order, so the claimant is the region of the pixel's lowest settled
  // neighbor). A pixel whose 4-neighborhood already holds a settled pixel of
  // a different region when it pops was reached by two fronts in the same
  // wave: it settles as a watershed-line pixel (0). Line pixels do not stop
  // the claim front, so region shapes are independent of the line marking.
  struct QItem {
    double value;
    std::uint64_t seq;
    int idx;
  };
  auto cmp = [](const QItem& a, const QItem& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.seq > b.seq;
  };
  std::priority_queue<QItem, std::vector<QItem>, decltype(cmp)> pq(cmp);
  std::uint64_t seq = 0;

  std::vector<int> claim = label;            // -1 = unclaimed
  std::vector<int> settled(n, -1);           // -1 = pending, else final label
  for (size_t i = 0; i < n; ++i) {
    if (label[i] > 0) {
      settled[i] = label[i];
      pq.push({height.values[i], seq++, static_cast<int>(i)});
    }
  }

  while (!pq.empty()) {
    const QItem item = pq.top();
    pq.pop();
    const int p = item.idx;
    const int x = p % w, y = p / w;
    if (settled[p] == -1) {
      int final_label = claim[p];
      for (int k = 0; k < 4; ++k) {
        const int nx = x + kDx[k], ny = y + kDy[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const int s = settled[ny * w + nx];
        if (s > 0 && s != claim[p]) {
          final_label = 0;
          break;
        }
      }
      settled[p] = final_label;
    }
    for (int k = 0; k < 4; ++k) {
      const int nx = x + kDx[k], ny = y + kDy[k];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      const int q = ny * w + nx;
      if (claim[q] == -1) {
        claim[q] = claim[p];
        pq.push({height.values[q], seq++, q});
      }
    }
  }
  for (size_t i = 0; i < n; ++i)
    if (settled[i] == -1) settled[i] = 0;

  LabelMap m;
  m.cols = w;
  m.rows = h;
  m.labels = std::move(settled);
  m.offset_x = height.offset_x;
  m.offset_y = height.offset_y;
  m.count = next_label - 1;
  return m;
}

LabelMap remove_small_segments(const LabelMap& map, int min_area) {
  if (min_area < 1) throw ValueError("min_area must be positive");
  std::vector<long> area(static_cast<size_t>(map.count) + 1, 0);
  for (int v : map.labels)
    if (v > 0) ++area[v];
  LabelMap out = map;
  for (int& v : out.labels)
    if (v > 0 && area[v] < min_area) v = 0;
  compact_labels(out);
  return out;
}

LabelMap remove_vacuum_segments(const LabelMap& map, const FlowField& flow,
                                double mag_threshold) {
  if (mag_threshold < 0.0) throw ValueError("mag_threshold must be non-negative");
  check_flow_covers(map, flow);
  std::vector<double> mag_sum(static_cast<size_t>(map.count) + 1, 0.0);
  std::vector<long> area(static_cast<size_t>(map.count) + 1, 0);
  for (int y = 0; y < map.rows; ++y) {
    for (int x = 0; x < map.cols; ++x) {
      const int l = map.at(x, y);
      if (l <= 0) continue;
      mag_sum[l] += std::hypot(flow.u_at(map.offset_x + x, map.offset_y + y),
                               flow.v_at(map.offset_x + x, map.offset_y + y));
      ++area[l];
    }
  }
  LabelMap out = map;
  for (int& v : out.labels)
    if (v > 0 && mag_sum[v] / static_cast<double>(area[v]) < mag_threshold) v = 0;
  compact_labels(out);
  return out;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // keep the smaller label as representative
    parent[b] = a;
  }
};

}  // namespace

LabelMap merge_similar_segments(const LabelMap& map, const FlowField& flow,
                                double angle_threshold, int band) {
  if (band < 1) throw ValueError("band must be positive");
  if (angle_threshold < 0.0) throw ValueError("angle_threshold must be non-negative");
  check_flow_covers(map, flow);
  if (map.count < 2) return map;

  const int w = map.cols, h = map.rows;
  using PairKey = std::pair<int, int>;
  // Per adjacent pair, each side's shared-boundary pixels.
  std::map<PairKey, std::array<std::set<int>, 2>> boundaries;

  auto note_contact = [&](int la, int pa, int lb, int pb) {
    PairKey key{std::min(la, lb), std::max(la, lb)};
    auto& sides = boundaries[key];
    sides[la < lb ? 0 : 1].insert(pa);
    sides[la < lb ? 1 : 0].insert(pb);
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int idx = y * w + x;
      const int l = map.labels[idx];
      if (l > 0) {
        // direct 4-neighbor contact (right and down cover each pair once)
        if (x + 1 < w) {
          const int r = map.labels[idx + 1];
          if (r > 0 && r != l) note_contact(l, idx, r, idx + 1);
        }
        if (y + 1 < h) {
          const int d = map.labels[idx + w];
          if (d > 0 && d != l) note_contact(l, idx, d, idx + w);
        }
      } else {
        // width-1 ridge pixels count as shared boundary
        std::vector<std::pair<int, int>> touching;  // (label, pixel)
        for (int k = 0; k < 4; ++k) {
          const int nx = x + kDx[k], ny = y + kDy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const int nl = map.labels[ny * w + nx];
          if (nl > 0) touching.emplace_back(nl, ny * w + nx);
        }
        for (size_t a = 0; a < touching.size(); ++a)
          for (size_t b = a + 1; b < touching.size(); ++b)
            if (touching[a].first != touching[b].first)
              note_contact(touching[a].first, touching[a].second,
                           touching[b].first, touching[b].second);
      }
    }
  }

  // Mean flow direction over pixels of `seg` within `band` steps (4-connected,
  // inside the segment) of the given boundary set; pixels with negligible
  // magnitude do not contribute. Returns false if no pixel contributes.
  auto band_direction = [&](int seg, const std::set<int>& boundary, double* angle) {
    std::vector<int> frontier(boundary.begin(), boundary.end());
    std::set<int> visited(boundary.begin(), boundary.end());
    double su = 0.0, sv = 0.0;
    bool any = false;
    auto absorb = [&](int p) {
      const int x = p % w, y = p / w;
      const double fu = flow.u_at(map.offset_x + x, map.offset_y + y);
      const double fv = flow.v_at(map.offset_x + x, map.offset_y + y);
      if (std::hypot(fu, fv) > 1e-6) {
        su += fu;
        sv += fv;
        any = true;
      }
    };
    for (int p : frontier) absorb(p);
    for (int depth = 1; depth < band && !frontier.empty(); ++depth) {
      std::vector<int> next;
      for (int p : frontier) {
        const int x = p % w, y = p / w;
        for (int k = 0; k < 4; ++k) {
          const int nx = x + kDx[k], ny = y + kDy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const int q = ny * w + nx;
          if (map.labels[q] != seg || visited.count(q)) continue;
          visited.insert(q);
          next.push_back(q);
          absorb(q);
        }
      }
      frontier.swap(next);
    }
    if (!any) return false;
    *angle = std::atan2(sv, su);
    return true;
  };

  UnionFind uf(map.count + 1);
  for (auto& [key, sides] : boundaries) {
    double a0 = 0.0, a1 = 0.0;
    if (!band_direction(key.first, sides[0], &a0)) continue;
    if (!band_direction(key.second, sides[1], &a1)) continue;
    const double diff = std::abs(std::atan2(std::sin(a0 - a1), std::cos(a0 - a1)));
    if (diff < angle_threshold) uf.unite(key.first, key.second);
  }

  LabelMap out = map;
  for (int& v : out.labels)
    if (v > 0) v = uf.find(v);

  // Ridge pixels between segments that merged are absorbed; pixels still
  // separating distinct components stay 0.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (map.at(x, y) != 0) continue;
      std::set<int> orig, merged;
      for (int k = 0; k < 4; ++k) {
        const int nx = x + kDx[k], ny = y + kDy[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const int nl = map.at(nx, ny);
        if (nl > 0) {
          orig.insert(nl);
          merged.insert(uf.find(nl));
        }
      }
      if (orig.size() >= 2 && merged.size() == 1) out.at(x, y) = *merged.begin();
    }
  }
  compact_labels(out);
  return out;
}

std::vector<SegmentStats> segment_stats(const LabelMap& map, const FlowField& flow) {
  check_flow_covers(map, flow);
  std::vector<SegmentStats> stats(static_cast<size_t>(map.count));
  for (int l = 1; l <= map.count; ++l) stats[l - 1].label = l;
  for (int y = 0; y < map.rows; ++y) {
    for (int x = 0; x < map.cols; ++x) {
      const int l = map.at(x, y);
      if (l <= 0) continue;
      SegmentStats& s = stats[l - 1];
      const double fu = flow.u_at(map.offset_x + x, map.offset_y + y);
      const double fv = flow.v_at(map.offset_x + x, map.offset_y + y);
      s.area += 1;
      s.mean_flow.x += fu;
      s.mean_flow.y += fv;
      s.mean_magnitude += std::hypot(fu, fv);
      bool on_boundary = false;
      for (int k = 0; k < 4 && !on_boundary; ++k) {
        const int nx = x + kDx[k], ny = y + kDy[k];
        if (nx < 0 || ny < 0 || nx >= map.cols || ny >= map.rows || map.at(nx, ny) != l)
          on_boundary = true;
      }
      if (on_boundary) s.boundary_pixels.emplace_back(x, y);
    }
  }
  for (auto& s : stats) {
    if (s.area > 0) {
      s.mean_flow.x /= static_cast<double>(s.area);
      s.mean_flow.y /= static_cast<double>(s.area);
      s.mean_magnitude /= static_cast<double>(s.area);
    }
  }
  return stats;
}

void write_label_pgm(const LabelMap& map, const std::string& path) {
  Gray16 img{map.cols, map.rows, {}};
  img.pixels.resize(map.labels.size());
  for (size_t i = 0; i < map.labels.size(); ++i) {
    if (map.labels[i] < 0 || map.labels[i] > 65535)
      throw IoError(path + ": label out of 16-bit range");
    img.pixels[i] = static_cast<std::uint16_t>(map.labels[i]);
  }
  write_pgm16(img, path);
}

LabelMap read_label_pgm(const std::string& path) {
  const Gray16 img = read_pgm16(path);
  LabelMap m;
  m.cols = img.width;
  m.rows = img.height;
  m.labels.assign(img.pixels.begin(), img.pixels.end());
  int max_label = 0;
  for (int v : m.labels) max_label = std::max(max_label, v);
  std::vector<bool> present(static_cast<size_t>(max_label) + 1, false);
  for (int v : m.labels)
    if (v > 0) present[v] = true;
  for (int l = 1; l <= max_label; ++l)
    if (!present[l]) throw IoError(path + ": labels are not contiguous");
  m.count = max_label;
  return m;
}

const std::array<std::array<std::uint8_t, 3>, 12>& label_palette() {
  static const std::array<std::array<std::uint8_t, 3>, 12> palette = {{
      {230, 25, 75},   {60, 180, 75},   {255, 225, 25}, {0, 130, 200},
      {245, 130, 48},  {145, 30, 180},  {70, 240, 240}, {240, 50, 230},
      {210, 245, 60},  {250, 190, 190}, {0, 128, 128},  {170, 110, 40},
  }};
  return palette;
}

void write_label_png(const LabelMap& map, const std::string& path) {
  const auto& palette = label_palette();
  Rgb8 img{map.cols, map.rows, {}};
  img.pixels.assign(static_cast<size_t>(map.cols) * map.rows * 3, 0);
  for (size_t i = 0; i < map.labels.size(); ++i) {
    const int l = map.labels[i];
    if (l <= 0) continue;
    const auto& c = palette[(l - 1) % palette.size()];
    img.pixels[3 * i] = c[0];
    img.pixels[3 * i + 1] = c[1];
    img.pixels[3 * i + 2] = c[2];
  }
  write_png_rgb8(img, path);
}

void write_stats_jsonl(const std::vector<SegmentStats>& stats, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open file for writing");
  for (const auto& s : stats) {
    nlohmann::json j{{"label", s.label},
                     {"area", s.area},
                     {"meanFlow", {s.mean_flow.x, s.mean_flow.y}},
                     {"meanMagnitude", s.mean_magnitude}};
    out << j.dump() << "\n";
  }
  if (!out) throw IoError(path + ": write failed");
}

std::vector<SegmentStats> read_stats_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open file");
  std::vector<SegmentStats> stats;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw IoError(path + ": malformed stats line");
    SegmentStats s;
    s.label = j.at("label").get<int>();
    s.area = j.at("area").get<long>();
    s.mean_flow.x = j.at("meanFlow").at(0).get<double>();
    s.mean_flow.y = j.at("meanFlow").at(1).get<double>();
    s.mean_magnitude = j.at("meanMagnitude").get<double>();
    stats.push_back(std::move(s));
  }
  return stats;
}

void render_overlay_png(const LabelMap& map, const ParticleGrid& grid,
                        const Frame& frame, const std::string& path, double alpha) {
  const auto& palette = label_palette();
  Rgb8 img{frame.width, frame.height, {}};
  img.pixels.resize(static_cast<size_t>(frame.width) * frame.height * 3);
  for (size_t i = 0; i < frame.intensity.size(); ++i) {
    const auto g = static_cast<std::uint8_t>(std::lround(frame.intensity[i] * 255.0));
    img.pixels[3 * i] = img.pixels[3 * i + 1] = img.pixels[3 * i + 2] = g;
  }
  for (int y = 0; y < map.rows; ++y) {
    for (int x = 0; x < map.cols; ++x) {
      const int l = map.at(x, y);
      if (l <= 0) continue;
      const int px = static_cast<int>(std::lround(grid.origin_x + (map.offset_x + x) * grid.step_x));
      const int py = static_cast<int>(std::lround(grid.origin_y + (map.offset_y + y) * grid.step_y));
      if (px < 0 || py < 0 || px >= frame.width || py >= frame.height) continue;
      const auto& c = palette[(l - 1) % palette.size()];
      const size_t i = (static_cast<size_t>(py) * frame.width + px) * 3;
      for (int ch = 0; ch < 3; ++ch) {
        const double blended = alpha * c[ch] + (1.0 - alpha) * img.pixels[i + ch];
        img.pixels[i + ch] = static_cast<std::uint8_t>(std::lround(blended));
      }
    }
  }
  write_png_rgb8(img, path);
}

}  // namespace crowdseg
