#include "core/codecs.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <set>

#include <json.hpp>

#include "core/error.hpp"
#include "core/text.hpp"

namespace meshcount::codecs {

using geometry::Correspondence;
using geometry::Homography;
using geometry::Point2;
using geometry::Polygon;
using nlohmann::json;
using nlohmann::ordered_json;
using text::CsvRow;
using text::CsvTable;
using text::format_number;
using text::parse_double;
using text::parse_error;
using text::parse_int;

namespace {

void expect_header(const CsvTable& t, std::initializer_list<const char*> names) {
  std::size_t i = 0;
  for (const char* n : names) {
    if (i >= t.header.fields.size() || t.header.fields[i] != n)
      parse_error(t.source, t.header.line, i < t.header.columns.size() ? t.header.columns[i] : 1,
                  std::string("expected header column '") + n + "'");
    ++i;
  }
}

void join(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_number(v);
    first = false;
  }
}

metrics::Shape decode_shape(const CsvTable& t, const CsvRow& row, std::size_t first, std::size_t last) {
  const std::size_t n = last - first;
  std::vector<double> v;
  for (std::size_t k = first; k < last; ++k) v.push_back(parse_double(t, row, k));
  const std::size_t col = first < row.columns.size() ? row.columns[first] : 1;
  if (n == 2) return Point2{v[0], v[1]};
  try {
    if (n == 4) {
      if (!(v[2] > v[0] && v[3] > v[1])) parse_error(t.source, row.line, col, "box needs x1 > x0 and y1 > y0");
      return Polygon::rectangle(v[0], v[1], v[2], v[3]);
    }
    if (n >= 6 && n % 2 == 0) {
      std::vector<Point2> pts;
      for (std::size_t k = 0; k < n; k += 2) pts.push_back({v[k], v[k + 1]});
      return Polygon(std::move(pts));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    parse_error(t.source, row.line, col, e.what());
  }
  parse_error(t.source, row.line, col, "geometry needs 2, 4 or an even count >= 6 of values, got " + std::to_string(n));
}

void encode_shape(std::string& out, const metrics::Shape& s) {
  if (const auto* p = std::get_if<Point2>(&s)) {
    join(out, {p->x, p->y});
    return;
  }
  bool first = true;
  for (const auto& v : std::get<Polygon>(s).vertices()) {
    if (!first) out += ',';
    join(out, {v.x, v.y});
    first = false;
  }
}

std::string geometry_header(const DetectionTable& table, bool preds) {
  std::size_t max_vertices = 0;
  bool any_point = false;
  for (const auto& [id, img] : table) {
    auto visit = [&](const metrics::Shape& s) {
      if (const auto* poly = std::get_if<Polygon>(&s))
        max_vertices = std::max(max_vertices, poly->size());
      else
        any_point = true;
    };
    if (preds)
      for (const auto& d : img.preds) visit(d.shape);
    else
      for (const auto& g : img.gts) visit(g.shape);
  }
  std::string h;
  if (max_vertices == 0 || any_point) return "x,y";
  for (std::size_t k = 0; k < max_vertices; ++k) {
    if (k) h += ',';
    h += "x" + std::to_string(k) + ",y" + std::to_string(k);
  }
  return h;
}

// JSON schema helpers; positions are given as JSON pointers.
[[noreturn]] void schema_error(const std::string& source, const std::string& path, const std::string& msg) {
  fail(ErrorCode::ParseError, source + ": at " + (path.empty() ? "/" : path) + ": " + msg);
}

const json& member(const json& obj, const char* key, const std::string& path, const std::string& source) {
  if (!obj.is_object()) schema_error(source, path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(source, path, std::string("missing key '") + key + "'");
  return *it;
}

const json& array_at(const json& obj, const char* key, const std::string& path, const std::string& source) {
  const json& v = member(obj, key, path, source);
  if (!v.is_array()) schema_error(source, path + "/" + key, "expected an array");
  return v;
}

double as_number(const json& v, const std::string& path, const std::string& source) {
  if (!v.is_number()) schema_error(source, path, "expected a number");
  return v.get<double>();
}

long long as_integer(const json& v, const std::string& path, const std::string& source) {
  if (!v.is_number_integer()) schema_error(source, path, "expected an integer");
  return v.get<long long>();
}

int as_int(const json& v, const std::string& path, const std::string& source) {
  const long long x = as_integer(v, path, source);
  if (x < INT32_MIN || x > INT32_MAX) schema_error(source, path, "integer out of range");
  return static_cast<int>(x);
}

std::vector<double> number_array(const json& v, const std::string& path, const std::string& source) {
  if (!v.is_array()) schema_error(source, path, "expected an array");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(as_number(v[k], path + "/" + std::to_string(k), source));
  return out;
}

json parse_json(std::string_view data, const std::string& source) {
  try {
    return json::parse(data.begin(), data.end());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, source + ": byte " + std::to_string(e.byte) + ": malformed JSON");
  }
}

Homography homography_from(const std::vector<double>& m, const std::string& path, const std::string& source) {
  if (m.size() != 9) schema_error(source, path, "homography needs 9 values");
  Homography::Matrix a;
  std::copy(m.begin(), m.end(), a.begin());
  try {
    return Homography(a);
  } catch (const Error& e) {
    schema_error(source, path, e.what());
  }
}

std::uint32_t read_u32(std::string_view data, std::size_t off) {
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(data[off + static_cast<std::size_t>(k)]);
  return v;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out += static_cast<char>((v >> (8 * k)) & 0xff);
}

}  // namespace

// ---------------------------------------------------------------------------
// Point tables

std::vector<Correspondence> decode_correspondences(std::string_view data, const std::string& source) {
  const auto t = text::parse_csv(data, source);
  expect_header(t, {"src_x", "src_y", "dst_x", "dst_y"});
  text::require_width(t, 4);
  std::vector<Correspondence> out;
  for (const auto& r : t.rows)
    out.push_back({{parse_double(t, r, 0), parse_double(t, r, 1)}, {parse_double(t, r, 2), parse_double(t, r, 3)}});
  return out;
}

std::string encode_correspondences(std::span<const Correspondence> corrs) {
  std::string out = "src_x,src_y,dst_x,dst_y\n";
  for (const auto& c : corrs) {
    join(out, {c.src.x, c.src.y, c.dst.x, c.dst.y});
    out += '\n';
  }
  return out;
}

std::vector<matching::Feature> decode_features(std::string_view data, const std::string& source) {
  const auto t = text::parse_csv(data, source);
  expect_header(t, {"x", "y"});
  const std::size_t width = t.header.fields.size();
  if (width < 3) parse_error(source, t.header.line, 1, "descriptor needs at least one column");
  for (std::size_t k = 2; k < width; ++k)
    if (t.header.fields[k] != "d" + std::to_string(k - 2))
      parse_error(source, t.header.line, t.header.columns[k], "expected header column 'd" + std::to_string(k - 2) + "'");
  text::require_width(t, width);
  std::vector<matching::Feature> out;
  for (const auto& r : t.rows) {
    matching::Feature f{{parse_double(t, r, 0), parse_double(t, r, 1)}, {}};
    for (std::size_t k = 2; k < width; ++k) f.descriptor.push_back(parse_double(t, r, k));
    out.push_back(std::move(f));
  }
  return out;
}

std::string encode_features(std::span<const matching::Feature> features, std::size_t dim) {
  std::string out = "x,y";
  for (std::size_t k = 0; k < dim; ++k) out += ",d" + std::to_string(k);
  out += '\n';
  for (const auto& f : features) {
    if (f.descriptor.size() != dim) fail(ErrorCode::DimensionMismatch, "descriptor length differs from header");
    join(out, {f.keypoint.x, f.keypoint.y});
    for (double d : f.descriptor) out += ',' + format_number(d);
    out += '\n';
  }
  return out;
}

density::DotAnnotation decode_dots(std::string_view data, const std::string& source) {
  const auto t = text::parse_csv(data, source);
  expect_header(t, {"x", "y"});
  const bool with_sigma = t.header.fields.size() == 3 && t.header.fields[2] == "sigma";
  if (!with_sigma && t.header.fields.size() != 2)
    parse_error(source, t.header.line, t.header.columns.back(), "expected x,y or x,y,sigma");
  text::require_width(t, with_sigma ? 3 : 2);
  density::DotAnnotation dots;
  for (const auto& r : t.rows) {
    dots.points.push_back({parse_double(t, r, 0), parse_double(t, r, 1)});
    if (with_sigma) dots.sigmas.push_back(parse_double(t, r, 2));
  }
  return dots;
}

std::string encode_dots(const density::DotAnnotation& dots) {
  const bool with_sigma = !dots.sigmas.empty();
  std::string out = with_sigma ? "x,y,sigma\n" : "x,y\n";
  for (std::size_t i = 0; i < dots.points.size(); ++i) {
    join(out, {dots.points[i].x, dots.points[i].y});
    if (with_sigma) out += ',' + format_number(dots.sigmas.at(i));
    out += '\n';
  }
  return out;
}

Homography decode_homography(std::string_view data, const std::string& source) {
  Homography::Matrix m{};
  std::size_t count = 0, line = 1, col = 1, pos = 0;
  while (pos < data.size()) {
    const char c = data[pos];
    if (c == '\n') {
      ++line;
      col = 1;
      ++pos;
      continue;
    }
    if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
      ++pos;
      ++col;
      continue;
    }
    std::size_t end = pos;
    while (end < data.size() && !std::strchr(" \t,\r\n", data[end])) ++end;
    const std::string tok(data.substr(pos, end - pos));
    if (count == 9) parse_error(source, line, col, "more than 9 values");
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      parse_error(source, line, col, "expected a number, got '" + tok + "'");
    m[count++] = v;
    col += end - pos;
    pos = end;
  }
  if (count != 9) parse_error(source, line, col, "expected 9 values, got " + std::to_string(count));
  try {
    return Homography(m);
  } catch (const Error& e) {
    parse_error(source, 1, 1, e.what());
  }
}

std::string encode_homography(const Homography& h) {
  std::string out;
  for (int r = 0; r < 3; ++r) {
    join(out, {h(r, 0), h(r, 1), h(r, 2)});
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Detections

void decode_predictions(std::string_view data, const std::string& source, DetectionTable& into) {
  const auto t = text::parse_csv(data, source);
  expect_header(t, {"image_id", "class_id", "score"});
  for (const auto& r : t.rows) {
    if (r.fields.size() < 5) parse_error(source, r.line, 1, "row needs image_id, class_id, score and geometry");
    const long long cls = parse_int(t, r, 1);
    const double score = parse_double(t, r, 2);
    auto shape = decode_shape(t, r, 3, r.fields.size());
    into[r.fields[0]].preds.push_back({std::move(shape), score, static_cast<int>(cls)});
  }
}

void decode_ground_truth(std::string_view data, const std::string& source, DetectionTable& into) {
  const auto t = text::parse_csv(data, source);
  expect_header(t, {"image_id", "class_id"});
  const bool with_agreement = t.header.fields.back() == "agreement";
  for (const auto& r : t.rows) {
    const std::size_t end = with_agreement ? r.fields.size() - 1 : r.fields.size();
    if (end < 4) parse_error(source, r.line, 1, "row needs image_id, class_id and geometry");
    const long long cls = parse_int(t, r, 1);
    auto shape = decode_shape(t, r, 2, end);
    int agreement = 0;
    if (with_agreement) {
      const long long a = parse_int(t, r, end);
      if (a < 0) parse_error(source, r.line, r.columns[end], "agreement must be non-negative");
      agreement = static_cast<int>(a);
    }
    into[r.fields[0]].gts.push_back({std::move(shape), static_cast<int>(cls), agreement});
  }
}

std::string encode_predictions(const DetectionTable& table) {
  std::string out = "image_id,class_id,score," + geometry_header(table, true) + "\n";
  for (const auto& [id, img] : table)
    for (const auto& d : img.preds) {
      out += id + ',' + std::to_string(d.class_id) + ',' + format_number(d.score) + ',';
      encode_shape(out, d.shape);
      out += '\n';
    }
  return out;
}

std::string encode_ground_truth(const DetectionTable& table) {
  std::string out = "image_id,class_id," + geometry_header(table, false) + ",agreement\n";
  for (const auto& [id, img] : table)
    for (const auto& g : img.gts) {
      out += id + ',' + std::to_string(g.class_id) + ',';
      encode_shape(out, g.shape);
      out += ',' + std::to_string(g.agreement) + '\n';
    }
  return out;
}

// ---------------------------------------------------------------------------
// Density rasters

std::string encode_dmf(const density::DensityMap& map) {
  if (map.height() > UINT32_MAX || map.width() > UINT32_MAX) fail(ErrorCode::InvalidArgument, "map too large for DMF1");
  std::string out = "DMF1";
  out.reserve(12 + 4 * map.values().size());
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  for (double v : map.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

density::DensityMap decode_dmf(std::string_view data, const std::string& source) {
  auto error_at = [&](std::size_t off, const std::string& msg) {
    fail(ErrorCode::ParseError, source + ": byte " + std::to_string(off) + ": " + msg);
  };
  auto need = [&](std::size_t off, const char* what) {
    if (data.size() < off + 4)
      error_at(off, std::string("truncated ") + what + ": needs 4 bytes, " + std::to_string(data.size() - off) +
                        " available");
  };
  need(0, "magic");
  if (data.substr(0, 4) != "DMF1") error_at(0, "bad magic");
  need(4, "height");
  need(8, "width");
  const std::uint32_t h = read_u32(data, 4), w = read_u32(data, 8);
  if (h == 0) error_at(4, "height must be positive");
  if (w == 0) error_at(8, "width must be positive");
  const std::uint64_t n = static_cast<std::uint64_t>(h) * w;
  const std::uint64_t expected = 12 + 4 * n;
  if (data.size() < expected) need(12 + 4 * ((data.size() - 12) / 4), "value");
  if (data.size() > expected) error_at(expected, "trailing bytes");
  std::vector<double> values(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    const std::size_t off = 12 + 4 * k;
    const float f = std::bit_cast<float>(read_u32(data, off));
    if (!std::isfinite(f) || f < 0.0f) error_at(off, "value must be finite and non-negative");
    values[k] = f;
  }
  return density::DensityMap(h, w, std::move(values));
}

std::string encode_density_csv(const density::DensityMap& map) {
  std::string out;
  for (std::size_t r = 0; r < map.height(); ++r) {
    for (std::size_t c = 0; c < map.width(); ++c) {
      if (c) out += ',';
      out += format_number(map.at(r, c));
    }
    out += '\n';
  }
  return out;
}

density::DensityMap decode_density_csv(std::string_view data, const std::string& source) {
  const auto t = text::parse_csv(data, source, false);
  if (t.rows.empty()) parse_error(source, 1, 1, "empty map");
  const std::size_t w = t.rows.front().fields.size();
  text::require_width(t, w);
  std::vector<double> values;
  for (const auto& r : t.rows)
    for (std::size_t c = 0; c < w; ++c) {
      const double v = parse_double(t, r, c);
      if (!std::isfinite(v) || v < 0.0) parse_error(source, r.line, r.columns[c], "value must be finite and non-negative");
      values.push_back(v);
    }
  return density::DensityMap(t.rows.size(), w, std::move(values));
}

std::map<std::string, CountEntry> decode_counts(std::string_view data, const std::string& source,
                                                const std::string& base_dir) {
  const auto t = text::parse_csv(data, source);
  expect_header(t, {"image_id"});
  text::require_width(t, 2);
  if (t.header.fields.size() != 2 || (t.header.fields[1] != "count" && t.header.fields[1] != "density"))
    parse_error(source, t.header.line, t.header.columns.size() > 1 ? t.header.columns[1] : 1,
                "expected column 'count' or 'density'");
  const bool maps = t.header.fields[1] == "density";
  std::map<std::string, CountEntry> out;
  for (const auto& r : t.rows) {
    if (out.count(r.fields[0])) parse_error(source, r.line, 1, "duplicate image_id '" + r.fields[0] + "'");
    CountEntry e;
    if (maps) {
      const std::string path = base_dir + r.fields[1];
      e.map = decode_dmf(text::read_file(path), path);
      e.count = density::count(*e.map);
    } else {
      e.count = parse_double(t, r, 1);
    }
    out.emplace(r.fields[0], std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenario

protocol::Scenario decode_scenario(std::string_view data, const std::string& source, const std::string& base_dir) {
  const json doc = parse_json(data, source);
  protocol::Scenario s;
  const json& nodes = array_at(doc, "nodes", "", source);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const std::string np = "/nodes/" + std::to_string(n);
    const json& node = nodes[n];
    protocol::NodeSpec spec;
    spec.id = as_int(member(node, "id", np, source), np + "/id", source);
    const json& nb = array_at(node, "neighbors", np, source);
    for (std::size_t k = 0; k < nb.size(); ++k)
      spec.neighbors.push_back(as_int(nb[k], np + "/neighbors/" + std::to_string(k), source));
    spec.width = as_int(member(node, "width", np, source), np + "/width", source);
    spec.height = as_int(member(node, "height", np, source), np + "/height", source);
    if (node.contains("features_file")) {
      const json& ff = node["features_file"];
      if (!ff.is_string()) schema_error(source, np + "/features_file", "expected a string");
      spec.features_file = ff.get<std::string>();
      const std::string path = base_dir + spec.features_file;
      spec.features = decode_features(text::read_file(path), path);
    } else if (node.contains("features")) {
      const json& fs = array_at(node, "features", np, source);
      for (std::size_t k = 0; k < fs.size(); ++k) {
        const std::string fp = np + "/features/" + std::to_string(k);
        matching::Feature f;
        f.keypoint = {as_number(member(fs[k], "x", fp, source), fp + "/x", source),
                      as_number(member(fs[k], "y", fp, source), fp + "/y", source)};
        f.descriptor = number_array(member(fs[k], "d", fp, source), fp + "/d", source);
        spec.features.push_back(std::move(f));
      }
    }
    const json& frames = array_at(node, "frames", np, source);
    for (std::size_t f = 0; f < frames.size(); ++f) {
      const std::string fp = np + "/frames/" + std::to_string(f);
      protocol::Frame frame;
      frame.frame_id = as_int(member(frames[f], "frame_id", fp, source), fp + "/frame_id", source);
      const json& dets = array_at(frames[f], "detections", fp, source);
      for (std::size_t d = 0; d < dets.size(); ++d) {
        const std::string dp = fp + "/detections/" + std::to_string(d);
        const json& poly = array_at(dets[d], "polygon", dp, source);
        std::vector<Point2> pts;
        for (std::size_t v = 0; v < poly.size(); ++v) {
          const auto xy = number_array(poly[v], dp + "/polygon/" + std::to_string(v), source);
          if (xy.size() != 2) schema_error(source, dp + "/polygon/" + std::to_string(v), "vertex needs 2 values");
          pts.push_back({xy[0], xy[1]});
        }
        protocol::Detection det{Polygon::rectangle(0, 0, 1, 1), 1.0, -1};
        try {
          det.polygon = Polygon(std::move(pts));
        } catch (const Error& e) {
          schema_error(source, dp + "/polygon", e.what());
        }
        if (dets[d].contains("score")) det.score = as_number(dets[d]["score"], dp + "/score", source);
        if (dets[d].contains("identity")) det.identity = as_int(dets[d]["identity"], dp + "/identity", source);
        frame.detections.push_back(std::move(det));
      }
      spec.frames.push_back(std::move(frame));
    }
    s.nodes.push_back(std::move(spec));
  }
  if (doc.contains("ground_truth")) {
    const json& frames = array_at(doc["ground_truth"], "frames", "/ground_truth", source);
    for (std::size_t f = 0; f < frames.size(); ++f) {
      const std::string fp = "/ground_truth/frames/" + std::to_string(f);
      s.ground_truth.push_back({as_int(member(frames[f], "frame_id", fp, source), fp + "/frame_id", source),
                                as_number(member(frames[f], "global_count", fp, source), fp + "/global_count", source)});
    }
  }
  if (doc.contains("true_homographies")) {
    const json& hs = array_at(doc, "true_homographies", "", source);
    for (std::size_t k = 0; k < hs.size(); ++k) {
      const std::string hp = "/true_homographies/" + std::to_string(k);
      const int from = as_int(member(hs[k], "from", hp, source), hp + "/from", source);
      const int to = as_int(member(hs[k], "to", hp, source), hp + "/to", source);
      const auto m = number_array(member(hs[k], "matrix", hp, source), hp + "/matrix", source);
      if (s.true_homographies.count({from, to})) schema_error(source, hp, "duplicate homography");
      s.true_homographies.emplace(protocol::PairKey{from, to}, homography_from(m, hp + "/matrix", source));
    }
  }
  return s;
}

std::string encode_scenario(const protocol::Scenario& scenario, std::map<std::string, std::string>* sidecars) {
  ordered_json doc;
  doc["nodes"] = ordered_json::array();
  for (const auto& n : scenario.nodes) {
    ordered_json node;
    node["id"] = n.id;
    node["neighbors"] = n.neighbors;
    node["width"] = n.width;
    node["height"] = n.height;
    if (!n.features_file.empty() && sidecars) {
      node["features_file"] = n.features_file;
      const std::size_t dim = n.features.empty() ? 0 : n.features.front().descriptor.size();
      (*sidecars)[n.features_file] = encode_features(n.features, dim);
    } else {
      ordered_json fs = ordered_json::array();
      for (const auto& f : n.features) fs.push_back({{"x", f.keypoint.x}, {"y", f.keypoint.y}, {"d", f.descriptor}});
      node["features"] = std::move(fs);
    }
    ordered_json frames = ordered_json::array();
    for (const auto& fr : n.frames) {
      ordered_json dets = ordered_json::array();
      for (const auto& d : fr.detections) {
        ordered_json poly = ordered_json::array();
        for (const auto& v : d.polygon.vertices()) poly.push_back({v.x, v.y});
        ordered_json det;
        det["polygon"] = std::move(poly);
        det["score"] = d.score;
        if (d.identity >= 0) det["identity"] = d.identity;
        dets.push_back(std::move(det));
      }
      frames.push_back({{"frame_id", fr.frame_id}, {"detections", std::move(dets)}});
    }
    node["frames"] = std::move(frames);
    doc["nodes"].push_back(std::move(node));
  }
  if (!scenario.ground_truth.empty()) {
    ordered_json frames = ordered_json::array();
    for (const auto& g : scenario.ground_truth)
      frames.push_back({{"frame_id", g.frame_id}, {"global_count", g.global_count}});
    doc["ground_truth"]["frames"] = std::move(frames);
  }
  if (!scenario.true_homographies.empty()) {
    ordered_json hs = ordered_json::array();
    for (const auto& [key, h] : scenario.true_homographies)
      hs.push_back({{"from", key.first}, {"to", key.second}, {"matrix", h.matrix()}});
    doc["true_homographies"] = std::move(hs);
  }
  return doc.dump(1) + "\n";
}

protocol::Scenario load_scenario(const std::string& path) {
  auto s = decode_scenario(text::read_file(path), path, text::directory_of(path));
  protocol::validate(s);
  return s;
}

void save_scenario(const protocol::Scenario& scenario, const std::string& path) {
  std::map<std::string, std::string> sidecars;
  const std::string doc = encode_scenario(scenario, &sidecars);
  const std::string dir = text::directory_of(path);
  for (const auto& [name, body] : sidecars) text::write_file(dir + name, body);
  text::write_file(path, doc);
}

// ---------------------------------------------------------------------------
// Rescoring

rescoring::Dataset decode_samples(std::string_view data, const std::string& source, int raters) {
  if (raters < 1) fail(ErrorCode::InvalidArgument, "rater count must be positive");
  const auto t = text::parse_csv(data, source);
  expect_header(t, {"agreement"});
  const std::size_t width = t.header.fields.size();
  if (width < 2) parse_error(source, t.header.line, 1, "samples need at least one feature column");
  text::require_width(t, width);
  rescoring::Dataset d;
  d.raters = raters;
  for (const auto& r : t.rows) {
    rescoring::AgreementSample s;
    const long long a = parse_int(t, r, 0);
    if (a < 0 || a > raters)
      parse_error(source, r.line, r.columns[0], "agreement outside [0, " + std::to_string(raters) + "]");
    s.agreement = static_cast<int>(a);
    for (std::size_t k = 1; k < width; ++k) s.features.push_back(parse_double(t, r, k));
    d.samples.push_back(std::move(s));
  }
  return d;
}

std::string encode_samples(const rescoring::Dataset& data) {
  std::string out = "agreement";
  for (std::size_t k = 0; k < data.dim(); ++k) out += ",f" + std::to_string(k);
  out += '\n';
  for (const auto& s : data.samples) {
    out += std::to_string(s.agreement);
    for (double f : s.features) out += ',' + format_number(f);
    out += '\n';
  }
  return out;
}

rescoring::ScorerModel decode_model(std::string_view data, const std::string& source) {
  const json doc = parse_json(data, source);
  rescoring::ScorerModel m;
  const json& method = member(doc, "method", "", source);
  if (!method.is_string()) schema_error(source, "/method", "expected a string");
  try {
    m.method = rescoring::parse_method(method.get<std::string>());
  } catch (const Error& e) {
    schema_error(source, "/method", e.what());
  }
  const json& head = member(doc, "head", "", source);
  if (!head.is_string() || (head != "scalar" && head != "categorical"))
    schema_error(source, "/head", "expected 'scalar' or 'categorical'");
  m.head = head == "scalar" ? rescoring::Head::Scalar : rescoring::Head::Categorical;
  m.raters = as_int(member(doc, "raters", "", source), "/raters", source);
  const long long dim = as_integer(member(doc, "dim", "", source), "/dim", source);
  if (m.raters < 1) schema_error(source, "/raters", "must be positive");
  if (dim < 1) schema_error(source, "/dim", "must be positive");
  m.dim = static_cast<std::size_t>(dim);
  m.weights = number_array(member(doc, "weights", "", source), "/weights", source);
  m.biases = number_array(member(doc, "biases", "", source), "/biases", source);
  m.thetas = number_array(member(doc, "thetas", "", source), "/thetas", source);

  const auto expected = rescoring::init_model(m.method, m.raters, m.dim);
  if (m.head != expected.head) fail(ErrorCode::HeadMismatch, source + ": head does not fit method " + method.get<std::string>());
  if (m.weights.size() != expected.weights.size())
    schema_error(source, "/weights", "expected " + std::to_string(expected.weights.size()) + " values");
  if (m.biases.size() != expected.biases.size())
    schema_error(source, "/biases", "expected " + std::to_string(expected.biases.size()) + " values");
  if (m.thetas.size() != expected.thetas.size())
    schema_error(source, "/thetas", "expected " + std::to_string(expected.thetas.size()) + " values");
  for (std::size_t k = 1; k < m.thetas.size(); ++k)
    if (!(m.thetas[k] > m.thetas[k - 1]))
      fail(ErrorCode::UnorderedThetas, source + ": at /thetas/" + std::to_string(k) + ": thresholds must increase");
  return m;
}

std::string encode_model(const rescoring::ScorerModel& model) {
  ordered_json doc;
  doc["method"] = rescoring::to_string(model.method);
  doc["head"] = model.head == rescoring::Head::Scalar ? "scalar" : "categorical";
  doc["raters"] = model.raters;
  doc["dim"] = model.dim;
  doc["weights"] = model.weights;
  doc["biases"] = model.biases;
  doc["thetas"] = model.thetas;
  return doc.dump(1) + "\n";
}

std::vector<double> decode_loss_trace(std::string_view data, const std::string& source) {
  const auto t = text::parse_csv(data, source);
  expect_header(t, {"epoch", "loss"});
  text::require_width(t, 2);
  std::vector<double> out;
  for (const auto& r : t.rows) {
    if (parse_int(t, r, 0) != static_cast<long long>(out.size()))
      parse_error(source, r.line, r.columns[0], "epochs must count up from 0");
    out.push_back(parse_double(t, r, 1));
  }
  return out;
}

std::string encode_loss_trace(std::span<const double> trace) {
  std::string out = "epoch,loss\n";
  for (std::size_t k = 0; k < trace.size(); ++k) out += std::to_string(k) + ',' + format_number(trace[k]) + '\n';
  return out;
}

std::map<std::string, std::vector<std::vector<double>>> decode_image_features(std::string_view data,
                                                                             const std::string& source) {
  const auto t = text::parse_csv(data, source);
  expect_header(t, {"image_id"});
  const std::size_t width = t.header.fields.size();
  if (width < 2) parse_error(source, t.header.line, 1, "detections need at least one feature column");
  text::require_width(t, width);
  std::map<std::string, std::vector<std::vector<double>>> out;
  for (const auto& r : t.rows) {
    std::vector<double> f;
    for (std::size_t k = 1; k < width; ++k) f.push_back(parse_double(t, r, k));
    out[r.fields[0]].push_back(std::move(f));
  }
  return out;
}

AnnotationTable decode_annotations(std::string_view data, const std::string& source) {
  const auto t = text::parse_csv(data, source);
  expect_header(t, {"h_s", "w_s", "z"});
  const bool with_hm = t.header.fields.size() == 4 && t.header.fields[3] == "h_m";
  if (!with_hm && t.header.fields.size() != 3)
    parse_error(source, t.header.line, t.header.columns.back(), "expected h_s,w_s,z or h_s,w_s,z,h_m");
  AnnotationTable out;
  for (const auto& r : t.rows) {
    if (r.fields.size() != 3 && !(with_hm && r.fields.size() == 4))
      parse_error(source, r.line, 1, "unexpected field count " + std::to_string(r.fields.size()));
    out.boxes.push_back({parse_double(t, r, 0), parse_double(t, r, 1), parse_double(t, r, 2)});
    if (r.fields.size() == 4 && !r.fields[3].empty())
      out.h_m.push_back(parse_double(t, r, 3));
    else
      out.h_m.push_back(std::nullopt);
  }
  return out;
}

}  // namespace meshcount::codecs
