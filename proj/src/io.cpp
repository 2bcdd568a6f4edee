#include "tightknot/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace tightknot {

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view token) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw Error(ErrorKind::kParse, "not a number: '" + std::string(token) + "'");
  }
  return value;
}

std::size_t KnotFile::vertex_count() const {
  std::size_t n = 0;
  for (const auto& c : components) n += c.size();
  return n;
}

PolygonalKnot KnotFile::to_knot() const {
  try {
    return PolygonalKnot::from_components(components, label);
  } catch (const Error& e) {
    throw Error(ErrorKind::kParse, std::string("invalid knot: ") + e.what());
  }
}

KnotFile KnotFile::from_knot(const PolygonalKnot& knot) {
  KnotFile f;
  f.label = knot.label();
  for (std::size_t c = 0; c < knot.component_count(); ++c) {
    const auto [first, last] = knot.component_range(c);
    f.components.emplace_back(knot.vertices().begin() + static_cast<std::ptrdiff_t>(first),
                              knot.vertices().begin() + static_cast<std::ptrdiff_t>(last));
  }
  return f;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r' || s[i] == ',')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r' && s[j] != ',') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::kParse, "line " + std::to_string(line) + ": " + what);
}

double real_at(std::string_view token, std::size_t line) {
  try {
    return parse_real(token);
  } catch (const Error&) {
    fail_at(line, "malformed number '" + std::string(token) + "'");
  }
}

// "# label: foo" metadata comment.
bool read_label(std::string_view comment, std::string& label) {
  comment = trim(comment.substr(1));
  constexpr std::string_view kKey = "label:";
  if (comment.substr(0, kKey.size()) != kKey) return false;
  label = std::string(trim(comment.substr(kKey.size())));
  return true;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> lines_of(std::string_view text) {
  std::vector<Line> out;
  std::size_t pos = 0;
  std::size_t number = 1;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    out.push_back({number++, text.substr(pos, end - pos)});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

void check_components(const KnotFile& f) {
  if (f.components.empty()) throw Error(ErrorKind::kParse, "no vertices found");
  for (std::size_t c = 0; c < f.components.size(); ++c) {
    if (f.components[c].size() < 3) {
      throw Error(ErrorKind::kParse, "component " + std::to_string(c) + " has " +
                                         std::to_string(f.components[c].size()) +
                                         " vertices; at least 3 are required");
    }
  }
}

KnotFile parse_plain(const std::vector<Line>& lines) {
  KnotFile f;
  std::vector<Point3> current;
  auto flush = [&] {
    if (!current.empty()) f.components.push_back(std::move(current));
    current.clear();
  };
  for (const auto& [number, raw] : lines) {
    const auto line = trim(raw);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') {
      read_label(line, f.label);
      continue;
    }
    const auto tok = split_ws(line);
    if (tok.size() != 3) fail_at(number, "expected 3 coordinates, found " + std::to_string(tok.size()));
    current.emplace_back(real_at(tok[0], number), real_at(tok[1], number), real_at(tok[2], number));
  }
  flush();
  check_components(f);
  return f;
}

KnotFile parse_vect(const std::vector<Line>& lines) {
  KnotFile f;
  struct Token {
    std::string_view text;
    std::size_t line;
  };
  std::vector<Token> tokens;
  bool seen_keyword = false;
  for (const auto& [number, raw] : lines) {
    auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      read_label(line, f.label);
      continue;
    }
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!seen_keyword) {
      if (trim(line) != "VECT") fail_at(number, "expected VECT keyword");
      seen_keyword = true;
      continue;
    }
    for (auto t : split_ws(line)) tokens.push_back({t, number});
  }
  std::size_t pos = 0;
  const std::size_t last_line = lines.empty() ? 0 : lines.back().number;
  auto next_int = [&](const char* what) -> long long {
    if (pos >= tokens.size()) fail_at(last_line, std::string("unexpected end of file reading ") + what);
    const auto& t = tokens[pos++];
    long long v = 0;
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
      fail_at(t.line, std::string("malformed integer for ") + what);
    }
    return v;
  };
  auto next_real = [&]() -> double {
    if (pos >= tokens.size()) fail_at(last_line, "unexpected end of file reading coordinates");
    const auto& t = tokens[pos++];
    return real_at(t.text, t.line);
  };
  const auto n_lines = next_int("polyline count");
  const auto n_verts = next_int("vertex count");
  const auto n_colors = next_int("color count");
  if (n_lines <= 0 || n_verts < 0 || n_colors < 0) fail_at(tokens.front().line, "invalid VECT header");
  std::vector<long long> counts(static_cast<std::size_t>(n_lines));
  long long total = 0;
  for (auto& c : counts) {
    c = next_int("polyline vertex count");
    total += std::llabs(c);
  }
  if (total != n_verts) fail_at(tokens.front().line, "polyline counts do not sum to vertex count");
  for (long long i = 0; i < n_lines; ++i) next_int("color count");
  for (const auto c : counts) {
    std::vector<Point3> comp;
    for (long long i = 0; i < std::llabs(c); ++i) {
      const double x = next_real();
      const double y = next_real();
      const double z = next_real();
      comp.emplace_back(x, y, z);
    }
    f.components.push_back(std::move(comp));
  }
  check_components(f);
  return f;
}

}  // namespace

KnotFile parse_coordinates(std::string_view text) {
  const auto lines = lines_of(text);
  for (const auto& [number, raw] : lines) {
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.substr(0, 4) == "VECT") return parse_vect(lines);
    break;
  }
  return parse_plain(lines);
}

std::string write_coordinates(const KnotFile& file, CoordinateFormat format) {
  std::ostringstream out;
  auto write_points = [&](const std::vector<Point3>& pts) {
    for (const auto& p : pts) {
      out << format_real(p.x()) << ' ' << format_real(p.y()) << ' ' << format_real(p.z()) << '\n';
    }
  };
  if (format == CoordinateFormat::kVect) {
    out << "VECT\n";
    if (!file.label.empty()) out << "# label: " << file.label << '\n';
    out << file.components.size() << ' ' << file.vertex_count() << " 0\n";
    for (std::size_t c = 0; c < file.components.size(); ++c) {
      out << (c ? " " : "") << '-' << file.components[c].size();
    }
    out << '\n';
    for (std::size_t c = 0; c < file.components.size(); ++c) out << (c ? " 0" : "0");
    out << '\n';
    for (const auto& comp : file.components) write_points(comp);
    return out.str();
  }
  if (!file.label.empty()) out << "# label: " << file.label << '\n';
  out << "# vertices: " << file.vertex_count() << '\n';
  for (std::size_t c = 0; c < file.components.size(); ++c) {
    if (c) out << '\n';
    write_points(file.components[c]);
  }
  return out.str();
}

KnotFile read_knot_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParse, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    KnotFile f = parse_coordinates(buf.str());
    if (f.label.empty()) f.label = path.stem().string();
    return f;
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_knot_file(const std::filesystem::path& path, const KnotFile& file,
                     CoordinateFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + path.string());
  out << write_coordinates(file, format);
}

bool FourierKnotSpec::empty() const {
  auto nonzero = [](const FourierSeries& s) {
    for (double v : s.cos_coeffs)
      if (v != 0.0) return true;
    for (double v : s.sin_coeffs)
      if (v != 0.0) return true;
    return false;
  };
  return !(nonzero(x) || nonzero(y) || nonzero(z));
}

FourierKnotSpec parse_fourier_spec(std::string_view text) {
  FourierKnotSpec spec;
  for (const auto& [number, raw] : lines_of(text)) {
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tok = split_ws(line);
    if (tok[0] == "label") {
      if (tok.size() >= 2) spec.label = std::string(tok[1]);
      continue;
    }
    if (tok.size() < 2) fail_at(number, "expected '<axis> <cos|sin> coefficients...'");
    FourierSeries* series = nullptr;
    if (tok[0] == "x") series = &spec.x;
    else if (tok[0] == "y") series = &spec.y;
    else if (tok[0] == "z") series = &spec.z;
    else fail_at(number, "unknown axis '" + std::string(tok[0]) + "'");
    std::vector<double>* coeffs = nullptr;
    if (tok[1] == "cos") coeffs = &series->cos_coeffs;
    else if (tok[1] == "sin") coeffs = &series->sin_coeffs;
    else fail_at(number, "expected 'cos' or 'sin', found '" + std::string(tok[1]) + "'");
    coeffs->clear();
    for (std::size_t k = 2; k < tok.size(); ++k) coeffs->push_back(real_at(tok[k], number));
  }
  if (spec.empty()) throw Error(ErrorKind::kParse, "Fourier spec has no nonzero coefficients");
  return spec;
}

std::string write_fourier_spec(const FourierKnotSpec& spec) {
  std::ostringstream out;
  if (!spec.label.empty()) out << "label " << spec.label << '\n';
  auto emit = [&](const char* axis, const FourierSeries& s) {
    if (!s.cos_coeffs.empty()) {
      out << axis << " cos";
      for (double v : s.cos_coeffs) out << ' ' << format_real(v);
      out << '\n';
    }
    if (!s.sin_coeffs.empty()) {
      out << axis << " sin";
      for (double v : s.sin_coeffs) out << ' ' << format_real(v);
      out << '\n';
    }
  };
  emit("x", spec.x);
  emit("y", spec.y);
  emit("z", spec.z);
  return out.str();
}

namespace {

double evaluate_series(const FourierSeries& s, double t) {
  double v = 0.0;
  for (std::size_t j = 0; j < s.cos_coeffs.size(); ++j) {
    v += s.cos_coeffs[j] * std::cos(2.0 * std::numbers::pi * static_cast<double>(j + 1) * t);
  }
  for (std::size_t j = 0; j < s.sin_coeffs.size(); ++j) {
    v += s.sin_coeffs[j] * std::sin(2.0 * std::numbers::pi * static_cast<double>(j + 1) * t);
  }
  return v;
}

}  // namespace

PolygonalKnot sample_fourier(const FourierKnotSpec& spec, std::size_t n) {
  if (n < 3) throw Error(ErrorKind::kInvalidArgument, "need at least 3 samples");
  if (spec.empty()) throw Error(ErrorKind::kInvalidArgument, "Fourier spec is empty");
  std::vector<Point3> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    pts[i] = {evaluate_series(spec.x, t), evaluate_series(spec.y, t), evaluate_series(spec.z, t)};
  }
  return PolygonalKnot(std::move(pts), spec.label);
}

FourierKnotSpec trefoil_spec() {
  FourierKnotSpec s;
  s.label = "3_1";
  s.x.sin_coeffs = {1.0, 2.0};
  s.y.cos_coeffs = {1.0, -2.0};
  s.z.sin_coeffs = {0.0, 0.0, -1.0};
  return s;
}

FourierKnotSpec figure_eight_spec() {
  // Three-harmonic embedding. The familiar (2 + cos 2t) cos 3t, ..., sin 4t
  // curve is also a figure-eight, but under gradient tightening it locks into
  // a non-ideal conformation near ropelength 55.
  FourierKnotSpec s;
  s.label = "4_1";
  s.x.cos_coeffs = {32, -104, 104};
  s.x.sin_coeffs = {-51, -34, -91};
  s.y.cos_coeffs = {94, 113, -68};
  s.y.sin_coeffs = {41, 0, -124};
  s.z.cos_coeffs = {16, -211, -99};
  s.z.sin_coeffs = {73, -39, -21};
  return s;
}

PolygonalKnot regular_polygon(std::size_t n, double circumradius) {
  std::vector<Point3> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    pts[i] = {circumradius * std::cos(a), circumradius * std::sin(a), 0.0};
  }
  return PolygonalKnot(std::move(pts), std::to_string(n) + "-gon");
}

KnotFile make_hopf_chain(std::size_t links, std::size_t vertices_per_link) {
  if (links < 2) throw Error(ErrorKind::kInvalidArgument, "a closed chain needs at least 2 links");
  if (vertices_per_link < 8) throw Error(ErrorKind::kInvalidArgument, "need at least 8 vertices per link");
  // Elliptical rings (long axis along the necklace) whose planes alternate
  // by a quarter turn about the long axis; consecutive centres are closer
  // than the long diameter so neighbours thread through each other.
  constexpr double kLongAxis = 1.2;
  constexpr double kShortAxis = 1.0;
  constexpr double kSpacing = 1.4;
  constexpr double kSpacingThree = 0.8;
  constexpr double kTilt = 0.8;
  const double spacing = links == 3 ? kSpacingThree : kSpacing;
  const double chain_radius = spacing / (2.0 * std::sin(std::numbers::pi / static_cast<double>(links)));
  // Successive ring planes turn by about a quarter turn; the step is chosen
  // so the turn accumulated around the necklace closes up modulo pi.
  const double tilt_step = links % 2 == 0
                               ? 0.5 * std::numbers::pi
                               : 0.5 * std::numbers::pi * static_cast<double>(links - 1) / static_cast<double>(links);
  KnotFile f;
  f.label = "hopf-chain-" + std::to_string(links);
  for (std::size_t k = 0; k < links; ++k) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(links);
    const Point3 radial(std::cos(phi), std::sin(phi), 0.0);
    const Point3 center = chain_radius * radial;
    // Two links face each other along the radial line instead.
    const Point3 tangent = links == 2 ? radial : Point3(-std::sin(phi), std::cos(phi), 0.0);
    const double tilt = kTilt + static_cast<double>(k) * tilt_step;
    const Point3 side = -Point3::UnitZ().cross(tangent);
    const Point3 normal = std::cos(tilt) * Point3::UnitZ() + std::sin(tilt) * side;
    std::vector<Point3> ring(vertices_per_link);
    for (std::size_t i = 0; i < vertices_per_link; ++i) {
      const double a = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) /
                       static_cast<double>(vertices_per_link);
      ring[i] = center + kLongAxis * std::cos(a) * tangent + kShortAxis * std::sin(a) * normal;
    }
    f.components.push_back(std::move(ring));
  }
  const PolygonalKnot knot = PolygonalKnot::from_components(f.components);
  const double t = thickness(knot).thickness;
  if (!(t > 0.0)) throw Error(ErrorKind::kGeometry, "chain construction self-intersects");
  const double scale = 1.25 / t;
  for (auto& comp : f.components)
    for (auto& p : comp) p *= scale;
  return f;
}

}  // namespace tightknot
