#pragma once

// JSON formats. Numbers are written with 17 significant digits and object
// keys in sorted order, so output is byte-for-byte deterministic.

#include "projcell/decomp.hpp"
#include "projcell/deform.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace projcell::io {

using json = nlohmann::json;

class FormatError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::string format_double(double x) {
  if (!std::isfinite(x)) {
    if (std::isnan(x)) return "null";
    return x > 0 ? "1e999" : "-1e999";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos) s += ".0";
  return s;
}

namespace detail {

inline void write(const json& j, std::string& out, int indent, int level) {
  auto nl = [&](int lv) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * lv), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        nl(level + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(it.value(), out, indent, level + 1);
      }
      nl(level);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && !e.is_structured();
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += scalars ? ", " : ",";
        first = false;
        if (!scalars) nl(level + 1);
        write(e, out, indent, level + 1);
      }
      if (!scalars) nl(level);
      out += ']';
      return;
    }
    case json::value_t::number_float: out += format_double(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace detail

/// Deterministic text form; `indent` < 0 gives a single line.
inline std::string dump(const json& j, int indent = 1) {
  std::string out;
  detail::write(j, out, indent, 0);
  if (indent >= 0) out += '\n';
  return out;
}

inline json to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json to_json(const Mat& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

// ---------------------------------------------------------------------------
// Parsing helpers with located messages
// ---------------------------------------------------------------------------

/// Parses text, reporting syntax errors as "line L, column C: ...".
inline json parse_text(const std::string& text, const std::string& source = "input") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t pos = e.byte == 0 ? 0 : e.byte - 1;
    int line = 1, col = 1;
    for (std::size_t i = 0; i < pos && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw FormatError(source + ": line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": malformed JSON");
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

namespace detail {

// Located schema errors: the JSON path plus the first line of the source
// mentioning the offending key when the source text is known.
struct Ctx {
  const std::string* text = nullptr;
  std::string source = "input";

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    std::string where = source;
    if (text) {
      std::string key = path;
      auto dot = key.find_last_of('.');
      if (dot != std::string::npos) key = key.substr(dot + 1);
      auto br = key.find('[');
      if (br != std::string::npos) key = key.substr(0, br);
      auto pos = key.empty() ? std::string::npos : text->find("\"" + key + "\"");
      if (pos != std::string::npos) {
        int line = 1;
        for (std::size_t i = 0; i < pos; ++i)
          if ((*text)[i] == '\n') ++line;
        where += ": line " + std::to_string(line);
      }
    }
    throw FormatError(where + ": " + path + ": " + msg);
  }
};

inline double num(const json& j, const std::string& path, const Ctx& c) {
  if (!j.is_number()) c.fail(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) c.fail(path, "expected a finite number");
  return v;
}

inline Vec vec(const json& j, const std::string& path, const Ctx& c, int size = -1) {
  if (!j.is_array()) c.fail(path, "expected an array of numbers");
  if (size >= 0 && static_cast<int>(j.size()) != size)
    c.fail(path, "expected " + std::to_string(size) + " entries");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v(i) = num(j[i], path + "[" + std::to_string(i) + "]", c);
  return v;
}

inline Mat mat(const json& j, const std::string& path, const Ctx& c) {
  if (!j.is_array() || j.empty()) c.fail(path, "expected a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Mat m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) c.fail(rp, "rows must have equal length");
    for (std::size_t k = 0; k < cols; ++k)
      m(r, k) = num(j[r][k], rp + "[" + std::to_string(k) + "]", c);
  }
  return m;
}

inline Eigen::Matrix2cd cmat2(const json& j, const std::string& path, const Ctx& c) {
  if (!j.is_array() || j.size() != 2) c.fail(path, "expected a 2x2 matrix");
  Eigen::Matrix2cd m;
  for (int r = 0; r < 2; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != 2) c.fail(rp, "expected 2 entries");
    for (int k = 0; k < 2; ++k) {
      const json& e = j[r][k];
      const std::string ep = rp + "[" + std::to_string(k) + "]";
      if (e.is_number()) {
        m(r, k) = Complex(num(e, ep, c), 0.0);
      } else if (e.is_array() && e.size() == 2) {
        m(r, k) = Complex(num(e[0], ep + "[0]", c), num(e[1], ep + "[1]", c));
      } else {
        c.fail(ep, "expected a number or [re, im]");
      }
    }
  }
  return m;
}

inline std::string str(const json& j, const std::string& path, const Ctx& c) {
  if (!j.is_string()) c.fail(path, "expected a string");
  return j.get<std::string>();
}

inline const json& field(const json& j, const std::string& key, const std::string& path,
                         const Ctx& c) {
  if (!j.is_object()) c.fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) c.fail(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Representation
// ---------------------------------------------------------------------------

inline json to_json(const Representation& rep) {
  json j;
  j["dim"] = rep.dim();
  json gens = json::object();
  for (char c : rep.names()) gens[std::string(1, c)] = to_json(rep.generator(c));
  j["generators"] = gens;
  j["relators"] = rep.relators();
  json cusps = json::array();
  for (const auto& c : rep.cusps()) {
    json cj;
    cj["name"] = c.name;
    cj["words"] = c.words;
    if (c.fixed_point) cj["fixed_point"] = to_json(*c.fixed_point);
    cusps.push_back(cj);
  }
  j["cusps"] = cusps;
  return j;
}

inline Representation representation_from_json(const json& j, const Tolerances& tol = {},
                                                const detail::Ctx& c = {}) {
  using namespace detail;
  if (!j.is_object()) c.fail("", "representation must be an object");
  std::string embedding;
  if (j.contains("lorentz_embedding")) {
    embedding = str(j["lorentz_embedding"], "lorentz_embedding", c);
    if (embedding != "real" && embedding != "complex")
      c.fail("lorentz_embedding", "expected \"real\" or \"complex\"");
  }
  const json& gj = field(j, "generators", "", c);
  if (!gj.is_object() || gj.empty()) c.fail("generators", "expected a nonempty object");
  std::map<char, Mat> gens;
  for (auto it = gj.begin(); it != gj.end(); ++it) {
    const std::string path = "generators." + it.key();
    if (it.key().size() != 1 || !std::islower(static_cast<unsigned char>(it.key()[0])))
      c.fail(path, "generator names must be single lowercase letters");
    Mat m;
    try {
      if (embedding == "real") {
        Mat g = mat(it.value(), path, c);
        if (g.rows() != 2 || g.cols() != 2) c.fail(path, "expected a 2x2 matrix");
        m = lorentz_embedding(Eigen::Matrix2d(g), tol);
      } else if (embedding == "complex") {
        m = lorentz_embedding(cmat2(it.value(), path, c), tol);
      } else {
        m = mat(it.value(), path, c);
      }
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      c.fail(path, e.what());
    }
    gens[it.key()[0]] = m;
  }
  if (j.contains("dim")) {
    const double d = num(j["dim"], "dim", c);
    for (auto& [k, m] : gens)
      if (m.rows() != static_cast<int>(d) || m.cols() != static_cast<int>(d))
        c.fail(std::string("generators.") + k, "size does not match dim");
  }
  std::vector<std::string> relators;
  if (j.contains("relators")) {
    if (!j["relators"].is_array()) c.fail("relators", "expected an array of words");
    for (std::size_t i = 0; i < j["relators"].size(); ++i)
      relators.push_back(str(j["relators"][i], "relators[" + std::to_string(i) + "]", c));
  }
  std::vector<CuspWords> cusps;
  if (j.contains("cusps")) {
    if (!j["cusps"].is_array()) c.fail("cusps", "expected an array");
    for (std::size_t i = 0; i < j["cusps"].size(); ++i) {
      const std::string path = "cusps[" + std::to_string(i) + "]";
      const json& cj = j["cusps"][i];
      CuspWords cs;
      cs.name = cj.contains("name") ? str(cj["name"], path + ".name", c) : "c" + std::to_string(i);
      const json& wj = field(cj, "words", path, c);
      if (!wj.is_array() || wj.empty()) c.fail(path + ".words", "expected a nonempty array");
      for (std::size_t k = 0; k < wj.size(); ++k)
        cs.words.push_back(str(wj[k], path + ".words[" + std::to_string(k) + "]", c));
      if (cj.contains("fixed_point")) cs.fixed_point = vec(cj["fixed_point"], path + ".fixed_point", c);
      cusps.push_back(cs);
    }
  }
  try {
    Representation r(gens, relators, cusps, tol);
    r.set_lorentz_embedding(embedding);
    return r;
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(c.source + ": " + e.what());
  }
}

inline Representation load_representation(const std::string& path, const Tolerances& tol = {}) {
  const std::string text = read_file(path);
  detail::Ctx c{&text, path};
  return representation_from_json(parse_text(text, path), tol, c);
}

// ---------------------------------------------------------------------------
// Cones
// ---------------------------------------------------------------------------

inline json to_json(const ConeModel& cone) {
  json j;
  j["variant"] = variant_name(cone.variant());
  j["dim"] = cone.dim();
  if (cone.variant() == ConeVariant::Polyhedral || cone.variant() == ConeVariant::OrbitHull) {
    json rays = json::array();
    const auto& src = cone.variant() == ConeVariant::OrbitHull ? cone.samples() : cone.rays();
    for (const auto& r : src) rays.push_back(to_json(r));
    j["rays"] = rays;
  }
  if (cone.has_frame()) j["frame"] = to_json(cone.frame());
  return j;
}

inline ConeModel cone_from_json(const json& j, const detail::Ctx& c = {}) {
  using namespace detail;
  const std::string v = str(field(j, "variant", "", c), "variant", c);
  Mat frame;
  if (j.contains("frame")) frame = mat(j["frame"], "frame", c);
  try {
    if (v == "lorentz" || v == "orthant") {
      const double d = num(field(j, "dim", "", c), "dim", c);
      if (d < 2 || d != std::floor(d)) c.fail("dim", "expected an integer >= 2");
      return v == "lorentz" ? ConeModel::lorentz(static_cast<int>(d), frame)
                            : ConeModel::orthant(static_cast<int>(d), frame);
    }
    if (v == "polyhedral" || v == "orbit_hull") {
      const json& rj = field(j, "rays", "", c);
      if (!rj.is_array() || rj.empty()) c.fail("rays", "expected a nonempty array");
      std::vector<Vec> rays;
      for (std::size_t i = 0; i < rj.size(); ++i)
        rays.push_back(vec(rj[i], "rays[" + std::to_string(i) + "]", c));
      return v == "polyhedral" ? ConeModel::polyhedral(rays) : ConeModel::orbit_hull(rays);
    }
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(c.source + ": " + e.what());
  }
  c.fail("variant", "unknown cone variant '" + v + "'");
}

inline ConeModel load_cone(const std::string& path) {
  const std::string text = read_file(path);
  detail::Ctx c{&text, path};
  return cone_from_json(parse_text(text, path), c);
}

/// Orbit-hull cone of a representation: attracting and repelling
/// eigenvectors of enumerated non-parabolic elements plus the parabolic
/// fixed points of the cusps, oriented by a reference functional.
inline ConeModel orbit_hull_cone(const Representation& rep, int word_length,
                                 const Vec& reference = Vec(), const Tolerances& tol = {}) {
  const int N = rep.dim();
  Vec ref = reference.size() ? reference : Vec(Vec::Unit(N, N - 1));
  std::vector<Vec> rays;
  auto add = [&](Vec v) {
    if (v.dot(ref) < 0) v = -v;
    if (v.dot(ref) <= 1e-12 * v.norm()) return;
    v.normalize();
    for (const auto& r : rays)
      if ((r - v).norm() < 1e-9) return;
    rays.push_back(v);
  };
  Enumeration en = enumerate_elements(rep, word_length, 1e8);
  for (const auto& e : en.elements) {
    if (e.word.empty()) continue;
    auto sp = spectral(e.matrix, tol);
    if (sp.size() < 2) continue;
    const auto& top = sp.front();
    const auto& bottom = sp.back();
    if (top.modulus() > 1 + 1e-3 && top.algebraic == 1 && top.is_real(1e-9) &&
        !top.real_vectors.empty())
      add(top.real_vectors[0]);
    if (bottom.modulus() < 1 - 1e-3 && bottom.algebraic == 1 && bottom.is_real(1e-9) &&
        !bottom.real_vectors.empty())
      add(bottom.real_vectors[0]);
  }
  for (const auto& c : rep.cusps()) {
    auto r = validate_cusp(rep, c);
    if (r.fixed_point) add(r.fixed_point->coords());
  }
  if (static_cast<int>(rays.size()) < N) throw Error("too few boundary directions for an orbit hull");
  return ConeModel::orbit_hull(rays);
}

// ---------------------------------------------------------------------------
// Hull complex
// ---------------------------------------------------------------------------

inline json to_json(const HullComplex& h) {
  json j;
  j["dim"] = h.dim;
  json pts = json::array();
  for (const auto& p : h.points) pts.push_back(to_json(p));
  j["points"] = pts;
  j["vertices"] = h.vertex_ids;
  json fs = json::array();
  for (const auto& f : h.facets) {
    json fj;
    fj["normal"] = to_json(f.normal);
    fj["offset"] = f.offset;
    fj["vertices"] = f.vertices;
    fs.push_back(fj);
  }
  j["facets"] = fs;
  json adj = json::array();
  for (auto [a, b] : h.adjacency) adj.push_back({a, b});
  j["adjacency"] = adj;
  j["tolerance"] = h.tolerance;
  return j;
}

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

inline json to_json(const Chart& ch) {
  json j;
  j["ell"] = to_json(ch.ell);
  j["center"] = to_json(ch.center);
  j["basis"] = to_json(ch.basis);
  return j;
}

inline json to_json(const CellDecomposition& d) {
  json j;
  j["dim"] = d.dim;
  j["word_length"] = d.word_length;
  j["radius_used"] = d.radius_used;
  j["max_required_radius"] = d.max_required_radius;
  j["orbit_points"] = d.orbit_points;
  j["chart"] = to_json(d.chart);
  j["representation"] = to_json(d.representation);
  json cusps = json::array();
  json scales = json::array();
  for (const auto& c : d.cusps) {
    json cj;
    cj["name"] = c.name;
    cj["words"] = c.words;
    cj["point"] = to_json(c.point);
    cj["lift"] = to_json(c.lift);
    cj["scale"] = c.scale;
    cj["phi"] = to_json(c.phi);
    cj["translations"] = to_json(c.translations);
    cj["basis"] = to_json(c.basis);
    cj["lattice"] = c.lattice;
    cusps.push_back(cj);
    scales.push_back(c.scale);
  }
  j["cusps"] = cusps;
  j["scales"] = scales;
  json verts = json::array();
  for (const auto& v : d.vertices) {
    json vj;
    vj["lift"] = to_json(v.lift);
    vj["word"] = v.word;
    vj["cusp"] = v.cusp;
    vj["point"] = to_json(ProjPoint(v.lift).coords());
    verts.push_back(vj);
  }
  j["vertices"] = verts;
  json cells = json::array();
  for (const auto& c : d.cells) {
    json cj;
    cj["dim"] = c.dim;
    cj["vertex_ids"] = c.vertices;
    json vs = json::array();
    for (int v : c.vertices) vs.push_back(to_json(ProjPoint(d.vertices[v].lift).coords()));
    cj["vertices"] = vs;
    cj["class"] = c.cls;
    cj["certified"] = c.certified;
    if (c.normal.size()) {
      cj["normal"] = to_json(c.normal);
      cj["offset"] = c.offset;
      cj["required_radius"] = c.required_radius;
    }
    cj["faces"] = c.faces;
    cells.push_back(cj);
  }
  j["cells"] = cells;
  json prs = json::array();
  for (const auto& p : d.pairings) {
    json pj;
    pj["from"] = p.from;
    pj["to"] = p.to;
    pj["dim"] = p.dim;
    pj["word"] = p.word;
    pj["vertex_map"] = p.vertex_map;
    prs.push_back(pj);
  }
  j["pairings"] = prs;
  json qc = json::object();
  for (std::size_t k = 0; k < d.quotient_counts.size(); ++k)
    qc[std::to_string(k)] = d.quotient_counts[k];
  j["quotient_counts"] = qc;
  j["provisional"] = d.provisional;
  json fp;
  fp["cells"] = d.fundamental.cells;
  fp["interior_faces"] = d.fundamental.interior_faces;
  fp["complete"] = d.fundamental.complete;
  fp["issues"] = d.fundamental.issues;
  json fps = json::array();
  for (const auto& p : d.fundamental.pairings) {
    json pj;
    pj["face"] = p.face;
    pj["partner"] = p.partner;
    pj["cell"] = p.cell;
    pj["partner_cell"] = p.partner_cell;
    pj["word"] = p.word;
    pj["vertex_map"] = p.vertex_map;
    fps.push_back(pj);
  }
  fp["pairings"] = fps;
  j["fundamental"] = fp;
  return j;
}

inline CellDecomposition decomposition_from_json(const json& j, const detail::Ctx& c = {}) {
  using namespace detail;
  CellDecomposition d;
  auto integer = [&](const json& x, const std::string& p) {
    const double v = num(x, p, c);
    if (v != std::floor(v)) c.fail(p, "expected an integer");
    return static_cast<int>(v);
  };
  auto ints = [&](const json& x, const std::string& p) {
    if (!x.is_array()) c.fail(p, "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < x.size(); ++i) out.push_back(integer(x[i], p + "[" + std::to_string(i) + "]"));
    return out;
  };
  d.dim = integer(field(j, "dim", "", c), "dim");
  d.word_length = integer(field(j, "word_length", "", c), "word_length");
  d.radius_used = j.contains("radius_used") && j["radius_used"].is_number()
                      ? j["radius_used"].get<double>()
                      : std::numeric_limits<double>::infinity();
  d.max_required_radius = num(field(j, "max_required_radius", "", c), "max_required_radius", c);
  if (j.contains("orbit_points")) d.orbit_points = integer(j["orbit_points"], "orbit_points");
  const json& ch = field(j, "chart", "", c);
  d.chart.ell = vec(field(ch, "ell", "chart", c), "chart.ell", c);
  d.chart.center = vec(field(ch, "center", "chart", c), "chart.center", c);
  d.chart.basis = mat(field(ch, "basis", "chart", c), "chart.basis", c);
  d.representation = representation_from_json(field(j, "representation", "", c), {}, c);
  const json& cj = field(j, "cusps", "", c);
  for (std::size_t i = 0; i < cj.size(); ++i) {
    const std::string p = "cusps[" + std::to_string(i) + "]";
    CuspDatum cd;
    cd.name = str(field(cj[i], "name", p, c), p + ".name", c);
    for (const auto& w : field(cj[i], "words", p, c)) cd.words.push_back(str(w, p + ".words", c));
    cd.point = vec(field(cj[i], "point", p, c), p + ".point", c);
    cd.lift = vec(field(cj[i], "lift", p, c), p + ".lift", c);
    cd.scale = num(field(cj[i], "scale", p, c), p + ".scale", c);
    cd.phi = vec(field(cj[i], "phi", p, c), p + ".phi", c);
    const json& tj = field(cj[i], "translations", p, c);
    cd.translations = tj.empty() ? Mat(0, cd.words.size()) : mat(tj, p + ".translations", c);
    const json& bj = field(cj[i], "basis", p, c);
    cd.basis = bj.empty() ? Mat(d.dim, 0) : mat(bj, p + ".basis", c);
    cd.lattice = ints(field(cj[i], "lattice", p, c), p + ".lattice");
    d.cusps.push_back(cd);
  }
  const json& vj = field(j, "vertices", "", c);
  for (std::size_t i = 0; i < vj.size(); ++i) {
    const std::string p = "vertices[" + std::to_string(i) + "]";
    PoolVertex v;
    v.lift = vec(field(vj[i], "lift", p, c), p + ".lift", c, d.dim);
    v.word = str(field(vj[i], "word", p, c), p + ".word", c);
    v.cusp = integer(field(vj[i], "cusp", p, c), p + ".cusp");
    d.vertices.push_back(v);
  }
  const json& cl = field(j, "cells", "", c);
  for (std::size_t i = 0; i < cl.size(); ++i) {
    const std::string p = "cells[" + std::to_string(i) + "]";
    Cell cell;
    cell.dim = integer(field(cl[i], "dim", p, c), p + ".dim");
    cell.vertices = ints(field(cl[i], "vertex_ids", p, c), p + ".vertex_ids");
    for (int v : cell.vertices)
      if (v < 0 || v >= static_cast<int>(d.vertices.size())) c.fail(p + ".vertex_ids", "vertex id out of range");
    cell.cls = integer(field(cl[i], "class", p, c), p + ".class");
    if (!field(cl[i], "certified", p, c).is_boolean()) c.fail(p + ".certified", "expected a boolean");
    cell.certified = cl[i]["certified"].get<bool>();
    if (cl[i].contains("normal")) {
      cell.normal = vec(cl[i]["normal"], p + ".normal", c);
      cell.offset = num(field(cl[i], "offset", p, c), p + ".offset", c);
      const json& rr = field(cl[i], "required_radius", p, c);
      cell.required_radius = rr.is_number() ? rr.get<double>() : std::numeric_limits<double>::infinity();
    }
    cell.faces = ints(field(cl[i], "faces", p, c), p + ".faces");
    d.cells.push_back(cell);
  }
  const json& pj = field(j, "pairings", "", c);
  for (std::size_t i = 0; i < pj.size(); ++i) {
    const std::string p = "pairings[" + std::to_string(i) + "]";
    CellPairing cp;
    cp.from = integer(field(pj[i], "from", p, c), p + ".from");
    cp.to = integer(field(pj[i], "to", p, c), p + ".to");
    cp.dim = integer(field(pj[i], "dim", p, c), p + ".dim");
    cp.word = str(field(pj[i], "word", p, c), p + ".word", c);
    cp.vertex_map = ints(field(pj[i], "vertex_map", p, c), p + ".vertex_map");
    d.pairings.push_back(cp);
  }
  const json& qc = field(j, "quotient_counts", "", c);
  d.quotient_counts.assign(d.dim, 0);
  for (auto it = qc.begin(); it != qc.end(); ++it) {
    const int k = std::stoi(it.key());
    if (k < 0 || k >= d.dim) c.fail("quotient_counts", "dimension out of range");
    d.quotient_counts[k] = integer(it.value(), "quotient_counts." + it.key());
  }
  d.provisional = ints(field(j, "provisional", "", c), "provisional");
  const json& fp = field(j, "fundamental", "", c);
  d.fundamental.cells = ints(field(fp, "cells", "fundamental", c), "fundamental.cells");
  d.fundamental.interior_faces =
      ints(field(fp, "interior_faces", "fundamental", c), "fundamental.interior_faces");
  d.fundamental.complete = field(fp, "complete", "fundamental", c).get<bool>();
  for (const auto& s : field(fp, "issues", "fundamental", c))
    d.fundamental.issues.push_back(str(s, "fundamental.issues", c));
  const json& fps = field(fp, "pairings", "fundamental", c);
  for (std::size_t i = 0; i < fps.size(); ++i) {
    const std::string p = "fundamental.pairings[" + std::to_string(i) + "]";
    FacePairing f;
    f.face = integer(field(fps[i], "face", p, c), p + ".face");
    f.partner = integer(field(fps[i], "partner", p, c), p + ".partner");
    f.cell = integer(field(fps[i], "cell", p, c), p + ".cell");
    f.partner_cell = integer(field(fps[i], "partner_cell", p, c), p + ".partner_cell");
    f.word = str(field(fps[i], "word", p, c), p + ".word", c);
    f.vertex_map = ints(field(fps[i], "vertex_map", p, c), p + ".vertex_map");
    d.fundamental.pairings.push_back(f);
  }
  return d;
}

inline CellDecomposition load_decomposition(const std::string& path) {
  const std::string text = read_file(path);
  detail::Ctx c{&text, path};
  return decomposition_from_json(parse_text(text, path), c);
}

// ---------------------------------------------------------------------------
// Deformation
// ---------------------------------------------------------------------------

inline json to_json(const TriangulatedPolytope& tp) {
  json j;
  j["dim"] = tp.dim;
  j["x0"] = to_json(tp.x0);
  json vs = json::array();
  for (const auto& v : tp.vertices) {
    json vj;
    vj["lift"] = to_json(v.lift);
    vj["cusp"] = v.cusp;
    vj["word"] = v.word;
    vs.push_back(vj);
  }
  j["vertices"] = vs;
  j["simplices"] = tp.simplices;
  j["simplex_face"] = tp.simplex_face;
  j["orientation"] = tp.orientation;
  json ps = json::array();
  for (const auto& p : tp.pairings) {
    json pj;
    pj["from"] = p.from;
    pj["to"] = p.to;
    pj["word"] = p.word;
    pj["vertex_map"] = p.vertex_map;
    ps.push_back(pj);
  }
  j["pairings"] = ps;
  json cp = json::array();
  for (const auto& v : tp.cusp_points) cp.push_back(to_json(v));
  j["cusp_points"] = cp;
  j["cusp_names"] = tp.cusp_names;
  j["cusp_words"] = tp.cusp_words;
  j["representation"] = to_json(tp.base);
  return j;
}

inline json to_json(const DeformationResult& r) {
  json j;
  json vs = json::array();
  for (const auto& v : r.vertices) vs.push_back(to_json(v));
  j["vertices"] = vs;
  j["x0"] = to_json(r.x0);
  j["simplices"] = r.simplices;
  json rp = json::array();
  for (const auto& v : r.radial_points) rp.push_back(to_json(ProjPoint(v).coords()));
  j["radial_points"] = rp;
  j["max_residual"] = r.max_residual;
  j["max_drift"] = r.max_drift;
  j["rep_distance"] = r.rep_distance;
  j["min_abs_det"] = r.min_abs_det;
  j["valid"] = r.valid;
  j["degenerate_simplices"] = r.degenerate_simplices;
  j["bad_words"] = r.bad_words;
  j["issues"] = r.issues;
  return j;
}

inline DeformationResult deformation_from_json(const json& j, const detail::Ctx& c = {}) {
  using namespace detail;
  DeformationResult r;
  for (const auto& v : field(j, "vertices", "", c)) r.vertices.push_back(vec(v, "vertices", c));
  r.x0 = vec(field(j, "x0", "", c), "x0", c);
  r.simplices = field(j, "simplices", "", c).get<std::vector<std::vector<int>>>();
  for (const auto& v : field(j, "radial_points", "", c))
    r.radial_points.push_back(vec(v, "radial_points", c));
  r.max_residual = num(field(j, "max_residual", "", c), "max_residual", c);
  r.max_drift = num(field(j, "max_drift", "", c), "max_drift", c);
  r.rep_distance = num(field(j, "rep_distance", "", c), "rep_distance", c);
  const json& md = field(j, "min_abs_det", "", c);
  r.min_abs_det = md.is_number() ? md.get<double>() : std::numeric_limits<double>::infinity();
  r.valid = field(j, "valid", "", c).get<bool>();
  r.degenerate_simplices = field(j, "degenerate_simplices", "", c).get<std::vector<int>>();
  r.bad_words = field(j, "bad_words", "", c).get<std::vector<std::string>>();
  r.issues = field(j, "issues", "", c).get<std::vector<std::string>>();
  return r;
}

// ---------------------------------------------------------------------------
// Orbit report
// ---------------------------------------------------------------------------

inline json to_json(const OrbitReport& r) {
  json j;
  json pts = json::array();
  for (const auto& p : r.points) {
    json pj;
    pj["x"] = to_json(p.x);
    pj["word"] = p.word;
    pts.push_back(pj);
  }
  j["points"] = pts;
  j["min_pairwise_distance"] = r.min_pairwise;
  json acc;
  acc["seed_norm"] = r.seed_norm;
  acc["min_norm"] = r.min_norm;
  acc["max_norm"] = r.max_norm;
  acc["min_norm_ratio"] = r.min_norm_ratio;
  j["accumulation"] = acc;
  j["size"] = r.points.size();
  return j;
}

}  // namespace projcell::io
