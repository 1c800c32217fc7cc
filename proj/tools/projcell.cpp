// projcell command-line tool.
//
// Exit codes: 0 success, 2 mathematically provisional or diagnosed failure,
// 1 operational error (bad input, missing file, degenerate data).

#include "projcell/projcell.hpp"

#include <iostream>

#include "CLI11.hpp"

using namespace projcell;

namespace {

struct Job {
  std::string rep, cone, out, svg, base, seed = "cusp", points, phi;
  int word_length = 8;
  std::vector<double> scales;
  double tol_geom = 0.0;
  double max_norm = 1e3;
  double radius = std::numeric_limits<double>::infinity();
  int size = 800;
  bool quiet = false;
};

void stage(const Job& job, const std::string& msg) {
  if (!job.quiet) std::cerr << "[projcell] " << msg << "\n";
}

Tolerances tolerances(const Job& job) {
  Tolerances t;
  if (job.tol_geom > 0) {
    t.eps_geom = job.tol_geom;
    t.eps_equal = std::min(t.eps_equal, t.eps_geom);
  }
  t.validate();
  return t;
}

std::vector<Vec> parse_points(const std::string& text) {
  std::vector<Vec> out;
  std::stringstream rows(text);
  std::string row;
  while (std::getline(rows, row, ';')) {
    std::vector<double> vals;
    std::stringstream cols(row);
    std::string cell;
    while (std::getline(cols, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error("cannot parse coordinate '" + cell + "'");
      }
    }
    if (!vals.empty()) out.push_back(Eigen::Map<Vec>(vals.data(), vals.size()));
  }
  return out;
}

ConeModel cone_for(const Job& job, int dim) {
  if (job.cone.empty()) return ConeModel::lorentz(dim);
  ConeModel c = io::load_cone(job.cone);
  if (c.dim() != dim) throw Error("cone dimension does not match the representation");
  return c;
}

void emit(const Job& job, const io::json& j) {
  const std::string text = io::dump(j);
  if (job.out.empty() || job.out == "-")
    std::cout << text;
  else
    io::write_file(job.out, text);
}

std::string default_svg(const Job& job) {
  if (!job.svg.empty()) return job.svg;
  if (job.out.empty() || job.out == "-") return "";
  std::string s = job.out;
  auto dot = s.rfind(".json");
  if (dot != std::string::npos && dot + 5 == s.size()) s.erase(dot);
  return s + ".svg";
}

int cmd_decompose(const Job& job) {
  const Tolerances tol = tolerances(job);
  stage(job, "reading " + job.rep);
  Representation rep = io::load_representation(job.rep, tol);
  ConeModel cone = cone_for(job, rep.dim());
  std::vector<double> scales = job.scales;
  if (scales.empty()) scales.assign(rep.cusps().size(), 1.0);
  DecomposeOptions opt;
  opt.tol = tol;
  opt.max_matrix_norm = job.max_norm;
  stage(job, "decomposing at word length " + std::to_string(job.word_length));
  CellDecomposition dec;
  int code = 0;
  try {
    dec = epstein_penner(rep, cone, scales, job.word_length, opt);
  } catch (const ShallowEnumeration& e) {
    std::cerr << "projcell: " << e.what() << "\n";
    if (!e.partial()) return 1;
    dec = *e.partial();
    code = 2;
  }
  if (code == 0 && !dec.fully_certified()) {
    code = 2;
    for (const auto& s : dec.fundamental.issues) std::cerr << "projcell: " << s << "\n";
  }
  stage(job, "cells by dimension:" + [&] {
    std::string s;
    for (int c : dec.quotient_counts) s += " " + std::to_string(c);
    return s;
  }());
  emit(job, io::to_json(dec));
  const std::string svg = default_svg(job);
  if (rep.dim() == 3 && !svg.empty()) {
    std::vector<Vec> pts;
    for (const auto& v : dec.vertices) pts.push_back(v.lift);
    svg::Style style;
    style.size = job.size;
    io::write_file(svg, svg::render(cone, &dec, pts, style));
    stage(job, "wrote " + svg);
  }
  return code;
}

int cmd_deform(const Job& job) {
  const Tolerances tol = tolerances(job);
  stage(job, "reading " + job.base);
  CellDecomposition dec = io::load_decomposition(job.base);
  const Representation& base_rep = dec.representation;
  Representation rep_t = job.rep.empty() ? base_rep : io::load_representation(job.rep, tol);
  if (rep_t.dim() != base_rep.dim()) throw Error("representations have different dimensions");
  stage(job, "triangulating base polytope");
  TriangulatedPolytope tp = triangulate_base(dec, base_rep);
  stage(job, "tracking cusp fixed points");
  DeformationResult r;
  try {
    r = deform(tp, rep_t, tol);
  } catch (const HypothesisViolated& e) {
    std::cerr << "projcell: " << e.what() << "\n";
    io::json j;
    j["valid"] = false;
    j["error"] = e.what();
    j["cusp"] = e.cusp();
    emit(job, j);
    return 2;
  } catch (const AmbiguousTracking& e) {
    std::cerr << "projcell: " << e.what() << "\n";
    io::json j;
    j["valid"] = false;
    j["error"] = e.what();
    j["cusp"] = e.cusp();
    emit(job, j);
    return 2;
  }
  emit(job, io::to_json(r));
  for (const auto& s : r.issues) std::cerr << "projcell: " << s << "\n";
  return r.valid ? 0 : 2;
}

int cmd_vinberg(const Job& job) {
  const Tolerances tol = tolerances(job);
  if (job.cone.empty()) throw Error("--cone is required");
  ConeModel cone = io::load_cone(job.cone);
  auto pts = parse_points(job.points);
  std::optional<DualFunctional> phi;
  if (!job.phi.empty()) {
    auto v = parse_points(job.phi);
    if (v.size() != 1 || v[0].size() != cone.dim()) throw Error("--phi needs one covector");
    phi = DualFunctional(v[0]);
  }
  std::ostream& os = std::cout;
  os << "x\tf\tlift\tf(2x)/f(x)" << (phi ? "\thorofunction" : "") << "\n";
  auto vec_str = [](const Vec& v) {
    std::string s;
    for (int i = 0; i < v.size(); ++i) s += (i ? "," : "") + io::format_double(v(i));
    return s;
  };
  int bad = 0;
  for (const auto& x : pts) {
    if (x.size() != cone.dim()) {
      os << vec_str(x) << "\tERROR: wrong dimension\n";
      ++bad;
      continue;
    }
    if (!cone.contains(x, tol)) {
      os << vec_str(x) << "\tERROR: not in the open cone\n";
      ++bad;
      continue;
    }
    const double f = cone.f(x, tol);
    const Vec lift = vinberg_lift(cone, x, tol);
    os << vec_str(x) << "\t" << io::format_double(f) << "\t" << vec_str(lift) << "\t"
       << io::format_double(cone.f(Vec(2.0 * x), tol) / f);
    if (phi) os << "\t" << io::format_double((*phi)(lift));
    os << "\n";
  }
  return bad ? 2 : 0;
}

int cmd_orbit(const Job& job) {
  const Tolerances tol = tolerances(job);
  Representation rep = io::load_representation(job.rep, tol);
  ConeModel cone = cone_for(job, rep.dim());
  Vec seed;
  if (job.seed == "cusp") {
    if (rep.cusps().empty()) throw Error("no cusp to seed from; pass --seed");
    auto cd = cusp_data(rep, cone, std::vector<double>(rep.cusps().size(), 1.0), tol);
    seed = cd[0].lift;
  } else {
    auto v = parse_points(job.seed);
    if (v.size() != 1 || v[0].size() != rep.dim()) throw Error("--seed needs one vector");
    seed = v[0];
  }
  stage(job, "enumerating orbit at word length " + std::to_string(job.word_length));
  OrbitReport r = orbit_report(rep, cone, seed, job.word_length, job.max_norm, job.radius, tol);
  emit(job, io::to_json(r));
  return 0;
}

int cmd_render(const Job& job) {
  if (job.svg.empty()) throw Error("--svg is required");
  CellDecomposition dec = io::load_decomposition(job.base);
  if (dec.dim != 3) throw Error("only surfaces can be rendered");
  ConeModel cone = cone_for(job, dec.dim);
  std::vector<Vec> pts;
  for (const auto& v : dec.vertices) pts.push_back(v.lift);
  svg::Style style;
  style.size = job.size;
  io::write_file(job.svg, svg::render(cone, &dec, pts, style));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Canonical cell decompositions of cusped convex projective manifolds"};
  app.require_subcommand(1);
  Job job;

  auto common = [&](CLI::App* sc) {
    sc->add_option("--tol-geom", job.tol_geom, "coplanarity / containment tolerance")
        ->check(CLI::PositiveNumber);
    sc->add_option("--out", job.out, "output file (default stdout)");
    sc->add_flag("--quiet", job.quiet, "no stage log");
  };

  auto* dec = app.add_subcommand("decompose", "canonical decomposition of a representation");
  dec->add_option("--rep", job.rep, "representation JSON")->required();
  dec->add_option("--cone", job.cone, "cone JSON (default Lorentz)");
  dec->add_option("--word-length", job.word_length, "enumeration depth")->check(CLI::Range(1, 16));
  dec->add_option("--scales", job.scales, "horoball scales, one per cusp")->delimiter(',');
  dec->add_option("--svg", job.svg, "SVG output for surfaces");
  dec->add_option("--max-norm", job.max_norm, "matrix norm pruning bound")->check(CLI::PositiveNumber);
  dec->add_option("--size", job.size, "SVG size in pixels")->check(CLI::Range(64, 8192));
  common(dec);

  auto* def = app.add_subcommand("deform", "rebuild the base polytope for a nearby representation");
  def->add_option("--base", job.base, "decomposition JSON from decompose")->required();
  def->add_option("--rep", job.rep, "deformed representation JSON (default: base)");
  common(def);

  auto* vin = app.add_subcommand("vinberg", "characteristic function values");
  vin->add_option("--cone", job.cone, "cone JSON")->required();
  vin->add_option("--points", job.points, "points 'x1,x2,...;y1,y2,...'")->required();
  vin->add_option("--phi", job.phi, "boundary covector for horofunction values");
  common(vin);

  auto* orb = app.add_subcommand("orbit", "orbit point cloud and discreteness report");
  orb->add_option("--rep", job.rep, "representation JSON")->required();
  orb->add_option("--cone", job.cone, "cone JSON (default Lorentz)");
  orb->add_option("--seed", job.seed, "'cusp' or a vector 'x1,x2,...'");
  orb->add_option("--word-length", job.word_length, "enumeration depth")->check(CLI::Range(1, 16));
  orb->add_option("--max-norm", job.max_norm, "matrix norm pruning bound")->check(CLI::PositiveNumber);
  orb->add_option("--radius", job.radius, "norm bound for the pairwise distance");
  common(orb);

  auto* ren = app.add_subcommand("render", "SVG of a surface decomposition");
  ren->add_option("--base", job.base, "decomposition JSON")->required();
  ren->add_option("--cone", job.cone, "cone JSON (default Lorentz)");
  ren->add_option("--svg", job.svg, "output SVG")->required();
  ren->add_option("--size", job.size, "SVG size in pixels")->check(CLI::Range(64, 8192));
  common(ren);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*dec) return cmd_decompose(job);
    if (*def) return cmd_deform(job);
    if (*vin) return cmd_vinberg(job);
    if (*orb) return cmd_orbit(job);
    if (*ren) return cmd_render(job);
  } catch (const std::exception& e) {
    std::cerr << "projcell: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
