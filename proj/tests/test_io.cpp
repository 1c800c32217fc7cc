#include <gtest/gtest.h>

#include <filesystem>

#include "fixtures.hpp"

using namespace projcell;
using fixtures::figure_eight_decomposition;
using fixtures::torus;
using fixtures::torus_decomposition;

namespace {

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

std::string temp_file(const std::string& name, const std::string& text) {
  auto dir = std::filesystem::temp_directory_path() / "projcell_io_tests";
  std::filesystem::create_directories(dir);
  auto p = (dir / name).string();
  io::write_file(p, text);
  return p;
}

}  // namespace

TEST(Format, Doubles) {
  EXPECT_EQ(io::format_double(1.0), "1.0");
  EXPECT_EQ(io::format_double(-3.0), "-3.0");
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(io::format_double(1e300), "1.0000000000000001e+300");
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double x = u(rng);
    EXPECT_EQ(std::stod(io::format_double(x)), x);
  }
}

TEST(Format, DumpIsSortedAndCompact) {
  io::json j;
  j["b"] = std::vector<double>{1.0, 2.5};
  j["a"] = 1;
  j["c"] = io::json::array({io::json::array({1.0, 2.0}), io::json::array({3.0, 4.0})});
  const std::string s = io::dump(j);
  EXPECT_LT(s.find("\"a\""), s.find("\"b\""));
  EXPECT_LT(s.find("\"b\""), s.find("\"c\""));
  EXPECT_NE(s.find("[1.0, 2.5]"), std::string::npos);
  EXPECT_EQ(io::parse_text(s), io::parse_text(s));
  EXPECT_EQ(io::parse_text(s)["b"][1].get<double>(), 2.5);
}

TEST(Parse, SyntaxErrorLocation) {
  const std::string text = "{\n  \"a\": [1,\n  }\n";
  const std::string msg = message_of([&] { io::parse_text(text, "bad.json"); });
  EXPECT_NE(msg.find("bad.json: line 3, column"), std::string::npos) << msg;
  EXPECT_NE(msg.find("malformed JSON"), std::string::npos);
  EXPECT_THROW(io::parse_text("", "x"), io::FormatError);
}

TEST(Parse, SchemaErrorsNameLineAndPath) {
  auto p = temp_file("bad_gen.json",
                     "{\n  \"lorentz_embedding\": \"real\",\n  \"generators\": {\n    \"a\": [[1, 1, 0], [1, 2, 0]]\n  }\n}\n");
  std::string msg = message_of([&] { io::load_representation(p); });
  EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
  EXPECT_NE(msg.find("generators.a"), std::string::npos) << msg;

  p = temp_file("no_gen.json", "{\n  \"relators\": []\n}\n");
  msg = message_of([&] { io::load_representation(p); });
  EXPECT_NE(msg.find("generators"), std::string::npos) << msg;

  p = temp_file("bad_num.json", "{\n  \"generators\": {\n    \"a\": [[1, \"x\"], [0, 1]]\n  }\n}\n");
  msg = message_of([&] { io::load_representation(p); });
  EXPECT_NE(msg.find("generators.a[0][1]"), std::string::npos) << msg;
  EXPECT_NE(msg.find("expected a number"), std::string::npos) << msg;

  p = temp_file("bad_cone.json", "{\"variant\": \"sphere\", \"dim\": 3}");
  msg = message_of([&] { io::load_cone(p); });
  EXPECT_NE(msg.find("unknown cone variant"), std::string::npos) << msg;

  EXPECT_THROW(io::load_representation("/nonexistent/rep.json"), io::FormatError);
}

TEST(Parse, BadRelatorIsFormatError) {
  auto p = temp_file("bad_rel.json",
                     "{\"lorentz_embedding\": \"real\", \"generators\": {\"a\": [[1, 1], [1, 2]]}, \"relators\": [\"a\"]}");
  std::string msg = message_of([&] { io::load_representation(p); });
  EXPECT_NE(msg.find("relator a"), std::string::npos) << msg;
}

TEST(RoundTrip, Representation) {
  for (const Representation* r : {&torus(), &fixtures::figure_eight()}) {
    io::json j = io::to_json(*r);
    Representation back = io::representation_from_json(io::parse_text(io::dump(j)));
    EXPECT_EQ(back.names(), r->names());
    EXPECT_EQ(back.relators(), r->relators());
    ASSERT_EQ(back.cusps().size(), r->cusps().size());
    EXPECT_EQ(back.cusps()[0].words, r->cusps()[0].words);
    EXPECT_EQ(generator_distance(back, *r), 0.0);
    EXPECT_EQ(io::dump(io::to_json(back)), io::dump(j));
  }
}

TEST(RoundTrip, Cones) {
  std::vector<ConeModel> cones{ConeModel::lorentz(3), ConeModel::orthant(4)};
  std::vector<Vec> rays;
  for (int k = 0; k < 4; ++k) {
    Vec v(3);
    v << std::cos(k * M_PI / 2), std::sin(k * M_PI / 2), 1;
    rays.push_back(v);
  }
  cones.push_back(ConeModel::polyhedral(rays));
  cones.push_back(ConeModel::orbit_hull(rays));
  std::mt19937_64 rng(82);
  cones.push_back(ConeModel::lorentz(3, fixtures::random_sl_exp(3, 0.3, rng)));
  for (const auto& c : cones) {
    io::json j = io::to_json(c);
    ConeModel back = io::cone_from_json(io::parse_text(io::dump(j)));
    EXPECT_EQ(back.variant(), c.variant());
    EXPECT_EQ(back.dim(), c.dim());
    EXPECT_EQ(io::dump(io::to_json(back)), io::dump(j));
    Vec x = c.interior_point();
    EXPECT_NEAR(back.f(x), c.f(x), 1e-12 * c.f(x));
  }
}

TEST(RoundTrip, Decomposition) {
  for (const CellDecomposition* d : {&torus_decomposition(), &figure_eight_decomposition()}) {
    const std::string text = io::dump(io::to_json(*d));
    CellDecomposition back = io::decomposition_from_json(io::parse_text(text));
    EXPECT_EQ(io::dump(io::to_json(back)), text);
    EXPECT_EQ(back.quotient_counts, d->quotient_counts);
    EXPECT_EQ(back.cells.size(), d->cells.size());
    EXPECT_EQ(back.fundamental.cells, d->fundamental.cells);
    EXPECT_EQ(back.fully_certified(), d->fully_certified());
    for (std::size_t v = 0; v < d->vertices.size(); ++v) {
      EXPECT_EQ(back.vertices[v].lift, d->vertices[v].lift);
      EXPECT_EQ(back.vertices[v].word, d->vertices[v].word);
    }
    EXPECT_EQ(generator_distance(back.representation, d->representation), 0.0);
  }
}

TEST(RoundTrip, DeformationResult) {
  TriangulatedPolytope tp = triangulate_base(torus_decomposition(), torus());
  DeformationResult r = deform(tp, fixtures::torus_path(0.01));
  const std::string text = io::dump(io::to_json(r));
  DeformationResult back = io::deformation_from_json(io::parse_text(text));
  EXPECT_EQ(io::dump(io::to_json(back)), text);
  EXPECT_EQ(back.valid, r.valid);
  EXPECT_EQ(back.simplices, r.simplices);
  EXPECT_EQ(back.max_residual, r.max_residual);
}

TEST(Determinism, RepeatedRunsAreByteIdentical) {
  const std::string a = io::dump(io::to_json(epstein_penner(torus(), ConeModel::lorentz(3), {1.0}, 8)));
  const std::string b = io::dump(io::to_json(epstein_penner(torus(), ConeModel::lorentz(3), {1.0}, 8)));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, io::dump(io::to_json(torus_decomposition())));
}

TEST(Svg, RendersSurfaceDecomposition) {
  const auto& d = torus_decomposition();
  std::vector<Vec> pts;
  for (const auto& v : d.vertices) pts.push_back(v.lift);
  const std::string s = svg::render(ConeModel::lorentz(3), &d, pts);
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
  EXPECT_NE(s.find("<polygon"), std::string::npos);
  EXPECT_NE(s.find("<circle"), std::string::npos);
  EXPECT_THROW(svg::render(ConeModel::lorentz(4), nullptr, {}), Error);
}
