#include <gtest/gtest.h>

#include "freequiver/errors.hpp"
#include "freequiver/harness.hpp"
#include "freequiver/library_maps.hpp"
#include "freequiver/product.hpp"

using namespace freequiver;

namespace {

Expr a(const std::string& name) { return Expr::atom(name); }

// Sch x Sch -> Sch: x1 <- (x1, x1), x2 <- (x2, x2), x21 <- (x21, x1), x12 <- (x12, x2).
ProductSpec sch_self_product() {
  const Quiver q = sch_quiver();
  std::vector<ProductSpec::Pair> pairs;
  for (const auto& arc : q.arcs()) {
    if (arc.name == "x21") {
      pairs.push_back({"x21", "x1"});
    } else if (arc.name == "x12") {
      pairs.push_back({"x12", "x2"});
    } else {
      pairs.push_back({arc.name, arc.name});
    }
  }
  return ProductSpec{q, q, q, std::move(pairs), true};
}

FreeMapDef right_unit() {
  return FreeMapDef(sch_quiver(), sch_quiver(),
                    std::map<std::string, Expr>{{"x1", Expr::id("u")},
                                                {"x2", Expr::id("v")},
                                                {"x12", a("x12")},
                                                {"x21", a("x21")}});
}

Rep sch_point(std::uint64_t seed) { return random_rep(sch_quiver(), Dims{{"u", 3}, {"v", 2}}, seed); }

}  // namespace

TEST(ProductSpec, WorkedSchSpecIsValid) {
  EXPECT_NO_THROW(validate_product_spec(sch_self_product()));
}

TEST(ProductSpec, RejectsBadPairs) {
  ProductSpec spec = sch_self_product();
  spec.pairs[spec.r.arc_index("x21")] = {"x21", "x2"};
  EXPECT_THROW(validate_product_spec(spec), QuiverError);
  spec = sch_self_product();
  spec.pairs[spec.r.arc_index("x1")] = {"x12", "x21"};  // u -> v -> u
  EXPECT_NO_THROW(validate_product_spec(spec));
  spec.pairs[spec.r.arc_index("x1")] = {"x21", "x12"};  // v -> v, not parallel to x1
  EXPECT_THROW(validate_product_spec(spec), QuiverError);
  spec = sch_self_product();
  spec.pairs.pop_back();
  EXPECT_THROW(validate_product_spec(spec), QuiverError);
  spec = sch_self_product();
  spec.pairs[0] = {"nope", "x1"};
  EXPECT_THROW(validate_product_spec(spec), QuiverError);
}

TEST(JoinQuivers, RenamesClashes) {
  const JoinedQuiver j = join_quivers(sch_quiver(), sch_quiver());
  EXPECT_EQ(j.quiver.vertices().size(), 2u);
  EXPECT_EQ(j.quiver.arc_count(), 8u);
  EXPECT_EQ(j.b_arcs.at("x1"), "x1'");
  const JoinedQuiver k = join_quivers(classical_embed(1), Quiver({"u"}, {{"x", "u", "u"}, {"x'", "u", "u"}}));
  EXPECT_EQ(k.b_arcs.at("x"), "x''");
  EXPECT_EQ(k.b_arcs.at("x'"), "x'");
}

TEST(ProductMaps, WorkedSchEntries) {
  const FreeMapDef f = identity_map(sch_quiver());
  const ProductMap pm = product_maps(sch_self_product(), f, f);
  EXPECT_EQ(pm.map.entry("x1").render(), "x1 x1'");
  EXPECT_EQ(pm.map.entry("x2").render(), "x2 x2'");
  EXPECT_EQ(pm.map.entry("x21").render(), "x21 x1'");
  EXPECT_EQ(pm.map.entry("x12").render(), "x12 x2'");
}

TEST(ProductMaps, DefiningEquation) {
  const ProductSpec spec = sch_self_product();
  for (std::uint64_t s = 0; s < 10; ++s) {
    const FreeMapDef f = random_polynomial_map(sch_quiver(), 2, 10 + s);
    const FreeMapDef g = random_polynomial_map(sch_quiver(), 2, 20 + s);
    const ProductMap pm = product_maps(spec, f, g);
    const Rep x = sch_point(30 + s);
    const Rep y = sch_point(40 + s);
    const Rep lhs = eval_map(pm.map, join_reps(pm.source, x, y));
    const Rep rhs = rep_product(spec, eval_map(f, x), eval_map(g, y));
    EXPECT_LE(rep_difference(lhs, rhs), 1e-10);
  }
}

TEST(ProductMaps, RightIdentity) {
  const ProductSpec spec = sch_self_product();
  const FreeMapDef f = random_polynomial_map(sch_quiver(), 3, 50);
  const ProductMap pm = product_maps(spec, f, right_unit());
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Rep x = sch_point(60 + s);
    const Rep y = sch_point(70 + s);
    EXPECT_LE(rep_difference(eval_map(pm.map, join_reps(pm.source, x, y)), eval_map(f, x)), 1e-12);
  }
}

TEST(ProductMaps, DistributesOverAddition) {
  const ProductSpec spec = sch_self_product();
  const FreeMapDef f = random_polynomial_map(sch_quiver(), 2, 80);
  const FreeMapDef g = random_polynomial_map(sch_quiver(), 2, 81);
  const FreeMapDef h = random_polynomial_map(sch_quiver(), 2, 82);
  const ProductMap sum = product_maps(spec, add_maps(f, g), h);
  const ProductMap fh = product_maps(spec, f, h);
  const ProductMap gh = product_maps(spec, g, h);
  const Rep p = join_reps(sum.source, sch_point(83), sch_point(84));
  EXPECT_LE(rep_difference(eval_map(sum.map, p), eval_map(add_maps(fh.map, gh.map), p)), 1e-10);
}

TEST(ProductMaps, TargetMismatch) {
  EXPECT_THROW(product_maps(sch_self_product(), identity_map(classical_embed(1)), identity_map(sch_quiver())),
               QuiverError);
}

TEST(ProductMaps, RightMultiplicationOrder) {
  const Quiver q = classical_embed(1);
  const ProductSpec spec{q, q, q, {{"x", "x"}}, false};
  const FreeMapDef f(q, q, std::vector<Expr>{a("x") * a("x")});
  const ProductMap pm = product_maps(spec, f, identity_map(q));
  EXPECT_EQ(normalize(pm.map.entry("x")).render(), "x' x x");
}

TEST(HermitianSquare, PositiveSemidefinite) {
  const Quiver q = sch_quiver();
  const ProductSpec spec = hermitian_square_spec(q);
  const ProductMap pm = product_maps(spec, identity_map(spec.p), identity_map(q));
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Rep x = sch_point(90 + s);
    const Rep sq = eval_map(pm.map, join_reps(pm.source, adjoint_rep(x), x));
    for (std::size_t i = 0; i < q.arc_count(); ++i) {
      const Matrix& m = sq.mat(i);
      EXPECT_LE(relative_difference(m, x.mat(i).adjoint() * x.mat(i)), 1e-13);
      EXPECT_LE(op_norm(m - m.adjoint()), 1e-12);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
      EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
    }
  }
}

TEST(Adjoint, Involution) {
  const Rep x = sch_point(99);
  const Rep back = adjoint_rep(adjoint_rep(x));
  for (std::size_t i = 0; i < x.mats().size(); ++i) EXPECT_EQ(back.mat(i), x.mat(i));
  EXPECT_EQ(adjoint_quiver(sch_quiver()).arc("x12*").src, "u");
}
