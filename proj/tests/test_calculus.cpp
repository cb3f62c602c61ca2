#include <gtest/gtest.h>

#include <cmath>

#include "freequiver/calculus.hpp"
#include "freequiver/errors.hpp"
#include "freequiver/harness.hpp"
#include "freequiver/library_maps.hpp"
#include "freequiver/rng.hpp"

using namespace freequiver;

namespace {

Expr a(const std::string& name) { return Expr::atom(name); }

Rep sch_point(std::uint64_t seed, Index n = 3, Index m = 2) {
  return random_rep(sch_quiver(), Dims{{"u", n}, {"v", m}}, seed);
}

double stacked_difference(const std::vector<Matrix>& p, const std::vector<Matrix>& q) {
  return relative_difference(stack(p), stack(q));
}

}  // namespace

TEST(BlockExtend, ZeroDirectionIsDoubling) {
  const Rep x = sch_point(1);
  EXPECT_EQ(rep_difference(block_extend(zero_direction(x)), direct_sum(x, x)), 0.0);
}

TEST(BlockExtend, ScalarNilpotent) {
  const Quiver q = classical_embed(1);
  const Rep x(q, std::vector<Index>{1}, {Matrix::Zero(1, 1)});
  const Rep b = block_extend(x, {Matrix::Ones(1, 1)});
  EXPECT_EQ(b.mat("x"), nilpotent_matrix(2));
}

TEST(BlockExtend, PathDiagonalBlocks) {
  const Quiver q = sch_quiver();
  const Rep x = sch_point(2);
  const Rep b = block_extend(random_direction(x, 3));
  for (const auto& s : q.vertices())
    for (const auto& t : q.vertices())
      for (const auto& p : enumerate_paths(q, s, t, 3)) {
        const Matrix m = eval_path(b, p);
        const Matrix want = eval_path(x, p);
        const Index r = want.rows(), c = want.cols();
        EXPECT_EQ(m.bottomLeftCorner(r, c), Matrix::Zero(r, c));
        EXPECT_LE(relative_difference(m.topLeftCorner(r, c), want), 1e-13);
        EXPECT_LE(relative_difference(m.bottomRightCorner(r, c), want), 1e-13);
      }
}

TEST(Direction, ShapesChecked) {
  const Rep x = sch_point(4);
  EXPECT_THROW(make_direction(x, {Matrix::Zero(1, 1)}), ShapeError);
  std::vector<Matrix> h = random_direction(x, 5).h;
  h[2] = Matrix::Zero(5, 5);
  EXPECT_THROW(make_direction(x, h), ShapeError);
}

TEST(Direction, StackRoundTrip) {
  const Rep x = sch_point(6);
  const DirectionField d = random_direction(x, 7);
  const Vector v = stack(d.h);
  EXPECT_EQ(v.size(), 9 + 4 + 6 + 6);
  EXPECT_EQ(static_cast<Index>(direction_coords(x).size()), v.size());
  const auto back = unstack(v, x);
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(back[i], d.h[i]);
  const auto c = direction_coords(x)[10];  // entry (1, 0) of x2, after the 9 entries of x1
  EXPECT_EQ(c.arc, 1u);
  EXPECT_EQ(c.row, 1);
  EXPECT_EQ(c.col, 0);
}

TEST(DirectionalDerivative, LinearMapAppliesToH) {
  const Quiver q = classical_embed(2);
  const FreeMapDef f(q, q, std::vector<Expr>{2.0 * a("x") - a("y"), a("y")});
  const Rep x = random_rep(q, Dims{{"u", 3}}, 8);
  const DirectionField h = random_direction(x, 9);
  const DirectionField d = directional_derivative(f, x, h.h);
  EXPECT_LE(relative_difference(d.h[0], 2.0 * h.h[0] - h.h[1]), 1e-14);
  EXPECT_LE(relative_difference(d.h[1], h.h[1]), 1e-14);
  const DirectionField fd = finite_difference(f, x, h.h, 0.5);
  EXPECT_LE(stacked_difference(fd.h, d.h), 1e-12);
}

TEST(DirectionalDerivative, BaseIsImage) {
  const Rep x = sch_point(10);
  const DirectionField d = directional_derivative(schur_map(), x, random_direction(x, 11).h);
  EXPECT_LE(rep_difference(d.base, eval_map(schur_map(), x)), 1e-14);
}

TEST(DirectionalDerivative, SquareMatchesProductRule) {
  const Quiver q = classical_embed(1);
  const FreeMapDef f(q, q, std::vector<Expr>{a("x") * a("x")});
  const Rep x = random_rep(q, Dims{{"u", 4}}, 12);
  const Matrix X = x.mat(0);
  const Matrix H = random_direction(x, 13).h[0];
  EXPECT_LE(relative_difference(directional_derivative(f, x, {H}).h[0], X * H + H * X), 1e-13);
}

TEST(DirectionalDerivative, InverseIdentity) {
  const Quiver q = classical_embed(1);
  const FreeMapDef f(q, q, std::vector<Expr>{inv(a("x"))});
  const Rep x = random_rep(q, Dims{{"u", 4}}, 14);
  const Matrix Xi = x.mat(0).inverse();
  const Matrix H = random_direction(x, 15).h[0];
  EXPECT_LE(relative_difference(directional_derivative(f, x, {H}).h[0], -Xi * H * Xi), 1e-12);
}

TEST(DirectionalDerivative, SchurClosedForm) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Rep x = sch_point(20 + s, 4, 3);
    const auto h = random_direction(x, 30 + s).h;
    EXPECT_LE(relative_difference(directional_derivative(schur_map(), x, h).h[0], dsch_closed_form(x, h)), 1e-10);
  }
}

TEST(DirectionalDerivative, LinearInDirection) {
  const FreeMapDef f = rational_example_map();
  const Rep x = random_rep(f.source(), Dims{{"u", 3}}, 40);
  const auto h = random_direction(x, 41).h;
  const auto k = random_direction(x, 42).h;
  const Complex alpha(0.7, -1.3);
  std::vector<Matrix> mix;
  for (std::size_t i = 0; i < h.size(); ++i) mix.push_back(alpha * h[i] + k[i]);
  const auto dh = directional_derivative(f, x, h).h;
  const auto dk = directional_derivative(f, x, k).h;
  std::vector<Matrix> want;
  for (std::size_t i = 0; i < dh.size(); ++i) want.push_back(alpha * dh[i] + dk[i]);
  EXPECT_LE(stacked_difference(directional_derivative(f, x, mix).h, want), 1e-10);
}

TEST(DirectionalDerivative, OneSidedInverseAgreesWithFiniteDifferences) {
  const Quiver q = sch_quiver();
  const FreeMapDef f(q, Quiver({"u", "v"}, {{"g", "u", "v"}, {"k", "v", "u"}}),
                     std::vector<Expr>{inv(a("x12"), InvMode::Left), inv(a("x21"), InvMode::Right)});
  const Rep x = sch_point(43, 5, 2);
  const auto h = random_direction(x, 44).h;
  const auto d = directional_derivative(f, x, h).h;
  const double e1 = stacked_difference(finite_difference(f, x, h, 1e-5).h, d);
  const double e2 = stacked_difference(finite_difference(f, x, h, 1e-6).h, d);
  EXPECT_LE(e2, 1e-4);
  EXPECT_GE(std::log10(e1 / e2), 0.9);
}

TEST(FiniteDifference, ConvergenceOrderForPolynomials) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const FreeMapDef f = random_polynomial_map(sch_quiver(), 3, 50 + s);
    const Rep x = sch_point(60 + s);
    const auto h = random_direction(x, 70 + s).h;
    const auto d = directional_derivative(f, x, h).h;
    const double e4 = stacked_difference(finite_difference(f, x, h, 1e-4).h, d);
    const double e6 = stacked_difference(finite_difference(f, x, h, 1e-6).h, d);
    EXPECT_GE(std::log10(e4 / e6) / 2.0, 0.9);
  }
}

TEST(FiniteDifference, SchurAgreement) {
  const Rep x = sch_point(80, 4, 3);
  const auto h = random_direction(x, 81).h;
  EXPECT_LE(stacked_difference(finite_difference(schur_map(), x, h, 1e-6).h,
                               directional_derivative(schur_map(), x, h).h),
            1e-5);
}

TEST(DerivativeMatrix, IdentityMap) {
  const Rep x = sch_point(82);
  const DerivativeMatrix dm = derivative_matrix(identity_map(sch_quiver()), x);
  EXPECT_EQ(dm.m, Matrix::Identity(25, 25));
  const IftCertificate c = ift_certificate(identity_map(sch_quiver()), x);
  EXPECT_TRUE(c.full_rank);
  EXPECT_NEAR(c.sigma_min, 1.0, 1e-14);
  EXPECT_NEAR(c.sigma_max, 1.0, 1e-14);
  EXPECT_FALSE(c.collision.has_value());
}

// Independent Kronecker-sum assembly of H -> X H + H X in column-major vec form.
TEST(DerivativeMatrix, SquareIsKroneckerSum) {
  const Quiver q = classical_embed(1);
  const FreeMapDef f(q, q, std::vector<Expr>{a("x") * a("x")});
  const Rep x = random_rep(q, Dims{{"u", 3}}, 83);
  const Matrix X = x.mat(0);
  const Matrix I = Matrix::Identity(3, 3);
  Matrix want(9, 9);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) {
      want.block(3 * i, 3 * j, 3, 3) = I(i, j) * X + X.transpose()(i, j) * I;
    }
  EXPECT_LE(relative_difference(derivative_matrix(f, x).m, want), 1e-13);
}

TEST(DerivativeMatrix, ActionMatchesDirectionalDerivative) {
  const FreeMapDef f = ppt_map(Pivot::D);
  const Rep x = sch_point(84);
  const DerivativeMatrix dm = derivative_matrix(f, x);
  EXPECT_EQ(dm.cols.size(), 25u);
  EXPECT_EQ(dm.rows.size(), 25u);
  const auto h = random_direction(x, 85).h;
  const Vector via_matrix = dm.m * stack(h);
  EXPECT_LE(relative_difference(via_matrix, stack(directional_derivative(f, x, h).h)), 1e-9);
}

TEST(IftCertificate, SchurWithZeroCornerCollides) {
  const Quiver q = sch_quiver();
  const Rep x0 = sch_point(86, 3, 2);
  std::vector<Matrix> mats = x0.mats();
  mats[q.arc_index("x21")] = Matrix::Zero(2, 3);
  const Rep x = x0.with_mats(mats);
  const IftCertificate c = ift_certificate(schur_map(), x);
  EXPECT_FALSE(c.full_rank);
  EXPECT_GT(c.kernel_dim, 0);
  ASSERT_TRUE(c.collision.has_value());
  EXPECT_TRUE(c.collision->verified);
  EXPECT_LE(c.collision->image_residual, 1e-8);
  EXPECT_GE(c.collision->separation, 0.5);
  EXPECT_EQ(c.profile.size(), 25);
}

TEST(IftCertificate, SchurWithZeroCornerHasExplicitKernel) {
  const Quiver q = sch_quiver();
  const Rep x0 = sch_point(87, 3, 2);
  std::vector<Matrix> mats = x0.mats();
  mats[q.arc_index("x21")] = Matrix::Zero(2, 3);
  const Rep x = x0.with_mats(mats);
  std::vector<Matrix> h = zero_direction(x).h;
  Rng rng(88);
  h[q.arc_index("x12")] = rng.ginibre(3, 2);
  h[q.arc_index("x2")] = rng.ginibre(2, 2);
  EXPECT_LE(op_norm(directional_derivative(schur_map(), x, h).h[0]), 1e-12);
}

TEST(IftCertificate, PptIsFullRank) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const IftCertificate c = ift_certificate(ppt_map(Pivot::D), sch_point(90 + s));
    EXPECT_TRUE(c.full_rank);
    EXPECT_GE(c.sigma_min / c.sigma_max, 1e-6);
  }
}

TEST(IftCertificate, NonInjectivePolynomial) {
  const Quiver q = classical_embed(1);
  const FreeMapDef f(q, q, std::vector<Expr>{a("x") * a("x")});
  // X = diag(1, -1): H = E_12 gives X H + H X = 0.
  Matrix X = Matrix::Zero(2, 2);
  X(0, 0) = 1.0;
  X(1, 1) = -1.0;
  const IftCertificate c = ift_certificate(f, Rep(q, std::vector<Index>{2}, {X}));
  ASSERT_TRUE(c.collision.has_value());
  EXPECT_EQ(c.kernel_dim, 2);
  EXPECT_TRUE(c.collision->verified);
}

TEST(ChainRule, IdentityAndRandom) {
  const Quiver q = classical_embed(2);
  const FreeMapDef f = random_polynomial_map(q, 2, 100);
  const Rep x = random_rep(q, Dims{{"u", 4}}, 101);
  const auto h = random_direction(x, 102).h;
  EXPECT_LE(chain_rule_check(f, identity_map(q), x, h), 1e-14);
  EXPECT_LE(chain_rule_check(f, random_polynomial_map(q, 2, 103), x, h), 1e-9);
}

TEST(ChainRule, SchurAfterPpt) {
  const Rep x = sch_point(104, 4, 3);
  EXPECT_LE(chain_rule_check(schur_map(), ppt_map(Pivot::D), x, random_direction(x, 105).h), 1e-7);
}

TEST(Leibniz, ZeroDirectionsAndConstants) {
  const Quiver q = classical_embed(1);
  const ProductSpec spec{q, q, q, {{"x", "x"}}, true};
  const FreeMapDef f = random_polynomial_map(q, 2, 106);
  const FreeMapDef c(q, q, std::vector<Expr>{3.0 * Expr::id("u")});
  const Rep x = random_rep(q, Dims{{"u", 3}}, 107);
  const Rep y = random_rep(q, Dims{{"u", 3}}, 108);
  const auto h = random_direction(x, 109).h;
  const auto k = random_direction(y, 110).h;
  EXPECT_LE(leibniz_check(spec, f, f, x, y, zero_direction(x).h, zero_direction(y).h), 1e-14);
  EXPECT_LE(leibniz_check(spec, f, c, x, y, h, k), 1e-12);
  EXPECT_LE(leibniz_check(spec, c, f, x, y, h, k), 1e-12);
}

TEST(Leibniz, SchSelfProduct) {
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
  const ProductSpec spec{q, q, q, pairs, true};
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Rep x = sch_point(120 + s);
    const Rep y = sch_point(130 + s);
    EXPECT_LE(leibniz_check(spec, random_polynomial_map(q, 2, 140 + s), random_polynomial_map(q, 2, 150 + s), x, y,
                            random_direction(x, 160 + s).h, random_direction(y, 170 + s).h),
              1e-8);
  }
  ProductSpec right = spec;
  right.left_multiplication = false;
  EXPECT_THROW(leibniz_check(right, identity_map(q), identity_map(q), sch_point(1), sch_point(2),
                             zero_direction(sch_point(1)).h, zero_direction(sch_point(2)).h),
               Error);
}

TEST(Nilpotent, WorkedPolynomial) {
  const std::vector<Complex> p{1.0, 4.0, 0.0, 3.0};
  const NilpotentResult r3 = nilpotent_coefficients(p, 3);
  Matrix want(3, 3);
  want << 1, 4, 0, 0, 1, 4, 0, 0, 1;
  EXPECT_EQ(r3.value, want);
  EXPECT_EQ(r3.top_row, (std::vector<Complex>{1.0, 4.0, 0.0}));
  EXPECT_EQ(nilpotent_coefficients(p, 4).top_row, (std::vector<Complex>{1.0, 4.0, 0.0, 3.0}));
  EXPECT_EQ(nilpotent_coefficients({0.0}, 3).top_row, (std::vector<Complex>{0.0, 0.0, 0.0}));
}

TEST(Nilpotent, RecoversRandomIntegerCoefficients) {
  Rng rng(180);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Complex> p;
    for (int i = 0; i < 6; ++i) p.push_back(static_cast<double>(rng.next_u64() % 21) - 10.0);
    const auto top = nilpotent_coefficients(p, 6).top_row;
    for (int i = 0; i < 6; ++i) EXPECT_EQ(top[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
  }
}

TEST(GammaCommutation, ArbitraryGamma) {
  const Quiver q = sch_quiver();
  Rng rng(190);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const FreeMapDef f = random_polynomial_map(q, 3, 200 + s);
    const Rep x = sch_point(210 + s);
    const Rep y = sch_point(220 + s, 2, 3);
    const std::vector<Matrix> g{rng.ginibre(3, 2), rng.ginibre(2, 3)};
    EXPECT_LE(gamma_commutation_check(f, x, y, g), 1e-8);
  }
}

TEST(GammaCommutation, ZeroGammaIsDirectSum) {
  const Rep x = sch_point(230);
  const Rep y = sch_point(231, 2, 3);
  const std::vector<Matrix> g{Matrix::Zero(3, 2), Matrix::Zero(2, 3)};
  EXPECT_EQ(rep_difference(gamma_block_rep(x, y, g), direct_sum(x, y)), 0.0);
  EXPECT_LE(gamma_commutation_check(schur_map(), x, y, g), 1e-12);
}

TEST(GammaCommutation, IntertwinerGivesZeroCorner) {
  const Quiver q = sch_quiver();
  const Rep y = sch_point(232, 2, 1);
  const Rep x = conjugate(direct_sum(y, sch_point(233, 1, 1)),
                          random_nat_auto(q, std::vector<Index>{3, 2}, 234));
  const auto basis = intertwiner_space(x, y);
  ASSERT_FALSE(basis.empty());
  const Rep b = gamma_block_rep(x, y, basis[0].gammas);
  const FreeMapDef f = random_polynomial_map(q, 3, 235);
  const Rep fb = eval_map(f, b);
  for (std::size_t i = 0; i < q.arc_count(); ++i) {
    const Index r = x.dim(q.vertex_index(q.arcs()[i].dst));
    const Index c = y.dim(q.vertex_index(q.arcs()[i].src));
    EXPECT_LE(op_norm(b.mat(i).topRightCorner(r, c)), 1e-9);
    EXPECT_LE(op_norm(fb.mat(i).topRightCorner(r, c)), 1e-8);
  }
}
