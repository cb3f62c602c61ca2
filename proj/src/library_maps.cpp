#include "freequiver/library_maps.hpp"

#include <cmath>

#include "freequiver/errors.hpp"
#include "freequiver/harness.hpp"

namespace freequiver {

namespace {

Expr at(const char* name) { return Expr::atom(name); }

}  // namespace

Quiver sch_quiver() {
  return Quiver({"u", "v"},
                {{"x1", "u", "u"}, {"x2", "v", "v"}, {"x12", "v", "u"}, {"x21", "u", "v"}});
}

Quiver one_loop_quiver() { return Quiver({"u", "v"}, {{"x1", "u", "u"}}); }

Quiver smw_quiver() {
  return Quiver({"u", "v"}, {{"a", "u", "u"}, {"U", "v", "u"}, {"c", "v", "v"}, {"V", "u", "v"}});
}

FreeMapDef schur_map() {
  const Expr e = at("x1") - at("x12") * inv(at("x2")) * at("x21");
  return FreeMapDef(sch_quiver(), one_loop_quiver(), std::vector<Expr>{e});
}

FreeMapDef ppt_map(Pivot pivot) {
  std::map<std::string, Expr> entries;
  if (pivot == Pivot::D) {
    const Expr d = inv(at("x2"));
    entries.emplace("x1", at("x1") - at("x12") * d * at("x21"));
    entries.emplace("x12", at("x12") * d);
    entries.emplace("x21", -(d * at("x21")));
    entries.emplace("x2", d);
  } else {
    const Expr a = inv(at("x1"));
    entries.emplace("x1", a);
    entries.emplace("x12", -(a * at("x12")));
    entries.emplace("x21", at("x21") * a);
    entries.emplace("x2", at("x2") - at("x21") * a * at("x12"));
  }
  return FreeMapDef(sch_quiver(), sch_quiver(), entries);
}

FreeMapDef block_inverse_map() {
  const Expr a = inv(at("x1"));
  const Expr s = inv(at("x2") - at("x21") * a * at("x12"));
  std::map<std::string, Expr> entries;
  entries.emplace("x1", a + a * at("x12") * s * at("x21") * a);
  entries.emplace("x12", -(a * at("x12") * s));
  entries.emplace("x21", -(s * at("x21") * a));
  entries.emplace("x2", s);
  return FreeMapDef(sch_quiver(), sch_quiver(), entries);
}

FreeMapDef smw_lhs() {
  const Expr e = inv(at("a") + at("U") * at("c") * at("V"));
  return FreeMapDef(smw_quiver(), one_loop_quiver(), std::map<std::string, Expr>{{"x1", e}});
}

FreeMapDef smw_rhs() {
  const Expr a = inv(at("a"));
  const Expr core = inv(inv(at("c")) + at("V") * a * at("U"));
  const Expr e = a - a * at("U") * core * at("V") * a;
  return FreeMapDef(smw_quiver(), one_loop_quiver(), std::map<std::string, Expr>{{"x1", e}});
}

namespace {

Matrix checked_inverse(const Matrix& m, const std::string& what) {
  if (!is_invertible(m)) throw RegularityError(what + " is not invertible", what);
  return m.partialPivLu().inverse();
}

}  // namespace

double block_inverse_check(const Rep& x) {
  if (!(x.quiver() == sch_quiver())) throw QuiverError("block_inverse_check needs a Sch representation");
  const Matrix whole = block2x2(x.mat("x1"), x.mat("x12"), x.mat("x21"), x.mat("x2"));
  const Matrix direct = checked_inverse(whole, "[[A, B], [C, D]]");
  const Rep formula = eval_map(block_inverse_map(), x);
  const Index n = x.dim("u");
  const Index m = x.dim("v");
  double worst = relative_difference(direct.topLeftCorner(n, n), formula.mat("x1"));
  worst = std::max(worst, relative_difference(direct.topRightCorner(n, m), formula.mat("x12")));
  worst = std::max(worst, relative_difference(direct.bottomLeftCorner(m, n), formula.mat("x21")));
  worst = std::max(worst, relative_difference(direct.bottomRightCorner(m, m), formula.mat("x2")));
  return worst;
}

double smw_check(const Rep& x) {
  if (!(x.quiver() == smw_quiver())) throw QuiverError("smw_check needs an smw representation");
  const Matrix updated = x.mat("a") + x.mat("U") * x.mat("c") * x.mat("V");
  const Matrix direct = checked_inverse(updated, "a + U c V");
  const Rep formula = eval_map(smw_rhs(), x);
  return relative_difference(direct, formula.mat("x1"));
}

Expr exp_truncated(const Expr& e, const Quiver& q, int order) {
  const Endpoints ep = typecheck(e, q);
  if (ep.src != ep.dst) {
    throw TypeError("exp of a non-loop expression " + e.render() + " (" + ep.src + "->" + ep.dst + ")",
                    "root");
  }
  if (order < 0) throw Error("exp_truncated: order must be >= 0");
  std::vector<Expr> terms{Expr::id(ep.src)};
  double factorial = 1.0;
  for (int i = 1; i <= order; ++i) {
    factorial *= i;
    const Expr p = power(e, i);
    terms.push_back(i == 1 ? p : Expr::scale(1.0 / factorial, p));
  }
  return terms.size() == 1 ? terms.front() : Expr::add(std::move(terms));
}

Matrix exp_series(const Matrix& m, int order) {
  if (m.rows() != m.cols()) throw ShapeError("exp_series needs a square matrix");
  if (op_norm(m) > 1.0) throw Error("exp_series: norm exceeds 1");
  Matrix sum = Matrix::Identity(m.rows(), m.cols());
  Matrix term = sum;
  for (int i = 1; i <= order; ++i) {
    term = term * m / static_cast<double>(i);
    sum += term;
  }
  return sum;
}

namespace {

Expr bracket(const Expr& a, const Expr& b) { return a * b - b * a; }

}  // namespace

FreeMapDef cbh_truncated(int order) {
  if (order < 1 || order > 3) throw Error("cbh_truncated supports orders 1 to 3");
  const Expr x = at("x");
  const Expr y = at("y");
  Expr z = x + y;
  if (order >= 2) z = z + Expr::scale(0.5, bracket(x, y));
  if (order >= 3) {
    z = z + Expr::scale(1.0 / 12.0, bracket(x, bracket(x, y)));
    z = z - Expr::scale(1.0 / 12.0, bracket(y, bracket(x, y)));
  }
  return FreeMapDef(classical_embed(2), Quiver({"u"}, {{"z", "u", "u"}}), std::vector<Expr>{z});
}

namespace {

Quiver three_loop_target() {
  return Quiver({"u"}, {{"f1", "u", "u"}, {"f2", "u", "u"}, {"f3", "u", "u"}});
}

}  // namespace

FreeMapDef rational_example_map() {
  const Expr x = at("x");
  const Expr y = at("y");
  return FreeMapDef(classical_embed(2), three_loop_target(),
                    std::vector<Expr>{inv(x) * y * y, Expr::scale(3.0, y * x - x * y),
                                      x * inv(y - x) * y});
}

FreeMapDef derivative_example_map() {
  const Expr x = at("x");
  const Expr y = at("y");
  return FreeMapDef(classical_embed(2), three_loop_target(),
                    std::vector<Expr>{inv(x) * y * y, Expr::scale(3.0, y * x - x * y),
                                      y * inv(y - x)});
}

}  // namespace freequiver

namespace freequiver {

double cbh_error(const Matrix& x, const Matrix& y, int order) {
  const Quiver two = classical_embed(2);
  const Rep z = eval_map(cbh_truncated(order), Rep(two, {x.rows()}, {x, y}));
  return op_norm(exp_series(z.mat(0)) - exp_series(x) * exp_series(y));
}

CbhSweep cbh_sweep(const Matrix& x, const Matrix& y, const std::vector<double>& radii, int order) {
  CbhSweep out;
  const Matrix xu = x / op_norm(x);
  const Matrix yu = y / op_norm(y);
  for (double r : radii) {
    out.radii.push_back(r);
    out.errors.push_back(cbh_error(r * xu, r * yu, order));
  }
  for (std::size_t i = 0; i + 1 < out.errors.size(); ++i) {
    out.orders.push_back(std::log(out.errors[i] / out.errors[i + 1]) /
                         std::log(out.radii[i] / out.radii[i + 1]));
  }
  return out;
}

namespace {

struct SchBlocks {
  Matrix a, b, c, d, dinv;
  Matrix ha, hb, hc, hd;
};

SchBlocks sch_blocks(const Rep& x, const std::vector<Matrix>& h) {
  const Quiver& q = x.quiver();
  if (!(q == sch_quiver())) throw QuiverError("closed forms need a Sch representation");
  if (!is_invertible(x.mat("x2"))) throw RegularityError("D is not invertible", "x2^-1");
  const auto hh = [&](const char* arc) { return h.at(q.arc_index(arc)); };
  return {x.mat("x1"), x.mat("x12"), x.mat("x21"), x.mat("x2"), x.mat("x2").partialPivLu().inverse(),
          hh("x1"),    hh("x12"),    hh("x21"),    hh("x2")};
}

}  // namespace

Matrix dsch_closed_form(const Rep& x, const std::vector<Matrix>& h) {
  const SchBlocks s = sch_blocks(x, h);
  return s.ha - s.hb * s.dinv * s.c + s.b * s.dinv * s.hd * s.dinv * s.c - s.b * s.dinv * s.hc;
}

std::vector<Matrix> dppt_closed_form(const Rep& x, const std::vector<Matrix>& h) {
  const SchBlocks s = sch_blocks(x, h);
  const Matrix dhd = s.dinv * s.hd * s.dinv;
  return {dsch_closed_form(x, h), -dhd, s.hb * s.dinv - s.b * dhd, dhd * s.c - s.dinv * s.hc};
}

}  // namespace freequiver
