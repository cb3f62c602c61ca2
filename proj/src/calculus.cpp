#include "freequiver/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "freequiver/errors.hpp"
#include "freequiver/rng.hpp"

namespace freequiver {

DirectionField make_direction(const Rep& base, std::vector<Matrix> h) {
  if (h.size() != base.mats().size()) throw ShapeError("direction needs one matrix per arc");
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i].rows() != base.mat(i).rows() || h[i].cols() != base.mat(i).cols()) {
      throw ShapeError("direction for arc '" + base.quiver().arcs()[i].name + "' has the wrong shape");
    }
  }
  return {base, std::move(h)};
}

DirectionField zero_direction(const Rep& base) {
  std::vector<Matrix> h;
  for (const auto& m : base.mats()) h.push_back(Matrix::Zero(m.rows(), m.cols()));
  return {base, std::move(h)};
}

DirectionField random_direction(const Rep& base, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Matrix> h;
  for (const auto& m : base.mats()) h.push_back(rng.ginibre(m.rows(), m.cols()));
  return {base, std::move(h)};
}

Rep block_extend(const Rep& x, const std::vector<Matrix>& h) {
  make_direction(x, h);
  std::vector<Index> dims;
  for (Index d : x.dims()) dims.push_back(2 * d);
  std::vector<Matrix> mats;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Matrix& a = x.mat(i);
    mats.push_back(block2x2(a, h[i], Matrix::Zero(a.rows(), a.cols()), a));
  }
  return Rep(x.quiver(), std::move(dims), std::move(mats));
}

namespace {

double relative_norm_of(const Matrix& small, const Matrix& scale) {
  return op_norm(small) / (1.0 + op_norm(scale));
}

}  // namespace

DirectionField directional_derivative(const FreeMapDef& f, const Rep& x,
                                      const std::vector<Matrix>& h, double tol) {
  const Rep fx = eval_map(f, x);
  EvalOptions opts;
  opts.doubled = true;
  std::string drift;
  opts.on_inverse = [&](const InverseEvent& ev) {
    if (!ev.result || ev.mode != InvMode::TwoSided || !drift.empty()) return;
    const Matrix& r = *ev.result;
    const Index m = r.rows() / 2;
    const Index n = r.cols() / 2;
    const double lower = relative_norm_of(r.bottomLeftCorner(m, n), r);
    const double diag = relative_difference(r.topLeftCorner(m, n), r.bottomRightCorner(m, n));
    if (lower > tol || diag > tol) drift = ev.node + " in entry " + ev.target_arc;
  };
  const Rep big = eval_map(f, block_extend(x, h), opts);
  if (!drift.empty()) throw Error("directional_derivative: doubled inverse lost its block form at " + drift);
  std::vector<Matrix> d;
  for (std::size_t i = 0; i < fx.mats().size(); ++i) {
    const Matrix& b = big.mat(i);
    const Matrix& v = fx.mat(i);
    const Index m = v.rows();
    const Index n = v.cols();
    const double r1 = relative_difference(b.topLeftCorner(m, n), v);
    const double r2 = relative_difference(b.bottomRightCorner(m, n), v);
    const double r3 = relative_norm_of(b.bottomLeftCorner(m, n), v);
    if (std::max({r1, r2, r3}) > tol) {
      throw Error("directional_derivative: diagonal blocks of entry " + f.target().arcs()[i].name +
                  " differ from f(X) (residual " + std::to_string(std::max({r1, r2, r3})) + ")");
    }
    d.push_back(b.topRightCorner(m, n));
  }
  return {fx, std::move(d)};
}

DirectionField finite_difference(const FreeMapDef& f, const Rep& x, const std::vector<Matrix>& h,
                                 double eps) {
  make_direction(x, h);
  const Rep fx = eval_map(f, x);
  std::vector<Matrix> moved;
  for (std::size_t i = 0; i < h.size(); ++i) moved.push_back(x.mat(i) + eps * h[i]);
  const Rep fy = eval_map(f, x.with_mats(std::move(moved)));
  std::vector<Matrix> d;
  for (std::size_t i = 0; i < fx.mats().size(); ++i) d.push_back((fy.mat(i) - fx.mat(i)) / eps);
  return {fx, std::move(d)};
}

std::vector<DirectionCoord> direction_coords(const Rep& x) {
  std::vector<DirectionCoord> out;
  for (std::size_t a = 0; a < x.mats().size(); ++a) {
    const Matrix& m = x.mat(a);
    for (Index c = 0; c < m.cols(); ++c) {
      for (Index r = 0; r < m.rows(); ++r) out.push_back({a, r, c});
    }
  }
  return out;
}

Vector stack(const std::vector<Matrix>& mats) {
  Index n = 0;
  for (const auto& m : mats) n += m.size();
  Vector v(n);
  Index at = 0;
  for (const auto& m : mats) {
    v.segment(at, m.size()) = m.reshaped();
    at += m.size();
  }
  return v;
}

std::vector<Matrix> unstack(const Vector& v, const Rep& shape) {
  std::vector<Matrix> out;
  Index at = 0;
  for (const auto& m : shape.mats()) {
    if (at + m.size() > v.size()) throw ShapeError("unstack: vector too short");
    out.push_back(v.segment(at, m.size()).reshaped(m.rows(), m.cols()));
    at += m.size();
  }
  if (at != v.size()) throw ShapeError("unstack: vector too long");
  return out;
}

DerivativeMatrix derivative_matrix(const FreeMapDef& f, const Rep& x) {
  DerivativeMatrix out{Matrix(), direction_coords(x), {}, eval_map(f, x)};
  out.rows = direction_coords(out.image);
  out.m = Matrix::Zero(static_cast<Index>(out.rows.size()), static_cast<Index>(out.cols.size()));
  std::vector<Matrix> h = zero_direction(x).h;
  for (std::size_t j = 0; j < out.cols.size(); ++j) {
    const auto& c = out.cols[j];
    h[c.arc](c.row, c.col) = 1.0;
    out.m.col(static_cast<Index>(j)) = stack(directional_derivative(f, x, h).h);
    h[c.arc](c.row, c.col) = 0.0;
  }
  return out;
}

IftCertificate ift_certificate(const FreeMapDef& f, const Rep& x, double tol) {
  const DerivativeMatrix dm = derivative_matrix(f, x);
  const Index ncols = dm.m.cols();
  IftCertificate cert;
  cert.threshold = tol;
  cert.profile = Eigen::VectorXd::Zero(ncols);
  if (ncols == 0) {
    cert.full_rank = true;
    return cert;
  }
  Eigen::BDCSVD<Matrix> svd(dm.m, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  cert.profile.head(s.size()) = s;
  cert.sigma_max = cert.profile(0);
  cert.sigma_min = cert.profile(ncols - 1);
  for (Index i = 0; i < ncols; ++i) {
    if (!(cert.profile(i) > tol * cert.sigma_max)) ++cert.kernel_dim;
  }
  cert.full_rank = cert.kernel_dim == 0;
  if (cert.full_rank) return cert;

  const Vector kernel = svd.matrixV().col(ncols - 1);
  DirectionField h = make_direction(x, unstack(kernel / kernel.norm(), x));
  Rep rep1 = block_extend(h);
  Collision col{std::move(h), std::move(rep1), direct_sum(x, x)};
  col.image_residual = rep_difference(eval_map(f, col.rep1), eval_map(f, col.rep2));
  double sq = 0.0;
  for (std::size_t i = 0; i < col.rep1.mats().size(); ++i) {
    sq += (col.rep1.mat(i) - col.rep2.mat(i)).squaredNorm();
  }
  col.separation = std::sqrt(sq);
  col.verified = col.image_residual <= tol && col.separation >= 0.5;
  cert.collision = std::move(col);
  return cert;
}

namespace {

double max_relative(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, relative_difference(a[i], b[i]));
  return worst;
}

}  // namespace

double chain_rule_check(const FreeMapDef& f, const FreeMapDef& g, const Rep& x,
                        const std::vector<Matrix>& h) {
  const FreeMapDef fg = compose_maps(f, g);
  const DirectionField lhs = directional_derivative(fg, x, h);
  const DirectionField inner = directional_derivative(g, x, h);
  const DirectionField rhs = directional_derivative(f, inner.base, inner.h);
  return max_relative(lhs.h, rhs.h);
}

double leibniz_check(const ProductSpec& spec, const FreeMapDef& f, const FreeMapDef& g,
                     const Rep& x, const Rep& y, const std::vector<Matrix>& h,
                     const std::vector<Matrix>& k) {
  if (!spec.left_multiplication) throw Error("leibniz_check needs a left-multiplication spec");
  const ProductMap pm = product_maps(spec, f, g);
  const Rep xy = join_reps(pm.source, x, y);
  std::vector<Matrix> hk = h;
  hk.insert(hk.end(), k.begin(), k.end());
  const DirectionField lhs = directional_derivative(pm.map, xy, hk);

  const DirectionField df = directional_derivative(f, x, h);
  const DirectionField dg = directional_derivative(g, y, k);
  const Rep t1 = rep_product(spec, df.base.with_mats(df.h), dg.base);
  const Rep t2 = rep_product(spec, df.base, dg.base.with_mats(dg.h));
  std::vector<Matrix> rhs;
  for (std::size_t i = 0; i < t1.mats().size(); ++i) rhs.push_back(t1.mat(i) + t2.mat(i));
  return max_relative(lhs.h, rhs);
}

Matrix nilpotent_matrix(Index n) {
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) m(i, i + 1) = 1.0;
  return m;
}

NilpotentResult nilpotent_coefficients(const std::vector<Complex>& coeffs, Index n) {
  if (n < 1) throw Error("nilpotent_coefficients: n must be >= 1");
  const Quiver q({"u"}, {{"x", "u", "u"}});
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] == Complex(0.0, 0.0)) continue;
    const Expr mono = i == 0 ? Expr::id("u") : power(Expr::atom("x"), static_cast<int>(i));
    terms.push_back(Expr::scale(coeffs[i], mono));
  }
  const Expr entry = terms.empty() ? Expr::zero("u", "u") : Expr::add(std::move(terms));
  const FreeMapDef p(q, q, std::vector<Expr>{entry});
  const Rep at = eval_map(p, Rep(q, {n}, {nilpotent_matrix(n)}));
  NilpotentResult out{at.mat(0), {}};
  for (Index j = 0; j < n; ++j) out.top_row.push_back(out.value(0, j));
  return out;
}

Rep gamma_block_rep(const Rep& x, const Rep& y, const std::vector<Matrix>& gammas) {
  if (!(x.quiver() == y.quiver())) throw QuiverError("gamma_block_rep: quiver mismatch");
  const Quiver& q = x.quiver();
  std::vector<Index> dims;
  for (std::size_t v = 0; v < q.vertex_count(); ++v) {
    if (gammas[v].rows() != x.dim(v) || gammas[v].cols() != y.dim(v)) {
      throw ShapeError("gamma_block_rep: gamma at '" + q.vertices()[v] + "' has the wrong shape");
    }
    dims.push_back(x.dim(v) + y.dim(v));
  }
  std::vector<Matrix> mats;
  for (std::size_t a = 0; a < q.arc_count(); ++a) {
    const Arc& arc = q.arcs()[a];
    const Matrix& gs = gammas[q.vertex_index(arc.src)];
    const Matrix& gt = gammas[q.vertex_index(arc.dst)];
    const Matrix corner = x.mat(a) * gs - gt * y.mat(a);
    mats.push_back(block2x2(x.mat(a), corner, Matrix::Zero(y.mat(a).rows(), x.mat(a).cols()), y.mat(a)));
  }
  return Rep(q, std::move(dims), std::move(mats));
}

double gamma_commutation_check(const FreeMapDef& f, const Rep& x, const Rep& y,
                               const std::vector<Matrix>& gammas) {
  const Rep lhs = eval_map(f, gamma_block_rep(x, y, gammas));
  const Rep fx = eval_map(f, x);
  const Rep fy = eval_map(f, y);
  std::vector<Matrix> target_gammas;
  for (std::size_t v : f.vertex_map()) target_gammas.push_back(gammas[v]);
  const Rep rhs = gamma_block_rep(fx, fy, target_gammas);
  return rep_difference(lhs, rhs);
}

}  // namespace freequiver
