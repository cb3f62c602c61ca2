#include "freequiver/representation.hpp"

#include <algorithm>

#include "freequiver/errors.hpp"
#include "freequiver/rng.hpp"

namespace freequiver {

namespace {

std::string shape_str(Index r, Index c) { return std::to_string(r) + "x" + std::to_string(c); }

void require_same_shape(const Rep& a, const Rep& b, const char* what) {
  if (!(a.quiver() == b.quiver())) throw ShapeError(std::string(what) + ": quiver mismatch");
  if (a.dims() != b.dims()) throw ShapeError(std::string(what) + ": dimension mismatch");
}

}  // namespace

Rep::Rep(Quiver q, std::vector<Index> dims, std::vector<Matrix> mats)
    : quiver_(std::move(q)), dims_(std::move(dims)), mats_(std::move(mats)) {
  if (dims_.size() != quiver_.vertex_count()) {
    throw ShapeError("Rep: expected " + std::to_string(quiver_.vertex_count()) + " dimensions");
  }
  if (mats_.size() != quiver_.arc_count()) {
    throw ShapeError("Rep: expected " + std::to_string(quiver_.arc_count()) + " arc matrices");
  }
  for (Index d : dims_) {
    if (d < 0) throw ShapeError("Rep: negative dimension");
  }
  for (std::size_t i = 0; i < mats_.size(); ++i) {
    const Arc& a = quiver_.arcs()[i];
    const Index rows = dims_[quiver_.vertex_index(a.dst)];
    const Index cols = dims_[quiver_.vertex_index(a.src)];
    if (mats_[i].rows() != rows || mats_[i].cols() != cols) {
      throw ShapeError("Rep: arc '" + a.name + "' needs a " + shape_str(rows, cols) +
                       " matrix, got " + shape_str(mats_[i].rows(), mats_[i].cols()));
    }
  }
}

std::vector<Index> dims_vector(const Quiver& q, const Dims& dims) {
  std::vector<Index> out;
  out.reserve(q.vertex_count());
  for (const auto& v : q.vertices()) {
    auto it = dims.find(v);
    if (it == dims.end()) throw ShapeError("no dimension given for vertex '" + v + "'");
    out.push_back(it->second);
  }
  return out;
}

namespace {

std::vector<Matrix> mats_vector(const Quiver& q, const std::map<std::string, Matrix>& mats) {
  std::vector<Matrix> out;
  out.reserve(q.arc_count());
  for (const auto& a : q.arcs()) {
    auto it = mats.find(a.name);
    if (it == mats.end()) throw ShapeError("no matrix given for arc '" + a.name + "'");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

Rep::Rep(Quiver q, const Dims& dims, const std::map<std::string, Matrix>& mats)
    : Rep(q, dims_vector(q, dims), mats_vector(q, mats)) {}

Dims Rep::dims_by_name() const {
  Dims out;
  for (std::size_t i = 0; i < dims_.size(); ++i) out[quiver_.vertices()[i]] = dims_[i];
  return out;
}

Matrix eval_path(const Rep& x, const Path& p) {
  const Index n = x.dim(p.src());
  Matrix acc = Matrix::Identity(n, n);
  for (const auto& arc : p.arcs()) {
    const std::size_t i = x.quiver().arc_index(arc);
    acc = x.mat(i) * acc;
  }
  if (!p.is_identity() && x.quiver().arc(p.arcs().back()).dst != p.dst()) {
    throw QuiverError("eval_path: path does not belong to this quiver");
  }
  return acc;
}

Rep direct_sum(const Rep& x, const Rep& y) {
  if (!(x.quiver() == y.quiver())) throw ShapeError("direct_sum: quiver mismatch");
  std::vector<Index> dims(x.dims().size());
  for (std::size_t v = 0; v < dims.size(); ++v) dims[v] = x.dim(v) + y.dim(v);
  std::vector<Matrix> mats;
  mats.reserve(x.mats().size());
  for (std::size_t a = 0; a < x.mats().size(); ++a) mats.push_back(block_diag(x.mat(a), y.mat(a)));
  return Rep(x.quiver(), std::move(dims), std::move(mats));
}

NatAuto::NatAuto(std::vector<Matrix> s) : s_(std::move(s)) {
  s_inv_.reserve(s_.size());
  for (std::size_t v = 0; v < s_.size(); ++v) {
    const Matrix& m = s_[v];
    if (m.rows() != m.cols()) throw ShapeError("NatAuto: component " + std::to_string(v) + " is not square");
    if (!is_invertible(m)) {
      throw RegularityError("NatAuto: component " + std::to_string(v) + " is singular",
                            "S[" + std::to_string(v) + "]");
    }
    s_inv_.push_back(m.size() == 0 ? Matrix(0, 0) : Matrix(m.partialPivLu().inverse()));
  }
}

NatAuto random_nat_auto(const Quiver& q, const std::vector<Index>& dims, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Matrix> s;
  for (std::size_t v = 0; v < q.vertex_count(); ++v) {
    Matrix m = rng.ginibre(dims[v], dims[v]);
    while (!is_invertible(m)) m = rng.ginibre(dims[v], dims[v]);
    s.push_back(std::move(m));
  }
  return NatAuto(std::move(s));
}

Rep conjugate(const Rep& x, const NatAuto& s) {
  const Quiver& q = x.quiver();
  if (s.s().size() != q.vertex_count()) throw ShapeError("conjugate: wrong number of components");
  for (std::size_t v = 0; v < q.vertex_count(); ++v) {
    if (s.s()[v].rows() != x.dim(v)) throw ShapeError("conjugate: component size mismatch");
  }
  std::vector<Matrix> mats;
  mats.reserve(q.arc_count());
  for (std::size_t a = 0; a < q.arc_count(); ++a) {
    const Arc& arc = q.arcs()[a];
    mats.push_back(s.s_inverse()[q.vertex_index(arc.dst)] * x.mat(a) * s.s()[q.vertex_index(arc.src)]);
  }
  return x.with_mats(std::move(mats));
}

ResidualReport intertwining_residual(const Rep& to, const Rep& from,
                                     const std::vector<Matrix>& gammas, double tol) {
  const Quiver& q = to.quiver();
  if (!(q == from.quiver())) throw ShapeError("intertwining_residual: quiver mismatch");
  if (gammas.size() != q.vertex_count()) throw ShapeError("intertwining_residual: wrong number of gammas");
  for (std::size_t v = 0; v < q.vertex_count(); ++v) {
    if (gammas[v].rows() != to.dim(v) || gammas[v].cols() != from.dim(v)) {
      throw ShapeError("intertwining_residual: gamma at '" + q.vertices()[v] + "' must be " +
                       shape_str(to.dim(v), from.dim(v)));
    }
  }
  ResidualReport report;
  for (std::size_t a = 0; a < q.arc_count(); ++a) {
    const Arc& arc = q.arcs()[a];
    const Matrix& gs = gammas[q.vertex_index(arc.src)];
    const Matrix& gt = gammas[q.vertex_index(arc.dst)];
    const Matrix lhs = to.mat(a) * gs;
    const Matrix rhs = gt * from.mat(a);
    if (lhs.size() == 0) continue;
    const double scale =
        1.0 + std::max(op_norm(to.mat(a)) * op_norm(gs), op_norm(gt) * op_norm(from.mat(a)));
    const double r = op_norm(lhs - rhs) / scale;
    if (report.worst.empty() || r > report.residual) {
      report.residual = r;
      report.worst = arc.name;
    }
  }
  report.pass = report.residual <= tol;
  return report;
}

ResidualReport check_nat_trans(const NatTrans& g, double tol) {
  return intertwining_residual(g.to, g.from, g.gammas, tol);
}

std::vector<NatTrans> intertwiner_space(const Rep& x, const Rep& y, double tol) {
  const Quiver& q = x.quiver();
  if (!(q == y.quiver())) throw ShapeError("intertwiner_space: quiver mismatch");
  // Unknown: vec(G_v) for every vertex, stacked in vertex order (column-major vec).
  std::vector<Index> offset(q.vertex_count() + 1, 0);
  for (std::size_t v = 0; v < q.vertex_count(); ++v) offset[v + 1] = offset[v] + x.dim(v) * y.dim(v);
  const Index unknowns = offset.back();
  Index rows = 0;
  for (const Arc& arc : q.arcs()) rows += x.dim(arc.dst) * y.dim(arc.src);

  // vec(X G_s) = (I kron X) vec(G_s);  vec(G_t Y) = (Y^T kron I) vec(G_t).
  Matrix system = Matrix::Zero(rows, unknowns);
  Index row0 = 0;
  for (std::size_t a = 0; a < q.arc_count(); ++a) {
    const Arc& arc = q.arcs()[a];
    const std::size_t s = q.vertex_index(arc.src);
    const std::size_t t = q.vertex_index(arc.dst);
    const Matrix& xa = x.mat(a);  // x.dim(t) x x.dim(s)
    const Matrix& ya = y.mat(a);  // y.dim(t) x y.dim(s)
    const Index m = x.dim(t);     // rows of the residual block
    // X(a) G_s: G_s is x.dim(s) x y.dim(s).
    for (Index j = 0; j < y.dim(s); ++j) {
      for (Index i = 0; i < m; ++i) {
        for (Index k = 0; k < x.dim(s); ++k) {
          system(row0 + j * m + i, offset[s] + j * x.dim(s) + k) += xa(i, k);
        }
      }
    }
    // - G_t Y(a): G_t is x.dim(t) x y.dim(t).
    for (Index j = 0; j < y.dim(s); ++j) {
      for (Index i = 0; i < m; ++i) {
        for (Index k = 0; k < y.dim(t); ++k) {
          system(row0 + j * m + i, offset[t] + k * m + i) -= ya(k, j);
        }
      }
    }
    row0 += m * y.dim(s);
  }

  const double rel = tol > 0.0 ? tol : default_rank_tolerance(rows, unknowns);
  Matrix basis;
  if (unknowns == 0) {
    basis = Matrix(0, 0);
  } else if (rows == 0 || system.cwiseAbs().maxCoeff() == 0.0) {
    basis = Matrix::Identity(unknowns, unknowns);
  } else {
    basis = nullspace(system, rel);
  }

  std::vector<NatTrans> out;
  for (Index c = 0; c < basis.cols(); ++c) {
    std::vector<Matrix> gammas;
    for (std::size_t v = 0; v < q.vertex_count(); ++v) {
      gammas.push_back(
          Eigen::Map<const Matrix>(basis.col(c).data() + offset[v], x.dim(v), y.dim(v)));
    }
    out.push_back(NatTrans{y, x, std::move(gammas)});
  }
  return out;
}

Rep random_rep(const Quiver& q, const std::vector<Index>& dims, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Matrix> mats;
  mats.reserve(q.arc_count());
  for (const Arc& a : q.arcs()) {
    mats.push_back(rng.ginibre(dims[q.vertex_index(a.dst)], dims[q.vertex_index(a.src)]));
  }
  return Rep(q, dims, std::move(mats));
}

Rep random_rep(const Quiver& q, const Dims& dims, std::uint64_t seed) {
  return random_rep(q, dims_vector(q, dims), seed);
}

ResidualReport check_relations(const Rep& x, const RelationPresentation& pres, double tol) {
  if (!(x.quiver() == pres.quiver())) throw ShapeError("check_relations: quiver mismatch");
  ResidualReport report;
  for (const auto& rel : pres.relations()) {
    const double r = relative_difference(eval_path(x, rel.lhs), eval_path(x, rel.rhs));
    if (report.worst.empty() || r > report.residual) {
      report.residual = r;
      report.worst = rel.lhs.render() + " = " + rel.rhs.render();
    }
  }
  report.pass = report.residual <= tol;
  return report;
}

double rep_difference(const Rep& a, const Rep& b) {
  require_same_shape(a, b, "rep_difference");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.mats().size(); ++i) {
    worst = std::max(worst, relative_difference(a.mat(i), b.mat(i)));
  }
  return worst;
}

}  // namespace freequiver
