#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "freequiver/linalg.hpp"
#include "freequiver/quiver.hpp"

namespace freequiver {

/// Vertex name -> dimension of the space assigned to it.
using Dims = std::map<std::string, Index>;

/// A functor X from the path category of a quiver into finite-dimensional
/// complex spaces: a dimension per vertex and a dims[dst] x dims[src] matrix
/// per arc. Immutable once built.
class Rep {
 public:
  /// `dims` and `mats` are indexed like q.vertices() and q.arcs().
  /// Throws ShapeError when a matrix has the wrong shape.
  Rep(Quiver q, std::vector<Index> dims, std::vector<Matrix> mats);
  /// Name-keyed convenience constructor; every vertex and arc must be covered.
  Rep(Quiver q, const Dims& dims, const std::map<std::string, Matrix>& mats);

  const Quiver& quiver() const { return quiver_; }
  const std::vector<Index>& dims() const { return dims_; }
  const std::vector<Matrix>& mats() const { return mats_; }
  Index dim(std::size_t vertex) const { return dims_[vertex]; }
  Index dim(const std::string& vertex) const { return dims_[quiver_.vertex_index(vertex)]; }
  const Matrix& mat(std::size_t arc) const { return mats_[arc]; }
  const Matrix& mat(const std::string& arc) const { return mats_[quiver_.arc_index(arc)]; }
  Dims dims_by_name() const;

  /// Same quiver, new arc matrices (shapes re-validated).
  Rep with_mats(std::vector<Matrix> mats) const { return Rep(quiver_, dims_, std::move(mats)); }

 private:
  Quiver quiver_;
  std::vector<Index> dims_;
  std::vector<Matrix> mats_;
};

/// Ordered product of arc matrices along p; identity path -> identity matrix.
Matrix eval_path(const Rep& x, const Path& p);

/// Per-vertex dims add, arcs become block-diagonal [[X(a), 0], [0, Y(a)]].
Rep direct_sum(const Rep& x, const Rep& y);

/// Per-vertex invertible matrices S_v; inverses are cached at construction.
class NatAuto {
 public:
  /// Throws RegularityError when some S_v is not invertible
  /// (sigma_min <= kInvertibilityThreshold * sigma_max) and ShapeError if not square.
  explicit NatAuto(std::vector<Matrix> s);

  const std::vector<Matrix>& s() const { return s_; }
  const std::vector<Matrix>& s_inverse() const { return s_inv_; }
  NatAuto inverse() const { return NatAuto(s_inv_, s_); }

 private:
  NatAuto(std::vector<Matrix> s, std::vector<Matrix> s_inv)
      : s_(std::move(s)), s_inv_(std::move(s_inv)) {}
  std::vector<Matrix> s_;
  std::vector<Matrix> s_inv_;
};

/// Random natural automorphism with Ginibre blocks (redrawn until invertible).
NatAuto random_nat_auto(const Quiver& q, const std::vector<Index>& dims, std::uint64_t seed);

/// arc a -> S_dst^-1 X(a) S_src.
Rep conjugate(const Rep& x, const NatAuto& s);

/// Gamma: from -> to, per-vertex to.dim(v) x from.dim(v) matrices. Whether it
/// actually intertwines is a property checked by check_nat_trans.
struct NatTrans {
  Rep from;
  Rep to;
  std::vector<Matrix> gammas;
};

struct ResidualReport {
  double residual = 0.0;
  bool pass = true;
  /// Arc or relation with the largest residual (empty when there is none).
  std::string worst;
};

/// max over arcs of ||X(a) G_s - G_t Y(a)||_2 / (1 + max(||X(a)|| ||G_s||, ||G_t|| ||Y(a)||)),
/// with X = to and Y = from. Generating arcs suffice because the category is free.
ResidualReport intertwining_residual(const Rep& to, const Rep& from,
                                     const std::vector<Matrix>& gammas, double tol);
ResidualReport check_nat_trans(const NatTrans& g, double tol = kDefaultTolerance);

/// Orthonormal basis (stacked column-major vec inner product) of all Gamma: y -> x
/// with X(a) G_s = G_t Y(a) for every arc, from the numerical nullspace of the
/// assembled Kronecker system. tol <= 0 selects default_rank_tolerance.
std::vector<NatTrans> intertwiner_space(const Rep& x, const Rep& y, double tol = 0.0);

/// Entries i.i.d. standard complex normal, filled arc by arc in quiver order.
Rep random_rep(const Quiver& q, const std::vector<Index>& dims, std::uint64_t seed);
Rep random_rep(const Quiver& q, const Dims& dims, std::uint64_t seed);

/// Dims map in quiver vertex order; throws ShapeError if a vertex is missing.
std::vector<Index> dims_vector(const Quiver& q, const Dims& dims);

/// max over relations of ||X(lhs) - X(rhs)||_2 / (1 + max norms).
ResidualReport check_relations(const Rep& x, const RelationPresentation& pres,
                               double tol = kDefaultTolerance);

/// max over arcs of relative_difference(a(arc), b(arc)). Reps must share quiver and dims.
double rep_difference(const Rep& a, const Rep& b);

}  // namespace freequiver
