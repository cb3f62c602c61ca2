#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freequiver/free_map.hpp"
#include "freequiver/product.hpp"

namespace freequiver {

/// A tangent direction at `base`: one matrix per arc, shaped like base's arc matrix.
struct DirectionField {
  Rep base;
  std::vector<Matrix> h;
};

/// Throws ShapeError when a matrix does not match the base arc shape.
DirectionField make_direction(const Rep& base, std::vector<Matrix> h);
DirectionField zero_direction(const Rep& base);
/// Ginibre entries, deterministic in the seed.
DirectionField random_direction(const Rep& base, std::uint64_t seed);

/// Arc a -> [[X(a), H(a)], [0, X(a)]].
Rep block_extend(const Rep& x, const std::vector<Matrix>& h);
inline Rep block_extend(const DirectionField& d) { return block_extend(d.base, d.h); }

/// Df(X)[H] read off the upper-right blocks of f at block_extend(x, h). The
/// result's base is f(x). Throws Error when a diagonal block or the diagonal of
/// an inverse node drifts from the undoubled value by more than `tol` (relative).
DirectionField directional_derivative(const FreeMapDef& f, const Rep& x,
                                      const std::vector<Matrix>& h, double tol = 1e-8);

/// (f(x + eps h) - f(x)) / eps per target arc, with base f(x).
DirectionField finite_difference(const FreeMapDef& f, const Rep& x, const std::vector<Matrix>& h,
                                 double eps);

/// Flat coordinate of a direction: one matrix entry of one arc.
struct DirectionCoord {
  std::size_t arc;
  Index row;
  Index col;
};

/// Arc-major, column-major-within-arc coordinates for the arc shapes of x.
std::vector<DirectionCoord> direction_coords(const Rep& x);
Vector stack(const std::vector<Matrix>& mats);
/// Inverse of stack for the arc shapes of `shape`.
std::vector<Matrix> unstack(const Vector& v, const Rep& shape);

/// The complex-linear map H -> Df(X)[H] as a dense matrix, one column per unit direction.
struct DerivativeMatrix {
  Matrix m;
  std::vector<DirectionCoord> cols;  // over the source arcs at x
  std::vector<DirectionCoord> rows;  // over the target arcs at f(x)
  Rep image;                         // f(x)
};
DerivativeMatrix derivative_matrix(const FreeMapDef& f, const Rep& x);

struct Collision {
  DirectionField h;     // unit kernel direction (stacked Frobenius norm 1)
  Rep rep1;             // block_extend(x, h)
  Rep rep2;             // x (+) x
  double image_residual = 0.0;  // rep_difference(f(rep1), f(rep2))
  double separation = 0.0;      // stacked Frobenius norm of rep1 - rep2
  bool verified = false;
};

/// Rank analysis of Df(X). Either full-rank evidence or a verified collision pair.
struct IftCertificate {
  bool full_rank = false;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  Index kernel_dim = 0;
  double threshold = 0.0;
  /// Singular values in decreasing order, zero-padded to the number of columns.
  Eigen::VectorXd profile;
  std::optional<Collision> collision;
};
IftCertificate ift_certificate(const FreeMapDef& f, const Rep& x, double tol = 1e-8);

/// Relative residual of D(f o g)(x)[h] against Df(g(x))[Dg(x)[h]].
double chain_rule_check(const FreeMapDef& f, const FreeMapDef& g, const Rep& x,
                        const std::vector<Matrix>& h);

/// Relative residual of D(f x g)(x, y)[h, k] against Df(x)[h] x g(y) + f(x) x Dg(y)[k].
/// Requires spec.left_multiplication.
double leibniz_check(const ProductSpec& spec, const FreeMapDef& f, const FreeMapDef& g,
                     const Rep& x, const Rep& y, const std::vector<Matrix>& h,
                     const std::vector<Matrix>& k);

/// Ones on the first superdiagonal.
Matrix nilpotent_matrix(Index n);

struct NilpotentResult {
  Matrix value;  // p(N_n)
  std::vector<Complex> top_row;
};
/// Evaluate sum_i coeffs[i] x^i as a free map on the one-loop quiver at N_n.
NilpotentResult nilpotent_coefficients(const std::vector<Complex>& coeffs, Index n);

/// Relative residual of f([[X, X G - G Y], [0, Y]]) against
/// [[f(X), f(X) G - G f(Y)], [0, f(Y)]]. G: y -> x need not intertwine.
double gamma_commutation_check(const FreeMapDef& f, const Rep& x, const Rep& y,
                               const std::vector<Matrix>& gammas);

/// Arc a -> [[X(a), X(a) G_s - G_t Y(a)], [0, Y(a)]].
Rep gamma_block_rep(const Rep& x, const Rep& y, const std::vector<Matrix>& gammas);

}  // namespace freequiver
