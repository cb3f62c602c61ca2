#pragma once

#include "freequiver/free_map.hpp"

namespace freequiver {

/// Vertices u, v; arcs x1: u->u, x2: v->v, x12: v->u, x21: u->v. A representation
/// is a block 2x2 operator [[A, B], [C, D]] with A = x1, B = x12, C = x21, D = x2.
Quiver sch_quiver();
/// Vertices u, v and the single loop x1 at u.
Quiver one_loop_quiver();
/// Vertices u, v; arcs a: u->u, U: v->u, c: v->v, V: u->v.
Quiver smw_quiver();

/// x1 - x12 x2^-1 x21, Sch -> one loop.
FreeMapDef schur_map();

enum class Pivot { A, D };
/// Pivot D: (x1 - x12 x2^-1 x21, x12 x2^-1, -x2^-1 x21, x2^-1) on (x1, x12, x21, x2).
/// Pivot A: (x1^-1, -x1^-1 x12, x21 x1^-1, x2 - x21 x1^-1 x12).
/// One off-diagonal block keeps its sign, which makes each map an involution.
FreeMapDef ppt_map(Pivot pivot);

/// Blocks of [[A, B], [C, D]]^-1 written with S = D - C A^-1 B, Sch -> Sch.
FreeMapDef block_inverse_map();

/// (a + U c V)^-1 and a^-1 - a^-1 U (c^-1 + V a^-1 U)^-1 V a^-1, smw quiver -> one loop.
FreeMapDef smw_lhs();
FreeMapDef smw_rhs();

/// Max relative block residual between the formula and a direct numeric inverse
/// of [[A, B], [C, D]]. RegularityError when A, the complement or the whole is singular.
double block_inverse_check(const Rep& x);
/// Relative residual between the formula and a direct numeric inverse of A + U C V.
double smw_check(const Rep& x);

/// sum_{i <= order} e^i / i! with e^0 the identity. TypeError unless e is a loop over q.
Expr exp_truncated(const Expr& e, const Quiver& q, int order = 12);
/// Same series evaluated on a matrix. Throws Error when ||m||_2 > 1.
Matrix exp_series(const Matrix& m, int order = 12);

/// Z(x, y) through bracket order `order` (1, 2 or 3), from the two-loop quiver
/// (arcs x, y at u) to the loop z at u.
FreeMapDef cbh_truncated(int order = 3);

/// ||exp(Z) - exp(X) exp(Y)||_2 with Z = cbh_truncated(order) at (x, y), exp at order 12.
double cbh_error(const Matrix& x, const Matrix& y, int order = 3);

/// x and y rescaled to operator norm r for each radius; orders[i] = log2(errors[i] / errors[i+1])
/// for consecutive radii that halve.
struct CbhSweep {
  std::vector<double> radii;
  std::vector<double> errors;
  std::vector<double> orders;
};
CbhSweep cbh_sweep(const Matrix& x, const Matrix& y, const std::vector<double>& radii, int order = 3);

/// Closed-form derivatives at a Sch point along h (indexed like the Sch arcs).
/// DSch = H_A - H_B D^-1 C + B D^-1 H_D D^-1 C - B D^-1 H_C.
Matrix dsch_closed_form(const Rep& x, const std::vector<Matrix>& h);
/// Dppt_D blocks in Sch arc order (x1, x2, x12, x21):
/// DSch, -D^-1 H_D D^-1, H_B D^-1 - B D^-1 H_D D^-1, D^-1 H_D D^-1 C - D^-1 H_C.
std::vector<Matrix> dppt_closed_form(const Rep& x, const std::vector<Matrix>& h);

/// (x^-1 y^2, 3(yx - xy), x (y - x)^-1 y) on the two-loop quiver; target arcs f1, f2, f3.
FreeMapDef rational_example_map();
/// (x^-1 y^2, 3(yx - xy), y (y - x)^-1).
FreeMapDef derivative_example_map();

}  // namespace freequiver
