#pragma once

#include <map>
#include <string>
#include <vector>

#include "freequiver/free_map.hpp"

namespace freequiver {

/// A degree-2 monomial map C^P x C^Q -> C^R: each arc r of R is the composite
/// of one arc of P and one arc of Q. Vertices are identified by name.
struct ProductSpec {
  struct Pair {
    std::string p_arc;
    std::string q_arc;
  };
  Quiver p;
  Quiver q;
  Quiver r;
  /// Indexed like r.arcs().
  std::vector<Pair> pairs;
  /// true: r = p o q (the P factor is applied last). false: r = q o p.
  bool left_multiplication = true;
};

/// Checks composability and parallelism of every pair; throws QuiverError.
void validate_product_spec(const ProductSpec& spec);

/// Disjoint union of two quivers glued along equally named vertices. Arcs of
/// `b` whose names clash with `a` get a "'" suffix (repeated until unique).
struct JoinedQuiver {
  Quiver quiver;
  /// b's arc name -> arc name in the join.
  std::map<std::string, std::string> b_arcs;
};
JoinedQuiver join_quivers(const Quiver& a, const Quiver& b);

/// The pair (x, y) as one representation of the join; shared vertices must
/// carry equal dimensions.
Rep join_reps(const JoinedQuiver& joined, const Rep& x, const Rep& y);

/// Arc-wise products f(X) x_R g(Y) of two evaluated representations.
Rep rep_product(const ProductSpec& spec, const Rep& fx, const Rep& gy);

/// f x_R g over the join of the two sources: entry r = f_p o g_q (or g_q o f_p).
struct ProductMap {
  JoinedQuiver source;
  FreeMapDef map;
};
ProductMap product_maps(const ProductSpec& spec, const FreeMapDef& f, const FreeMapDef& g);

/// The opposite quiver: arc x: u -> v becomes x*: v -> u.
Quiver adjoint_quiver(const Quiver& q);
/// Representation of adjoint_quiver(x.quiver()) with conjugate-transposed matrices.
Rep adjoint_rep(const Rep& x);
/// Q* x Q -> R where R has a loop named x at src(x) for each arc x: entry x* o x.
ProductSpec hermitian_square_spec(const Quiver& q);

}  // namespace freequiver
