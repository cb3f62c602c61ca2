#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "freequiver/expr.hpp"
#include "freequiver/representation.hpp"

namespace freequiver {

/// Target vertex name -> source vertex name.
using VertexMap = std::map<std::string, std::string>;

/// A free map C^Q -> C^R presented by one expression over Q per arc of R.
///
/// Objects are untouched: vertex v of R carries the space of identify(v) in Q.
/// Construction typechecks every entry and checks that it is parallel to its
/// target arc under the identification.
class FreeMapDef {
 public:
  /// `identification` defaults to equality of names.
  FreeMapDef(Quiver source, Quiver target, const std::map<std::string, Expr>& entries,
             VertexMap identification = {});
  /// Entries in target arc order.
  FreeMapDef(Quiver source, Quiver target, std::vector<Expr> entries, VertexMap identification = {});

  const Quiver& source() const { return source_; }
  const Quiver& target() const { return target_; }
  const std::vector<Expr>& entries() const { return entries_; }
  const Expr& entry(const std::string& target_arc) const {
    return entries_[target_.arc_index(target_arc)];
  }
  const VertexMap& identification() const { return identification_; }
  const std::string& identify(const std::string& target_vertex) const;
  /// Source vertex index for each target vertex index.
  const std::vector<std::size_t>& vertex_map() const { return vertex_map_; }

  bool is_polynomial() const;

 private:
  void validate();

  Quiver source_;
  Quiver target_;
  std::vector<Expr> entries_;
  VertexMap identification_;
  std::vector<std::size_t> vertex_map_;
};

/// Every target arc maps to itself.
FreeMapDef identity_map(const Quiver& q);

/// Details of one inverse node evaluation.
struct InverseEvent {
  std::string target_arc;
  std::string location;
  std::string node;  // rendered operand with its ^-1 suffix
  InvMode mode = InvMode::TwoSided;
  const Matrix* operand = nullptr;
  const Matrix* result = nullptr;  // null when the inverse does not exist
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool ok = true;
  std::string reason;
};

struct EvalOptions {
  /// Relative singular-value cutoff deciding (one-sided) invertibility.
  double invertibility = kInvertibilityThreshold;
  /// Called once per evaluated inverse node.
  std::function<void(const InverseEvent&)> on_inverse;
  /// Substitute a zero block for failed inverses instead of throwing.
  bool continue_on_singular = false;
  /// The point is a doubled representation [[X, H], [0, X]] (see block_extend).
  /// One-sided inverses then return [[A+, dA+], [0, A+]] with dA+ the derivative
  /// of the pseudo-inverse along the corner, which is itself a one-sided inverse
  /// of the doubled operand. Two-sided inverses are unaffected.
  bool doubled = false;
};

/// Evaluate every entry on x. Two-sided inverses need square invertible
/// operands; left (right) inverses are Moore-Penrose pseudo-inverses after a
/// full column (row) rank check. Throws RegularityError naming the node otherwise.
Rep eval_map(const FreeMapDef& f, const Rep& x, const EvalOptions& options = {});

/// Evaluate one expression over x.
Matrix eval_expr(const Expr& e, const Rep& x, const EvalOptions& options = {});

struct RegularityReport {
  bool regular = true;
  std::vector<InverseEvent> inverses;  // operand/result pointers are cleared
};

/// Whether every inverse node is defined at x, with per-node diagnostics.
RegularityReport is_regular(const FreeMapDef& f, const Rep& x,
                            double invertibility = kInvertibilityThreshold);

/// Entrywise f + g; requires identical quivers and identification.
FreeMapDef add_maps(const FreeMapDef& f, const FreeMapDef& g);
FreeMapDef scale_map(Complex k, const FreeMapDef& f);

/// f o g for g: P -> Q and f: Q -> R, by substituting g's entries for the atoms of f.
FreeMapDef compose_maps(const FreeMapDef& f, const FreeMapDef& g);

/// Entrywise normalize().
FreeMapDef normalize_map(const FreeMapDef& f);
/// Same quivers and identification, and normalized entries are structurally equal.
bool same_structure(const FreeMapDef& f, const FreeMapDef& g);

/// One term of the monomial decomposition: coefficient * (path on one target arc).
struct MonomialTerm {
  Complex coefficient;
  std::string target_arc;
  Path path;
  /// The monomial map: `path` on target_arc, zero on every other arc.
  FreeMapDef monomial;
};

/// Distribute products over sums and collect equal paths per target arc.
/// Terms whose coefficients cancel to exactly zero are dropped. Throws Error
/// when f contains an inverse.
std::vector<MonomialTerm> to_monomials(const FreeMapDef& f);

/// Sum of coefficient * monomial; the zero map of f's shape when `terms` is empty.
FreeMapDef from_monomials(const FreeMapDef& shape, const std::vector<MonomialTerm>& terms);

/// Maximal path length over the monomials (the identity counts as degree 0);
/// nullopt ("unbounded") when an inverse is present.
std::optional<std::size_t> degree(const FreeMapDef& f);

/// The expression of a path: Id for the identity, otherwise the arcs in written order.
Expr path_expr(const Path& p);

/// Every entry zero.
FreeMapDef zero_map(const Quiver& source, const Quiver& target, VertexMap identification = {});

/// x's target dimensions under f's identification.
std::vector<Index> target_dims(const FreeMapDef& f, const Rep& x);

/// Conjugate a rep over f.target() by a natural automorphism given over f.source().
Rep conjugate_target(const FreeMapDef& f, const Rep& image, const NatAuto& s);

}  // namespace freequiver
