#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "freequiver/linalg.hpp"
#include "freequiver/quiver.hpp"

namespace freequiver {

enum class ExprKind { Atom, Id, Zero, Add, Scale, Mul, Inv };
enum class InvMode { TwoSided, Left, Right };

std::string_view to_string(ExprKind kind);
std::string_view to_string(InvMode mode);

/// Immutable expression tree over the arcs of a quiver.
///
/// Add and Mul are n-ary. Mul lists factors in written order, so the last
/// factor is applied first: mul({a, b}) is a o b. Zero carries explicit
/// endpoints because no arc may exist between them. Nodes are shared, so
/// copying an Expr is cheap.
class Expr {
 public:
  static Expr atom(std::string arc);
  static Expr id(std::string vertex);
  static Expr zero(std::string src, std::string dst);
  static Expr add(std::vector<Expr> terms);
  static Expr scale(Complex k, Expr e);
  static Expr mul(std::vector<Expr> factors);
  static Expr inv(Expr e, InvMode mode = InvMode::TwoSided);

  ExprKind kind() const { return node_->kind; }
  /// Arc (Atom), vertex (Id) or source vertex (Zero).
  const std::string& name() const { return node_->name; }
  /// Target vertex of a Zero node.
  const std::string& zero_dst() const { return node_->name2; }
  const std::vector<Expr>& children() const { return node_->children; }
  const Expr& child() const { return node_->children.front(); }
  Complex scalar() const { return node_->scalar; }
  InvMode inv_mode() const { return node_->mode; }

  /// Node identity, stable for the lifetime of the tree (used for memoization).
  const void* node_id() const { return node_.get(); }

  /// Exact structural equality (scalars compared bitwise-equal).
  bool operator==(const Expr& other) const;

  /// Right-to-left composition notation, e.g. "x1 - x12 x2^-1 x21". Parseable by parse_expr.
  std::string render() const;

 private:
  struct Node {
    ExprKind kind;
    std::string name;
    std::string name2;
    std::vector<Expr> children;
    Complex scalar{1.0, 0.0};
    InvMode mode = InvMode::TwoSided;
  };
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Flattening sum / composition helpers: nested Add (resp. Mul) children are spliced in.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
/// Composition a o b (b applied first).
Expr operator*(const Expr& a, const Expr& b);
Expr operator*(Complex k, const Expr& e);
inline Expr operator*(double k, const Expr& e) { return Complex(k, 0.0) * e; }
/// e o e o ... (n >= 1 factors).
Expr power(const Expr& e, int n);
inline Expr inv(const Expr& e, InvMode mode = InvMode::TwoSided) { return Expr::inv(e, mode); }

struct Endpoints {
  std::string src;
  std::string dst;
  bool operator==(const Endpoints&) const = default;
};

/// Endpoints of e over q, or TypeError naming the first violation and its location
/// ("root", "root/add[1]/mul[0]", ...). When `dims` is given, two-sided inverses
/// of provably non-square operands are rejected too.
Endpoints typecheck(const Expr& e, const Quiver& q, const std::vector<Index>* dims = nullptr);

/// Canonical form used for structural comparisons: nested Add/Mul flattened,
/// scalars pulled out of products and folded, identity factors dropped,
/// Scale(1, e) -> e, Add children sorted by rendering.
Expr normalize(const Expr& e);

bool contains_inverse(const Expr& e);
bool contains_atom(const Expr& e);

/// Rebuild e bottom-up, replacing each leaf (Atom, Id, Zero) by leaf_map(leaf).
Expr map_leaves(const Expr& e, const std::function<Expr(const Expr&)>& leaf_map);

/// Parse the rendered notation: sums with + and -, juxtaposition for
/// composition (rightmost applied first), scalars as real literals or [re, im],
/// postfix ^n (n >= 1), ^-1, ^-1L (left inverse) and ^-1R (right inverse),
/// id{v}, zero{u,v}, and parentheses. Throws ParseError.
Expr parse_expr(std::string_view text);

/// Shortest round-trip rendering of a scalar: "2.5", or "[re,im]" when complex.
std::string format_scalar(Complex k);

}  // namespace freequiver
