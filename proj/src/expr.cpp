#include "freequiver/expr.hpp"

#include <algorithm>
#include <unordered_map>

#include "freequiver/errors.hpp"

namespace freequiver {

std::string_view to_string(ExprKind kind) {
  switch (kind) {
    case ExprKind::Atom: return "atom";
    case ExprKind::Id: return "id";
    case ExprKind::Zero: return "zero";
    case ExprKind::Add: return "add";
    case ExprKind::Scale: return "scale";
    case ExprKind::Mul: return "mul";
    case ExprKind::Inv: return "inv";
  }
  return "?";
}

std::string_view to_string(InvMode mode) {
  switch (mode) {
    case InvMode::TwoSided: return "two_sided";
    case InvMode::Left: return "left";
    case InvMode::Right: return "right";
  }
  return "?";
}

Expr Expr::atom(std::string arc) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Atom, std::move(arc), {}, {}}));
}

Expr Expr::id(std::string vertex) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Id, std::move(vertex), {}, {}}));
}

Expr Expr::zero(std::string src, std::string dst) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Zero, std::move(src), std::move(dst), {}}));
}

Expr Expr::add(std::vector<Expr> terms) {
  if (terms.empty()) throw Error("Expr::add needs at least one term");
  return Expr(std::make_shared<const Node>(Node{ExprKind::Add, {}, {}, std::move(terms)}));
}

Expr Expr::scale(Complex k, Expr e) {
  Node n{ExprKind::Scale, {}, {}, {std::move(e)}};
  n.scalar = k;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::mul(std::vector<Expr> factors) {
  if (factors.empty()) throw Error("Expr::mul needs at least one factor");
  return Expr(std::make_shared<const Node>(Node{ExprKind::Mul, {}, {}, std::move(factors)}));
}

Expr Expr::inv(Expr e, InvMode mode) {
  Node n{ExprKind::Inv, {}, {}, {std::move(e)}};
  n.mode = mode;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

bool Expr::operator==(const Expr& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  return a.kind == b.kind && a.name == b.name && a.name2 == b.name2 && a.scalar == b.scalar &&
         a.mode == b.mode && a.children == b.children;
}

namespace {

void splice(std::vector<Expr>& out, const Expr& e, ExprKind kind) {
  if (e.kind() == kind) {
    out.insert(out.end(), e.children().begin(), e.children().end());
  } else {
    out.push_back(e);
  }
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  std::vector<Expr> terms;
  splice(terms, a, ExprKind::Add);
  splice(terms, b, ExprKind::Add);
  return Expr::add(std::move(terms));
}

Expr operator-(const Expr& a) {
  if (a.kind() == ExprKind::Scale) return Expr::scale(-a.scalar(), a.child());
  return Expr::scale(-1.0, a);
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  std::vector<Expr> factors;
  splice(factors, a, ExprKind::Mul);
  splice(factors, b, ExprKind::Mul);
  return Expr::mul(std::move(factors));
}

Expr operator*(Complex k, const Expr& e) { return Expr::scale(k, e); }

Expr power(const Expr& e, int n) {
  if (n < 1) throw Error("power: exponent must be >= 1");
  if (n == 1) return e;
  return Expr::mul(std::vector<Expr>(static_cast<std::size_t>(n), e));
}

namespace {

std::string describe(const Endpoints& ep) { return ep.src + "->" + ep.dst; }

Endpoints check(const Expr& e, const Quiver& q, const std::vector<Index>* dims,
                const std::string& loc) {
  switch (e.kind()) {
    case ExprKind::Atom: {
      auto i = q.find_arc(e.name());
      if (!i) throw TypeError("unknown arc '" + e.name() + "'", loc);
      const Arc& a = q.arcs()[*i];
      return {a.src, a.dst};
    }
    case ExprKind::Id:
      if (!q.has_vertex(e.name())) throw TypeError("unknown vertex '" + e.name() + "'", loc);
      return {e.name(), e.name()};
    case ExprKind::Zero:
      for (const auto* v : {&e.name(), &e.zero_dst()}) {
        if (!q.has_vertex(*v)) throw TypeError("unknown vertex '" + *v + "'", loc);
      }
      return {e.name(), e.zero_dst()};
    case ExprKind::Scale:
      return check(e.child(), q, dims, loc + "/scale");
    case ExprKind::Add: {
      const auto& kids = e.children();
      Endpoints first = check(kids[0], q, dims, loc + "/add[0]");
      for (std::size_t i = 1; i < kids.size(); ++i) {
        Endpoints ep = check(kids[i], q, dims, loc + "/add[" + std::to_string(i) + "]");
        if (!(ep == first)) {
          throw TypeError("non-parallel Add: term 0 is " + describe(first) + " but term " +
                              std::to_string(i) + " (" + kids[i].render() + ") is " + describe(ep),
                          loc);
        }
      }
      return first;
    }
    case ExprKind::Mul: {
      const auto& kids = e.children();
      const std::size_t n = kids.size();
      Endpoints acc = check(kids[n - 1], q, dims, loc + "/mul[" + std::to_string(n - 1) + "]");
      for (std::size_t i = n - 1; i-- > 0;) {
        Endpoints ep = check(kids[i], q, dims, loc + "/mul[" + std::to_string(i) + "]");
        if (ep.src != acc.dst) {
          throw TypeError("non-composable Mul: " + kids[i].render() + " starts at '" + ep.src +
                              "' but " + kids[i + 1].render() + " ends at '" + acc.dst + "'",
                          loc);
        }
        acc.dst = ep.dst;
      }
      return acc;
    }
    case ExprKind::Inv: {
      Endpoints ep = check(e.child(), q, dims, loc + "/inv");
      if (e.inv_mode() == InvMode::TwoSided && dims != nullptr &&
          (*dims)[q.vertex_index(ep.src)] != (*dims)[q.vertex_index(ep.dst)]) {
        throw TypeError("two-sided inverse of non-square operand " + e.child().render(), loc);
      }
      return {ep.dst, ep.src};
    }
  }
  throw TypeError("corrupt expression node", loc);
}

}  // namespace

Endpoints typecheck(const Expr& e, const Quiver& q, const std::vector<Index>* dims) {
  return check(e, q, dims, "root");
}

Expr normalize(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Atom:
    case ExprKind::Id:
    case ExprKind::Zero:
      return e;
    case ExprKind::Inv:
      return Expr::inv(normalize(e.child()), e.inv_mode());
    case ExprKind::Scale: {
      Expr inner = normalize(e.child());
      Complex k = e.scalar();
      if (inner.kind() == ExprKind::Scale) {
        k *= inner.scalar();
        inner = inner.child();
      }
      if (k == Complex(1.0, 0.0)) return inner;
      return Expr::scale(k, inner);
    }
    case ExprKind::Add: {
      std::vector<Expr> terms;
      for (const auto& c : e.children()) splice(terms, normalize(c), ExprKind::Add);
      if (terms.size() == 1) return terms.front();
      std::vector<std::pair<std::string, Expr>> keyed;
      keyed.reserve(terms.size());
      for (auto& t : terms) keyed.emplace_back(t.render(), std::move(t));
      std::stable_sort(keyed.begin(), keyed.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      terms.clear();
      for (auto& kv : keyed) terms.push_back(std::move(kv.second));
      return Expr::add(std::move(terms));
    }
    case ExprKind::Mul: {
      Complex k(1.0, 0.0);
      std::vector<Expr> factors;
      for (const auto& c : e.children()) {
        Expr n = normalize(c);
        if (n.kind() == ExprKind::Scale) {
          k *= n.scalar();
          n = n.child();
        }
        splice(factors, n, ExprKind::Mul);
      }
      std::vector<Expr> kept;
      for (auto& f : factors) {
        if (f.kind() != ExprKind::Id) kept.push_back(std::move(f));
      }
      if (kept.empty()) kept.push_back(factors.front());
      Expr body = kept.size() == 1 ? kept.front() : Expr::mul(std::move(kept));
      if (k == Complex(1.0, 0.0)) return body;
      return Expr::scale(k, body);
    }
  }
  return e;
}

bool contains_inverse(const Expr& e) {
  if (e.kind() == ExprKind::Inv) return true;
  return std::any_of(e.children().begin(), e.children().end(), contains_inverse);
}

bool contains_atom(const Expr& e) {
  if (e.kind() == ExprKind::Atom) return true;
  return std::any_of(e.children().begin(), e.children().end(), contains_atom);
}

namespace {

Expr map_leaves_memo(const Expr& e, const std::function<Expr(const Expr&)>& leaf_map,
                     std::unordered_map<const void*, Expr>& memo) {
  if (auto it = memo.find(e.node_id()); it != memo.end()) return it->second;
  Expr out = e;
  switch (e.kind()) {
    case ExprKind::Atom:
    case ExprKind::Id:
    case ExprKind::Zero:
      out = leaf_map(e);
      break;
    case ExprKind::Scale:
      out = Expr::scale(e.scalar(), map_leaves_memo(e.child(), leaf_map, memo));
      break;
    case ExprKind::Inv:
      out = Expr::inv(map_leaves_memo(e.child(), leaf_map, memo), e.inv_mode());
      break;
    case ExprKind::Add:
    case ExprKind::Mul: {
      std::vector<Expr> kids;
      kids.reserve(e.children().size());
      for (const auto& c : e.children()) kids.push_back(map_leaves_memo(c, leaf_map, memo));
      out = e.kind() == ExprKind::Add ? Expr::add(std::move(kids)) : Expr::mul(std::move(kids));
      break;
    }
  }
  memo.emplace(e.node_id(), out);
  return out;
}

}  // namespace

Expr map_leaves(const Expr& e, const std::function<Expr(const Expr&)>& leaf_map) {
  std::unordered_map<const void*, Expr> memo;
  return map_leaves_memo(e, leaf_map, memo);
}

}  // namespace freequiver
