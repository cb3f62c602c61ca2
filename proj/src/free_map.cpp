#include "freequiver/free_map.hpp"

#include <algorithm>
#include <unordered_map>

#include "freequiver/errors.hpp"

namespace freequiver {

namespace {

VertexMap complete_identification(const Quiver& source, const Quiver& target, VertexMap given) {
  VertexMap out;
  for (const auto& v : target.vertices()) {
    auto it = given.find(v);
    const std::string& s = it == given.end() ? v : it->second;
    if (!source.has_vertex(s)) {
      throw QuiverError("target vertex '" + v + "' is identified with '" + s +
                        "', which is not a source vertex");
    }
    out.emplace(v, s);
  }
  for (const auto& kv : given) {
    if (!target.has_vertex(kv.first)) {
      throw QuiverError("identification names unknown target vertex '" + kv.first + "'");
    }
  }
  return out;
}

}  // namespace

FreeMapDef::FreeMapDef(Quiver source, Quiver target, const std::map<std::string, Expr>& entries,
                       VertexMap identification)
    : source_(std::move(source)), target_(std::move(target)) {
  identification_ = complete_identification(source_, target_, std::move(identification));
  for (const auto& kv : entries) {
    if (!target_.has_arc(kv.first)) throw QuiverError("entry for unknown target arc '" + kv.first + "'");
  }
  for (const auto& a : target_.arcs()) {
    auto it = entries.find(a.name);
    if (it == entries.end()) throw QuiverError("missing entry for target arc '" + a.name + "'");
    entries_.push_back(it->second);
  }
  validate();
}

FreeMapDef::FreeMapDef(Quiver source, Quiver target, std::vector<Expr> entries,
                       VertexMap identification)
    : source_(std::move(source)), target_(std::move(target)), entries_(std::move(entries)) {
  identification_ = complete_identification(source_, target_, std::move(identification));
  if (entries_.size() != target_.arc_count()) {
    throw QuiverError("expected " + std::to_string(target_.arc_count()) + " entries, got " +
                      std::to_string(entries_.size()));
  }
  validate();
}

void FreeMapDef::validate() {
  vertex_map_.clear();
  for (const auto& v : target_.vertices()) {
    vertex_map_.push_back(source_.vertex_index(identification_.at(v)));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Arc& a = target_.arcs()[i];
    Endpoints ep;
    try {
      ep = typecheck(entries_[i], source_);
    } catch (const TypeError& e) {
      throw TypeError(e.message(), a.name + ":" + e.location());
    }
    const Endpoints want{identify(a.src), identify(a.dst)};
    if (!(ep == want)) {
      throw TypeError("entry " + entries_[i].render() + " runs " + ep.src + "->" + ep.dst +
                          " but target arc " + a.name + " needs " + want.src + "->" + want.dst,
                      a.name + ":root");
    }
  }
}

const std::string& FreeMapDef::identify(const std::string& target_vertex) const {
  auto it = identification_.find(target_vertex);
  if (it == identification_.end()) throw QuiverError("unknown target vertex '" + target_vertex + "'");
  return it->second;
}

bool FreeMapDef::is_polynomial() const {
  return std::none_of(entries_.begin(), entries_.end(), contains_inverse);
}

FreeMapDef identity_map(const Quiver& q) {
  std::vector<Expr> entries;
  for (const auto& a : q.arcs()) entries.push_back(Expr::atom(a.name));
  return FreeMapDef(q, q, std::move(entries));
}

namespace {

class Evaluator {
 public:
  Evaluator(const Rep& x, const EvalOptions& options, std::string target_arc)
      : x_(x), options_(options), target_arc_(std::move(target_arc)) {}

  const Matrix& eval(const Expr& e, const std::string& loc) {
    if (auto it = memo_.find(e.node_id()); it != memo_.end()) return it->second;
    Matrix m = compute(e, loc);
    return memo_.emplace(e.node_id(), std::move(m)).first->second;
  }

 private:
  Index dim(const std::string& v) const { return x_.dim(v); }

  Matrix compute(const Expr& e, const std::string& loc) {
    switch (e.kind()) {
      case ExprKind::Atom:
        return x_.mat(e.name());
      case ExprKind::Id:
        return Matrix::Identity(dim(e.name()), dim(e.name()));
      case ExprKind::Zero:
        return Matrix::Zero(dim(e.zero_dst()), dim(e.name()));
      case ExprKind::Scale:
        return e.scalar() * eval(e.child(), loc + "/scale");
      case ExprKind::Add: {
        Matrix acc = eval(e.children()[0], loc + "/add[0]");
        for (std::size_t i = 1; i < e.children().size(); ++i) {
          acc += eval(e.children()[i], loc + "/add[" + std::to_string(i) + "]");
        }
        return acc;
      }
      case ExprKind::Mul: {
        const auto& kids = e.children();
        const std::size_t n = kids.size();
        Matrix acc = eval(kids[n - 1], loc + "/mul[" + std::to_string(n - 1) + "]");
        for (std::size_t i = n - 1; i-- > 0;) {
          acc = eval(kids[i], loc + "/mul[" + std::to_string(i) + "]") * acc;
        }
        return acc;
      }
      case ExprKind::Inv:
        return invert(e, eval(e.child(), loc + "/inv"), loc);
    }
    throw Error("corrupt expression node");
  }

  Matrix invert(const Expr& e, const Matrix& a, const std::string& loc) {
    InverseEvent ev;
    ev.target_arc = target_arc_;
    ev.location = loc;
    ev.node = e.render();
    ev.mode = e.inv_mode();
    ev.operand = &a;

    const Index rows = a.rows();
    const Index cols = a.cols();
    Matrix result;
    bool have = false;
    if (ev.mode == InvMode::TwoSided && rows != cols) {
      ev.ok = false;
      ev.reason = "two-sided inverse of a " + std::to_string(rows) + "x" + std::to_string(cols) +
                  " operand";
    } else if ((ev.mode == InvMode::Left && rows < cols) ||
               (ev.mode == InvMode::Right && rows > cols)) {
      ev.ok = false;
      ev.reason = std::string(ev.mode == InvMode::Left ? "left" : "right") + " inverse of a " +
                  std::to_string(rows) + "x" + std::to_string(cols) + " operand";
    } else if (std::min(rows, cols) == 0) {
      result = Matrix::Zero(cols, rows);
      have = true;
    } else if (options_.doubled && ev.mode != InvMode::TwoSided) {
      return invert_doubled(ev, a, loc);
    } else {
      Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::VectorXd& s = svd.singularValues();
      ev.sigma_max = s(0);
      ev.sigma_min = s(s.size() - 1);
      if (!(ev.sigma_max > 0.0) || !(ev.sigma_min > options_.invertibility * ev.sigma_max)) {
        ev.ok = false;
        ev.reason = "rank deficient (sigma_min/sigma_max = " +
                    std::to_string(ev.sigma_max > 0.0 ? ev.sigma_min / ev.sigma_max : 0.0) + ")";
      } else {
        result = svd.matrixV() * s.cwiseInverse().cast<Complex>().asDiagonal() *
                 svd.matrixU().adjoint();
        have = true;
      }
    }
    return finish(ev, have, std::move(result), rows, cols, loc);
  }

  // Pseudo-inverse P of the diagonal block A plus its derivative along the corner H:
  // dP = -P H P + P P* H* (I - A P) + (I - P A) H* P* P.
  Matrix invert_doubled(InverseEvent& ev, const Matrix& a, const std::string& loc) {
    const Index rows = a.rows();
    const Index cols = a.cols();
    if (rows % 2 != 0 || cols % 2 != 0) {
      throw Error("doubled evaluation met an operand of odd size at " + loc);
    }
    const Index m = rows / 2;
    const Index n = cols / 2;
    const Matrix base = a.topLeftCorner(m, n);
    const Matrix corner = a.topRightCorner(m, n);
    Eigen::BDCSVD<Matrix> svd(base, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    ev.sigma_max = s(0);
    ev.sigma_min = s(s.size() - 1);
    Matrix result;
    bool have = false;
    if (!(ev.sigma_max > 0.0) || !(ev.sigma_min > options_.invertibility * ev.sigma_max)) {
      ev.ok = false;
      ev.reason = "rank deficient (sigma_min/sigma_max = " +
                  std::to_string(ev.sigma_max > 0.0 ? ev.sigma_min / ev.sigma_max : 0.0) + ")";
    } else {
      const Matrix p =
          svd.matrixV() * s.cwiseInverse().cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
      const Matrix im = Matrix::Identity(m, m) - base * p;
      const Matrix in = Matrix::Identity(n, n) - p * base;
      const Matrix hc = corner.adjoint();
      const Matrix dp = -p * corner * p + p * p.adjoint() * hc * im + in * hc * p.adjoint() * p;
      result = Matrix::Zero(cols, rows);
      result.topLeftCorner(n, m) = p;
      result.bottomRightCorner(n, m) = p;
      result.topRightCorner(n, m) = dp;
      have = true;
    }
    return finish(ev, have, std::move(result), rows, cols, loc);
  }

  Matrix finish(InverseEvent& ev, bool have, Matrix result, Index rows, Index cols,
                const std::string& loc) {
    if (!have) {
      if (!options_.continue_on_singular) {
        if (options_.on_inverse) options_.on_inverse(ev);
        throw RegularityError(ev.node + " is undefined: " + ev.reason + " in entry " +
                                  target_arc_ + " at " + loc,
                              ev.node + " at " + target_arc_ + ":" + loc);
      }
      result = Matrix::Zero(cols, rows);
    } else {
      ev.result = &result;
    }
    if (options_.on_inverse) options_.on_inverse(ev);
    return result;
  }

  const Rep& x_;
  const EvalOptions& options_;
  std::string target_arc_;
  std::unordered_map<const void*, Matrix> memo_;
};

}  // namespace

std::vector<Index> target_dims(const FreeMapDef& f, const Rep& x) {
  std::vector<Index> dims;
  for (std::size_t v : f.vertex_map()) dims.push_back(x.dim(v));
  return dims;
}

Rep eval_map(const FreeMapDef& f, const Rep& x, const EvalOptions& options) {
  if (!(x.quiver() == f.source())) throw QuiverError("representation is not over the map's source quiver");
  std::vector<Matrix> mats;
  mats.reserve(f.entries().size());
  for (std::size_t i = 0; i < f.entries().size(); ++i) {
    Evaluator ev(x, options, f.target().arcs()[i].name);
    mats.push_back(ev.eval(f.entries()[i], "root"));
  }
  return Rep(f.target(), target_dims(f, x), std::move(mats));
}

Matrix eval_expr(const Expr& e, const Rep& x, const EvalOptions& options) {
  typecheck(e, x.quiver());
  Evaluator ev(x, options, "expr");
  return ev.eval(e, "root");
}

RegularityReport is_regular(const FreeMapDef& f, const Rep& x, double invertibility) {
  RegularityReport report;
  EvalOptions opts;
  opts.invertibility = invertibility;
  opts.continue_on_singular = true;
  opts.on_inverse = [&](const InverseEvent& ev) {
    InverseEvent copy = ev;
    copy.operand = nullptr;
    copy.result = nullptr;
    report.regular = report.regular && ev.ok;
    report.inverses.push_back(std::move(copy));
  };
  eval_map(f, x, opts);
  return report;
}

namespace {

void require_same_shape(const FreeMapDef& f, const FreeMapDef& g) {
  if (!(f.source() == g.source()) || !(f.target() == g.target()) ||
      f.identification() != g.identification()) {
    throw QuiverError("maps differ in source, target or vertex identification");
  }
}

}  // namespace

FreeMapDef add_maps(const FreeMapDef& f, const FreeMapDef& g) {
  require_same_shape(f, g);
  std::vector<Expr> entries;
  for (std::size_t i = 0; i < f.entries().size(); ++i) {
    entries.push_back(Expr::add({f.entries()[i], g.entries()[i]}));
  }
  return FreeMapDef(f.source(), f.target(), std::move(entries), f.identification());
}

FreeMapDef scale_map(Complex k, const FreeMapDef& f) {
  std::vector<Expr> entries;
  for (const auto& e : f.entries()) entries.push_back(Expr::scale(k, e));
  return FreeMapDef(f.source(), f.target(), std::move(entries), f.identification());
}

FreeMapDef compose_maps(const FreeMapDef& f, const FreeMapDef& g) {
  if (!(g.target() == f.source())) {
    throw QuiverError("compose_maps: inner map's target is not the outer map's source");
  }
  const auto leaf = [&g](const Expr& e) -> Expr {
    switch (e.kind()) {
      case ExprKind::Atom: return g.entry(e.name());
      case ExprKind::Id: return Expr::id(g.identify(e.name()));
      case ExprKind::Zero: return Expr::zero(g.identify(e.name()), g.identify(e.zero_dst()));
      default: return e;
    }
  };
  std::vector<Expr> entries;
  for (const auto& e : f.entries()) entries.push_back(map_leaves(e, leaf));
  VertexMap ident;
  for (const auto& v : f.target().vertices()) ident.emplace(v, g.identify(f.identify(v)));
  return FreeMapDef(g.source(), f.target(), std::move(entries), std::move(ident));
}

FreeMapDef normalize_map(const FreeMapDef& f) {
  std::vector<Expr> entries;
  for (const auto& e : f.entries()) entries.push_back(normalize(e));
  return FreeMapDef(f.source(), f.target(), std::move(entries), f.identification());
}

bool same_structure(const FreeMapDef& f, const FreeMapDef& g) {
  if (!(f.source() == g.source()) || !(f.target() == g.target()) ||
      f.identification() != g.identification()) {
    return false;
  }
  for (std::size_t i = 0; i < f.entries().size(); ++i) {
    if (!(normalize(f.entries()[i]) == normalize(g.entries()[i]))) return false;
  }
  return true;
}

Expr path_expr(const Path& p) {
  if (p.is_identity()) return Expr::id(p.src());
  if (p.length() == 1) return Expr::atom(p.arcs().front());
  std::vector<Expr> factors;
  for (auto it = p.arcs().rbegin(); it != p.arcs().rend(); ++it) factors.push_back(Expr::atom(*it));
  return Expr::mul(std::move(factors));
}

namespace {

using Terms = std::vector<std::pair<Complex, Path>>;

Terms expand(const Expr& e, const Quiver& q) {
  switch (e.kind()) {
    case ExprKind::Atom: return {{Complex(1.0, 0.0), Path::of_arc(q, e.name())}};
    case ExprKind::Id: return {{Complex(1.0, 0.0), Path::identity(q, e.name())}};
    case ExprKind::Zero: return {};
    case ExprKind::Scale: {
      Terms t = expand(e.child(), q);
      for (auto& term : t) term.first *= e.scalar();
      return t;
    }
    case ExprKind::Add: {
      Terms out;
      for (const auto& c : e.children()) {
        Terms t = expand(c, q);
        out.insert(out.end(), t.begin(), t.end());
      }
      return out;
    }
    case ExprKind::Mul: {
      const auto& kids = e.children();
      Terms acc = expand(kids.back(), q);
      for (std::size_t i = kids.size() - 1; i-- > 0;) {
        Terms outer = expand(kids[i], q);
        Terms next;
        next.reserve(acc.size() * outer.size());
        for (const auto& a : acc) {
          for (const auto& b : outer) next.emplace_back(a.first * b.first, compose_paths(a.second, b.second));
        }
        acc = std::move(next);
      }
      return acc;
    }
    case ExprKind::Inv:
      throw Error("to_monomials: expression contains an inverse: " + e.render());
  }
  return {};
}

}  // namespace

FreeMapDef zero_map(const Quiver& source, const Quiver& target, VertexMap identification) {
  VertexMap ident = complete_identification(source, target, std::move(identification));
  std::vector<Expr> entries;
  for (const auto& a : target.arcs()) entries.push_back(Expr::zero(ident.at(a.src), ident.at(a.dst)));
  return FreeMapDef(source, target, std::move(entries), std::move(ident));
}

std::vector<MonomialTerm> to_monomials(const FreeMapDef& f) {
  std::vector<MonomialTerm> out;
  const FreeMapDef zero = zero_map(f.source(), f.target(), f.identification());
  for (std::size_t i = 0; i < f.entries().size(); ++i) {
    Terms collected;
    for (auto& t : expand(f.entries()[i], f.source())) {
      auto it = std::find_if(collected.begin(), collected.end(),
                             [&](const auto& c) { return c.second == t.second; });
      if (it == collected.end()) {
        collected.push_back(std::move(t));
      } else {
        it->first += t.first;
      }
    }
    const std::string& arc = f.target().arcs()[i].name;
    for (auto& [k, path] : collected) {
      if (k == Complex(0.0, 0.0)) continue;
      std::vector<Expr> entries = zero.entries();
      entries[i] = path_expr(path);
      out.push_back({k, arc, path,
                     FreeMapDef(f.source(), f.target(), std::move(entries), f.identification())});
    }
  }
  return out;
}

FreeMapDef from_monomials(const FreeMapDef& shape, const std::vector<MonomialTerm>& terms) {
  std::vector<std::vector<Expr>> parts(shape.target().arc_count());
  for (const auto& t : terms) {
    parts[shape.target().arc_index(t.target_arc)].push_back(Expr::scale(t.coefficient, path_expr(t.path)));
  }
  const FreeMapDef zero = zero_map(shape.source(), shape.target(), shape.identification());
  std::vector<Expr> entries;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].empty()) {
      entries.push_back(zero.entries()[i]);
    } else if (parts[i].size() == 1) {
      entries.push_back(parts[i].front());
    } else {
      entries.push_back(Expr::add(std::move(parts[i])));
    }
  }
  return FreeMapDef(shape.source(), shape.target(), std::move(entries), shape.identification());
}

std::optional<std::size_t> degree(const FreeMapDef& f) {
  if (!f.is_polynomial()) return std::nullopt;
  std::size_t d = 0;
  for (const auto& t : to_monomials(f)) d = std::max(d, t.path.length());
  return d;
}

Rep conjugate_target(const FreeMapDef& f, const Rep& image, const NatAuto& s) {
  std::vector<Matrix> per_target;
  for (std::size_t v : f.vertex_map()) per_target.push_back(s.s()[v]);
  return conjugate(image, NatAuto(std::move(per_target)));
}

}  // namespace freequiver
