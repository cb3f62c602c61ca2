#include "freequiver/product.hpp"

#include "freequiver/errors.hpp"

namespace freequiver {

void validate_product_spec(const ProductSpec& spec) {
  if (spec.pairs.size() != spec.r.arc_count()) {
    throw QuiverError("product spec needs one pair per target arc");
  }
  for (std::size_t i = 0; i < spec.pairs.size(); ++i) {
    const Arc& r = spec.r.arcs()[i];
    const auto& pair = spec.pairs[i];
    if (!spec.p.has_arc(pair.p_arc)) throw QuiverError("unknown P arc '" + pair.p_arc + "'");
    if (!spec.q.has_arc(pair.q_arc)) throw QuiverError("unknown Q arc '" + pair.q_arc + "'");
    const Arc& pa = spec.p.arc(pair.p_arc);
    const Arc& qa = spec.q.arc(pair.q_arc);
    const Arc& first = spec.left_multiplication ? qa : pa;
    const Arc& second = spec.left_multiplication ? pa : qa;
    if (first.dst != second.src) {
      throw QuiverError("product pair for '" + r.name + "' is not composable: " + first.name +
                        " ends at " + first.dst + ", " + second.name + " starts at " + second.src);
    }
    if (first.src != r.src || second.dst != r.dst) {
      throw QuiverError("product pair for '" + r.name + "' runs " + first.src + "->" + second.dst +
                        " but the arc runs " + r.src + "->" + r.dst);
    }
  }
}

JoinedQuiver join_quivers(const Quiver& a, const Quiver& b) {
  std::vector<std::string> vertices = a.vertices();
  for (const auto& v : b.vertices()) {
    if (!a.has_vertex(v)) vertices.push_back(v);
  }
  std::vector<Arc> arcs = a.arcs();
  std::map<std::string, std::string> renamed;
  auto taken = [&arcs, &b](const std::string& name, const std::string& own) {
    for (const auto& x : arcs) {
      if (x.name == name) return true;
    }
    return name != own && b.has_arc(name);
  };
  for (const auto& arc : b.arcs()) {
    std::string name = arc.name;
    while (taken(name, arc.name)) name += "'";
    renamed.emplace(arc.name, name);
    arcs.push_back({name, arc.src, arc.dst});
  }
  return {Quiver(std::move(vertices), std::move(arcs)), std::move(renamed)};
}

Rep join_reps(const JoinedQuiver& joined, const Rep& x, const Rep& y) {
  const Quiver& q = joined.quiver;
  std::vector<Index> dims;
  for (const auto& v : q.vertices()) {
    const bool in_x = x.quiver().has_vertex(v);
    const bool in_y = y.quiver().has_vertex(v);
    if (in_x && in_y && x.dim(v) != y.dim(v)) {
      throw ShapeError("join_reps: vertex '" + v + "' has dimension " + std::to_string(x.dim(v)) +
                       " and " + std::to_string(y.dim(v)));
    }
    dims.push_back(in_x ? x.dim(v) : y.dim(v));
  }
  std::vector<Matrix> mats = x.mats();
  mats.insert(mats.end(), y.mats().begin(), y.mats().end());
  return Rep(q, std::move(dims), std::move(mats));
}

Rep rep_product(const ProductSpec& spec, const Rep& fx, const Rep& gy) {
  std::vector<Index> dims;
  for (const auto& v : spec.r.vertices()) {
    dims.push_back(fx.quiver().has_vertex(v) ? fx.dim(v) : gy.dim(v));
  }
  std::vector<Matrix> mats;
  for (const auto& pair : spec.pairs) {
    const Matrix& a = fx.mat(pair.p_arc);
    const Matrix& b = gy.mat(pair.q_arc);
    if (spec.left_multiplication) {
      if (a.cols() != b.rows()) throw ShapeError("rep_product: inner dimensions differ");
      mats.push_back(a * b);
    } else {
      if (b.cols() != a.rows()) throw ShapeError("rep_product: inner dimensions differ");
      mats.push_back(b * a);
    }
  }
  return Rep(spec.r, std::move(dims), std::move(mats));
}

ProductMap product_maps(const ProductSpec& spec, const FreeMapDef& f, const FreeMapDef& g) {
  validate_product_spec(spec);
  if (!(f.target() == spec.p)) throw QuiverError("product_maps: f does not target P");
  if (!(g.target() == spec.q)) throw QuiverError("product_maps: g does not target Q");
  JoinedQuiver joined = join_quivers(f.source(), g.source());
  const auto rename = [&joined](const Expr& e) -> Expr {
    if (e.kind() == ExprKind::Atom) return Expr::atom(joined.b_arcs.at(e.name()));
    return e;
  };
  std::vector<Expr> entries;
  for (const auto& pair : spec.pairs) {
    Expr fe = f.entry(pair.p_arc);
    Expr ge = map_leaves(g.entry(pair.q_arc), rename);
    entries.push_back(spec.left_multiplication ? Expr::mul({fe, ge}) : Expr::mul({ge, fe}));
  }
  VertexMap ident;
  for (const auto& v : spec.r.vertices()) {
    ident.emplace(v, spec.p.has_vertex(v) ? f.identify(v) : g.identify(v));
  }
  FreeMapDef map(joined.quiver, spec.r, std::move(entries), std::move(ident));
  return {std::move(joined), std::move(map)};
}

Quiver adjoint_quiver(const Quiver& q) {
  std::vector<Arc> arcs;
  for (const auto& a : q.arcs()) arcs.push_back({a.name + "*", a.dst, a.src});
  return Quiver(q.vertices(), std::move(arcs));
}

Rep adjoint_rep(const Rep& x) {
  std::vector<Matrix> mats;
  for (const auto& m : x.mats()) mats.push_back(m.adjoint());
  return Rep(adjoint_quiver(x.quiver()), x.dims(), std::move(mats));
}

ProductSpec hermitian_square_spec(const Quiver& q) {
  std::vector<Arc> loops;
  std::vector<ProductSpec::Pair> pairs;
  for (const auto& a : q.arcs()) {
    loops.push_back({a.name, a.src, a.src});
    pairs.push_back({a.name + "*", a.name});
  }
  ProductSpec spec{adjoint_quiver(q), q, Quiver(q.vertices(), std::move(loops)), std::move(pairs), true};
  validate_product_spec(spec);
  return spec;
}

}  // namespace freequiver
