#include "freequiver/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "freequiver/errors.hpp"
#include "freequiver/harness.hpp"
#include "freequiver/library_maps.hpp"

namespace freequiver {

namespace {

[[noreturn]] void fail(const std::string& what, const std::string& where) {
  throw DefinitionError(what, where.empty() ? "/" : where);
}

const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail("expected an object", where);
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field '") + key + "'", where);
  return *it;
}

std::string string_at(const Json& j, const std::string& where) {
  if (!j.is_string()) fail("expected a string", where);
  return j.get<std::string>();
}

Index index_at(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail("expected a non-negative integer", where);
  return static_cast<Index>(j.get<long long>());
}

Quiver named_quiver(const std::string& name, const std::string& where) {
  if (auto q = builtin_quiver(name)) return *q;
  fail("unknown built-in quiver '" + name + "'", where);
}

}  // namespace

std::optional<Quiver> builtin_quiver(std::string_view name) {
  if (name == "sch") return sch_quiver();
  if (name == "smw") return smw_quiver();
  if (name == "one_loop") return one_loop_quiver();
  if (name == "sch_diagonal") return Quiver({"u", "v"}, {{"x1", "u", "u"}, {"x2", "v", "v"}});
  if (name.substr(0, 6) == "loops:") {
    int d = 0;
    const auto digits = name.substr(6);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && d >= 1) return classical_embed(d);
  }
  return std::nullopt;
}

Quiver quiver_from_json(const Json& j, const std::string& where) {
  if (j.is_string()) return named_quiver(j.get<std::string>(), where);
  std::vector<std::string> vertices;
  const Json& vs = member(j, "vertices", where);
  if (!vs.is_array()) fail("expected an array of vertex names", where + "/vertices");
  for (std::size_t i = 0; i < vs.size(); ++i) {
    vertices.push_back(string_at(vs[i], where + "/vertices/" + std::to_string(i)));
  }
  std::vector<Arc> arcs;
  if (auto it = j.find("arcs"); it != j.end()) {
    if (!it->is_array()) fail("expected an array of arcs", where + "/arcs");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string at = where + "/arcs/" + std::to_string(i);
      const Json& a = (*it)[i];
      arcs.push_back({string_at(member(a, "name", at), at + "/name"),
                      string_at(member(a, "src", at), at + "/src"),
                      string_at(member(a, "dst", at), at + "/dst")});
    }
  }
  std::vector<QuiverIssue> issues = validate_quiver(vertices, arcs);
  if (!issues.empty()) fail(issues.front().message, where);
  return Quiver(std::move(vertices), std::move(arcs));
}

Complex scalar_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  fail("expected a number or [re, im]", where);
}

Matrix matrix_from_json(const Json& j, Index rows, Index cols, const std::string& where) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
    fail("expected " + std::to_string(rows) + " rows", where);
  }
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    const std::string rw = where + "/" + std::to_string(r);
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      fail("expected " + std::to_string(cols) + " entries", rw);
    }
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = scalar_from_json(row[static_cast<std::size_t>(c)], rw + "/" + std::to_string(c));
    }
  }
  return m;
}

Expr expr_from_json(const Json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return parse_expr(j.get<std::string>());
    } catch (const ParseError& e) {
      fail(e.what(), where);
    }
  }
  const std::string op = string_at(member(j, "op", where), where + "/op");
  const auto list = [&](const char* key) {
    const Json& arr = member(j, key, where);
    if (!arr.is_array() || arr.empty()) fail("expected a non-empty array", where + "/" + key);
    std::vector<Expr> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(expr_from_json(arr[i], where + "/" + key + "/" + std::to_string(i)));
    }
    return out;
  };
  if (op == "atom") return Expr::atom(string_at(member(j, "arc", where), where + "/arc"));
  if (op == "id") return Expr::id(string_at(member(j, "vertex", where), where + "/vertex"));
  if (op == "zero") {
    return Expr::zero(string_at(member(j, "src", where), where + "/src"),
                      string_at(member(j, "dst", where), where + "/dst"));
  }
  if (op == "add") return Expr::add(list("terms"));
  if (op == "mul") return Expr::mul(list("factors"));
  if (op == "scale") {
    return Expr::scale(scalar_from_json(member(j, "k", where), where + "/k"),
                       expr_from_json(member(j, "expr", where), where + "/expr"));
  }
  if (op == "inv") {
    InvMode mode = InvMode::TwoSided;
    if (auto it = j.find("mode"); it != j.end()) {
      const std::string m = string_at(*it, where + "/mode");
      if (m == "left") {
        mode = InvMode::Left;
      } else if (m == "right") {
        mode = InvMode::Right;
      } else if (m != "two_sided") {
        fail("unknown inverse mode '" + m + "'", where + "/mode");
      }
    }
    return Expr::inv(expr_from_json(member(j, "expr", where), where + "/expr"), mode);
  }
  fail("unknown op '" + op + "'", where + "/op");
}

namespace {

Rep rep_from_json(const Json& j) {
  const Quiver q = quiver_from_json(member(j, "quiver", ""), "/quiver");
  const Json& dj = member(j, "dims", "");
  if (!dj.is_object()) fail("expected a vertex -> dimension object", "/dims");
  std::vector<Index> dims;
  for (const auto& v : q.vertices()) {
    auto it = dj.find(v);
    if (it == dj.end()) fail("missing dimension for vertex '" + v + "'", "/dims");
    dims.push_back(index_at(*it, "/dims/" + v));
  }
  for (const auto& kv : dj.items()) {
    if (!q.has_vertex(kv.key())) fail("unknown vertex '" + kv.key() + "'", "/dims/" + kv.key());
  }
  const Json& mj = member(j, "mats", "");
  if (!mj.is_object()) fail("expected an arc -> matrix object", "/mats");
  std::vector<Matrix> mats;
  for (const auto& a : q.arcs()) {
    auto it = mj.find(a.name);
    if (it == mj.end()) fail("missing matrix for arc '" + a.name + "'", "/mats");
    mats.push_back(matrix_from_json(*it, dims[q.vertex_index(a.dst)], dims[q.vertex_index(a.src)],
                                    "/mats/" + a.name));
  }
  for (const auto& kv : mj.items()) {
    if (!q.has_arc(kv.key())) fail("unknown arc '" + kv.key() + "'", "/mats/" + kv.key());
  }
  return Rep(q, std::move(dims), std::move(mats));
}

VertexMap identification_from_json(const Json& j) {
  VertexMap out;
  if (auto it = j.find("identification"); it != j.end()) {
    if (!it->is_object()) fail("expected a target -> source vertex object", "/identification");
    for (const auto& kv : it->items()) {
      out.emplace(kv.key(), string_at(kv.value(), "/identification/" + kv.key()));
    }
  }
  return out;
}

FreeMapDef map_from_json(const Json& j) {
  const Quiver source = quiver_from_json(member(j, "source", ""), "/source");
  const Quiver target = quiver_from_json(member(j, "target", ""), "/target");
  const Json& ej = member(j, "entries", "");
  if (!ej.is_object()) fail("expected an arc -> expression object", "/entries");
  std::map<std::string, Expr> entries;
  for (const auto& kv : ej.items()) {
    if (!target.has_arc(kv.key())) fail("unknown target arc '" + kv.key() + "'", "/entries/" + kv.key());
    entries.emplace(kv.key(), expr_from_json(kv.value(), "/entries/" + kv.key()));
  }
  for (const auto& a : target.arcs()) {
    if (!entries.count(a.name)) fail("missing entry for target arc '" + a.name + "'", "/entries");
  }
  try {
    return FreeMapDef(source, target, entries, identification_from_json(j));
  } catch (const TypeError& e) {
    const auto colon = e.location().find(':');
    fail(e.message() + " (node " + e.location() + ")",
         "/entries/" + e.location().substr(0, colon));
  } catch (const QuiverError& e) {
    fail(e.what(), "/identification");
  }
}

ProductSpec product_from_json(const Json& j) {
  ProductSpec spec{quiver_from_json(member(j, "p", ""), "/p"),
                   quiver_from_json(member(j, "q", ""), "/q"),
                   quiver_from_json(member(j, "r", ""), "/r"),
                   {},
                   true};
  if (auto it = j.find("left_multiplication"); it != j.end()) {
    if (!it->is_boolean()) fail("expected a boolean", "/left_multiplication");
    spec.left_multiplication = it->get<bool>();
  }
  const Json& pj = member(j, "pairs", "");
  if (!pj.is_object()) fail("expected an arc -> [p_arc, q_arc] object", "/pairs");
  for (const auto& a : spec.r.arcs()) {
    auto it = pj.find(a.name);
    const std::string at = "/pairs/" + a.name;
    if (it == pj.end()) fail("missing pair for arc '" + a.name + "'", "/pairs");
    if (!it->is_array() || it->size() != 2) fail("expected [p_arc, q_arc]", at);
    spec.pairs.push_back({string_at((*it)[0], at + "/0"), string_at((*it)[1], at + "/1")});
  }
  try {
    validate_product_spec(spec);
  } catch (const QuiverError& e) {
    fail(e.what(), "/pairs");
  }
  return spec;
}

}  // namespace

Definition parse_definition(const Json& j) {
  const std::string kind = string_at(member(j, "kind", ""), "/kind");
  if (kind == "quiver") return quiver_from_json(j, "");
  if (kind == "rep") return rep_from_json(j);
  if (kind == "map") return map_from_json(j);
  if (kind == "product") return product_from_json(j);
  fail("unknown kind '" + kind + "'", "/kind");
}

Definition parse_definition_text(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
  return parse_definition(j);
}

Definition parse_definition_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_definition_text(buf.str());
}

Json quiver_to_json(const Quiver& q) {
  Json arcs = Json::array();
  for (const auto& a : q.arcs()) arcs.push_back({{"name", a.name}, {"src", a.src}, {"dst", a.dst}});
  return {{"kind", "quiver"}, {"vertices", q.vertices()}, {"arcs", std::move(arcs)}};
}

Json scalar_to_json(Complex k) {
  // -0 would print as "-0.0"; normalize so equal values serialize equally.
  const double re = k.real() == 0.0 ? 0.0 : k.real();
  const double im = k.imag() == 0.0 ? 0.0 : k.imag();
  return Json::array({re, im});
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json expr_to_json(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Atom: return {{"op", "atom"}, {"arc", e.name()}};
    case ExprKind::Id: return {{"op", "id"}, {"vertex", e.name()}};
    case ExprKind::Zero: return {{"op", "zero"}, {"src", e.name()}, {"dst", e.zero_dst()}};
    case ExprKind::Scale:
      return {{"op", "scale"}, {"k", scalar_to_json(e.scalar())}, {"expr", expr_to_json(e.child())}};
    case ExprKind::Inv:
      return {{"op", "inv"}, {"mode", std::string(to_string(e.inv_mode()))}, {"expr", expr_to_json(e.child())}};
    case ExprKind::Add:
    case ExprKind::Mul: {
      Json kids = Json::array();
      for (const auto& c : e.children()) kids.push_back(expr_to_json(c));
      const bool add = e.kind() == ExprKind::Add;
      return {{"op", add ? "add" : "mul"}, {add ? "terms" : "factors", std::move(kids)}};
    }
  }
  return nullptr;
}

Json rep_to_json(const Rep& x) {
  Json dims = Json::object();
  for (std::size_t v = 0; v < x.quiver().vertex_count(); ++v) dims[x.quiver().vertices()[v]] = x.dim(v);
  Json mats = Json::object();
  for (std::size_t a = 0; a < x.quiver().arc_count(); ++a) {
    mats[x.quiver().arcs()[a].name] = matrix_to_json(x.mat(a));
  }
  Json q = quiver_to_json(x.quiver());
  q.erase("kind");
  return {{"kind", "rep"}, {"quiver", std::move(q)}, {"dims", std::move(dims)}, {"mats", std::move(mats)}};
}

Json map_to_json(const FreeMapDef& f) {
  Json src = quiver_to_json(f.source());
  Json dst = quiver_to_json(f.target());
  src.erase("kind");
  dst.erase("kind");
  Json entries = Json::object();
  for (std::size_t i = 0; i < f.entries().size(); ++i) {
    entries[f.target().arcs()[i].name] = f.entries()[i].render();
  }
  Json out = {{"kind", "map"}, {"source", std::move(src)}, {"target", std::move(dst)}};
  bool trivial = true;
  for (const auto& kv : f.identification()) trivial = trivial && kv.first == kv.second;
  if (!trivial) out["identification"] = f.identification();
  out["entries"] = std::move(entries);
  return out;
}

Json product_to_json(const ProductSpec& spec) {
  Json pairs = Json::object();
  for (std::size_t i = 0; i < spec.pairs.size(); ++i) {
    pairs[spec.r.arcs()[i].name] = Json::array({spec.pairs[i].p_arc, spec.pairs[i].q_arc});
  }
  Json p = quiver_to_json(spec.p);
  Json q = quiver_to_json(spec.q);
  Json r = quiver_to_json(spec.r);
  for (Json* x : {&p, &q, &r}) x->erase("kind");
  return {{"kind", "product"},        {"p", std::move(p)},
          {"q", std::move(q)},        {"r", std::move(r)},
          {"pairs", std::move(pairs)}, {"left_multiplication", spec.left_multiplication}};
}

Json definition_to_json(const Definition& d) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Quiver>) return quiver_to_json(v);
        else if constexpr (std::is_same_v<T, Rep>) return rep_to_json(v);
        else if constexpr (std::is_same_v<T, FreeMapDef>) return map_to_json(v);
        else return product_to_json(v);
      },
      d);
}

}  // namespace freequiver
