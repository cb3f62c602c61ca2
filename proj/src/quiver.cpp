#include "freequiver/quiver.hpp"

#include <functional>
#include <set>

#include "freequiver/errors.hpp"

namespace freequiver {

std::vector<QuiverIssue> validate_quiver(std::span<const std::string> vertices,
                                         std::span<const Arc> arcs) {
  std::vector<QuiverIssue> issues;
  if (vertices.empty()) {
    issues.push_back({QuiverIssueKind::NoVertices, "quiver has no vertices"});
  }
  std::set<std::string> seen_vertices;
  for (const auto& v : vertices) {
    if (!seen_vertices.insert(v).second) {
      issues.push_back({QuiverIssueKind::DuplicateName, "duplicate name: vertex '" + v + "'"});
    }
  }
  std::set<std::string> seen_arcs;
  for (const auto& a : arcs) {
    if (!seen_arcs.insert(a.name).second) {
      issues.push_back({QuiverIssueKind::DuplicateName, "duplicate name: arc '" + a.name + "'"});
    }
    for (const auto* end : {&a.src, &a.dst}) {
      if (!seen_vertices.contains(*end)) {
        issues.push_back({QuiverIssueKind::DanglingEndpoint,
                          "dangling endpoint: arc '" + a.name + "' uses undeclared vertex '" +
                              *end + "'"});
      }
    }
  }
  return issues;
}

Quiver::Quiver(std::vector<std::string> vertices, std::vector<Arc> arcs)
    : vertices_(std::move(vertices)), arcs_(std::move(arcs)) {
  auto issues = validate_quiver(vertices_, arcs_);
  if (!issues.empty()) {
    std::vector<std::string> messages;
    std::string what = "invalid quiver:";
    for (auto& issue : issues) {
      what += " " + issue.message + ";";
      messages.push_back(std::move(issue.message));
    }
    throw QuiverError(what, std::move(messages));
  }
}

std::optional<std::size_t> Quiver::find_vertex(const std::string& name) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i] == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Quiver::find_arc(const std::string& name) const {
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    if (arcs_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Quiver::vertex_index(const std::string& name) const {
  if (auto i = find_vertex(name)) return *i;
  throw QuiverError("unknown vertex '" + name + "'");
}

std::size_t Quiver::arc_index(const std::string& name) const {
  if (auto i = find_arc(name)) return *i;
  throw QuiverError("unknown arc '" + name + "'");
}

Path Path::identity(const Quiver& q, const std::string& vertex) {
  q.vertex_index(vertex);
  return Path({}, vertex, vertex);
}

Path Path::of_arc(const Quiver& q, const std::string& arc) {
  const Arc& a = q.arc(arc);
  return Path({a.name}, a.src, a.dst);
}

Path Path::of(const Quiver& q, std::vector<std::string> arcs) {
  if (arcs.empty()) throw QuiverError("Path::of needs at least one arc; use Path::identity");
  std::string src = q.arc(arcs.front()).src;
  std::string at = src;
  for (const auto& name : arcs) {
    const Arc& a = q.arc(name);
    if (a.src != at) {
      throw QuiverError("non-composable endpoints: arc '" + name + "' starts at '" + a.src +
                        "' but the path is at '" + at + "'");
    }
    at = a.dst;
  }
  return Path(std::move(arcs), std::move(src), std::move(at));
}

std::string Path::render() const {
  if (arcs_.empty()) return "id{" + src_ + "}";
  std::string out;
  for (auto it = arcs_.rbegin(); it != arcs_.rend(); ++it) {
    if (!out.empty()) out += ' ';
    out += *it;
  }
  return out;
}

Path compose_paths(const Path& p, const Path& r) {
  if (p.dst() != r.src()) {
    throw QuiverError("non-composable endpoints: " + p.render() + " ends at '" + p.dst() +
                      "' but " + r.render() + " starts at '" + r.src() + "'");
  }
  std::vector<std::string> arcs = p.arcs();
  arcs.insert(arcs.end(), r.arcs().begin(), r.arcs().end());
  return Path(std::move(arcs), p.src(), r.dst());
}

std::vector<Path> enumerate_paths(const Quiver& q, const std::string& src, const std::string& dst,
                                  std::size_t max_len) {
  q.vertex_index(src);
  q.vertex_index(dst);
  std::vector<Path> out;
  // Depth-first in arc-index order visits sequences in lexicographic order.
  std::vector<std::string> current;
  std::function<void(const std::string&)> walk = [&](const std::string& at) {
    if (at == dst) {
      out.push_back(current.empty() ? Path::identity(q, src) : Path::of(q, current));
    }
    if (current.size() == max_len) return;
    for (const Arc& a : q.arcs()) {
      if (a.src != at) continue;
      current.push_back(a.name);
      walk(a.dst);
      current.pop_back();
    }
  };
  walk(src);
  return out;
}

bool is_parallel(const Path& p, const Path& r) { return p.src() == r.src() && p.dst() == r.dst(); }

RelationPresentation::RelationPresentation(Quiver quiver, std::vector<Relation> relations)
    : quiver_(std::move(quiver)), relations_(std::move(relations)) {
  for (const auto& rel : relations_) {
    for (const Path* p : {&rel.lhs, &rel.rhs}) {
      for (const auto& arc : p->arcs()) quiver_.arc_index(arc);
    }
    if (!is_parallel(rel.lhs, rel.rhs)) {
      throw QuiverError("relation " + rel.lhs.render() + " = " + rel.rhs.render() +
                        " relates non-parallel paths");
    }
  }
}

}  // namespace freequiver
