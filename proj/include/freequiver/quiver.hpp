#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace freequiver {

struct Arc {
  std::string name;
  std::string src;
  std::string dst;

  bool operator==(const Arc&) const = default;
};

enum class QuiverIssueKind { NoVertices, DuplicateName, DanglingEndpoint };

struct QuiverIssue {
  QuiverIssueKind kind;
  std::string message;
};

/// Every violation of the quiver invariants, in declaration order. Empty iff valid.
std::vector<QuiverIssue> validate_quiver(std::span<const std::string> vertices,
                                         std::span<const Arc> arcs);

/// A finite multidigraph presenting a free (path) category.
///
/// Vertices and arcs keep their declaration order; that order fixes the
/// layout of representations, direction fields and derivative matrices.
class Quiver {
 public:
  /// Throws QuiverError carrying every issue found by validate_quiver.
  Quiver(std::vector<std::string> vertices, std::vector<Arc> arcs);

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }

  std::optional<std::size_t> find_vertex(const std::string& name) const;
  std::optional<std::size_t> find_arc(const std::string& name) const;
  bool has_vertex(const std::string& name) const { return find_vertex(name).has_value(); }
  bool has_arc(const std::string& name) const { return find_arc(name).has_value(); }

  /// Throw QuiverError for unknown names.
  std::size_t vertex_index(const std::string& name) const;
  std::size_t arc_index(const std::string& name) const;
  const Arc& arc(const std::string& name) const { return arcs_[arc_index(name)]; }

  bool operator==(const Quiver& other) const {
    return vertices_ == other.vertices_ && arcs_ == other.arcs_;
  }

 private:
  std::vector<std::string> vertices_;
  std::vector<Arc> arcs_;
};

/// A morphism of the free category: arcs stored in application order (first
/// element applied first). The empty sequence is the identity at src == dst.
class Path {
 public:
  static Path identity(const Quiver& q, const std::string& vertex);
  static Path of_arc(const Quiver& q, const std::string& arc);
  /// Throws QuiverError on unknown arcs or non-composable neighbours.
  static Path of(const Quiver& q, std::vector<std::string> arcs_in_application_order);

  const std::vector<std::string>& arcs() const { return arcs_; }
  const std::string& src() const { return src_; }
  const std::string& dst() const { return dst_; }
  std::size_t length() const { return arcs_.size(); }
  bool is_identity() const { return arcs_.empty(); }

  /// Function-composition order: [x, y] renders as "y x"; identity as "id{u}".
  std::string render() const;

  bool operator==(const Path&) const = default;

 private:
  Path(std::vector<std::string> arcs, std::string src, std::string dst)
      : arcs_(std::move(arcs)), src_(std::move(src)), dst_(std::move(dst)) {}
  friend Path compose_paths(const Path&, const Path&);

  std::vector<std::string> arcs_;
  std::string src_;
  std::string dst_;
};

/// p applied first, then r (r o p). Requires p.dst() == r.src().
Path compose_paths(const Path& p, const Path& r);

/// All paths src -> dst of length <= max_len, ordered lexicographically by
/// arc-index sequence (so the identity comes first).
std::vector<Path> enumerate_paths(const Quiver& q, const std::string& src, const std::string& dst,
                                  std::size_t max_len);

/// Same source and same target.
bool is_parallel(const Path& p, const Path& r);

struct Relation {
  Path lhs;
  Path rhs;
};

/// A quiver plus parallel path relations, presenting a non-free index category.
class RelationPresentation {
 public:
  RelationPresentation(Quiver quiver, std::vector<Relation> relations);

  const Quiver& quiver() const { return quiver_; }
  const std::vector<Relation>& relations() const { return relations_; }

 private:
  Quiver quiver_;
  std::vector<Relation> relations_;
};

}  // namespace freequiver
