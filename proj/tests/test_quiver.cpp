#include <gtest/gtest.h>

#include <cmath>

#include "freequiver/errors.hpp"
#include "freequiver/harness.hpp"
#include "freequiver/library_maps.hpp"
#include "freequiver/quiver.hpp"

using namespace freequiver;

namespace {

std::vector<std::string> rendered(const std::vector<Path>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(p.render());
  return out;
}

}  // namespace

TEST(ValidateQuiver, TwoLoopsOnOneVertexIsValid) {
  const std::vector<std::string> v = {"u"};
  const std::vector<Arc> a = {{"x", "u", "u"}, {"y", "u", "u"}};
  EXPECT_TRUE(validate_quiver(v, a).empty());
}

TEST(ValidateQuiver, DanglingEndpoint) {
  const std::vector<std::string> v = {"u"};
  const std::vector<Arc> a = {{"x", "w", "u"}};
  auto issues = validate_quiver(v, a);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].kind, QuiverIssueKind::DanglingEndpoint);
  EXPECT_NE(issues[0].message.find("dangling endpoint"), std::string::npos);
}

TEST(ValidateQuiver, DuplicateArcName) {
  const std::vector<std::string> v = {"u", "v"};
  const std::vector<Arc> a = {{"x", "u", "v"}, {"x", "v", "u"}};
  auto issues = validate_quiver(v, a);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].kind, QuiverIssueKind::DuplicateName);
  EXPECT_NE(issues[0].message.find("duplicate name"), std::string::npos);
}

TEST(ValidateQuiver, ReportsEveryViolation) {
  const std::vector<std::string> v = {"u", "u"};
  const std::vector<Arc> a = {{"x", "w", "u"}, {"x", "u", "z"}};
  EXPECT_EQ(validate_quiver(v, a).size(), 4u);
  EXPECT_EQ(validate_quiver({}, {}).front().kind, QuiverIssueKind::NoVertices);
}

TEST(ValidateQuiver, ConstructorThrowsWithIssues) {
  try {
    Quiver({"u"}, {{"x", "u", "w"}});
    FAIL() << "expected QuiverError";
  } catch (const QuiverError& e) {
    EXPECT_EQ(e.issues().size(), 1u);
  }
  EXPECT_NO_THROW(Quiver({"u"}, {}));
}

TEST(ComposePaths, RendersRightToLeft) {
  const Quiver q({"u", "v", "w"}, {{"x", "u", "v"}, {"y", "v", "w"}});
  const Path p = compose_paths(Path::of_arc(q, "x"), Path::of_arc(q, "y"));
  EXPECT_EQ(p.arcs(), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(p.src(), "u");
  EXPECT_EQ(p.dst(), "w");
  EXPECT_EQ(p.render(), "y x");
}

TEST(ComposePaths, IdentityIsNeutral) {
  const Quiver q({"u", "v"}, {{"x", "u", "v"}});
  const Path x = Path::of_arc(q, "x");
  EXPECT_EQ(compose_paths(Path::identity(q, "u"), x), x);
  EXPECT_EQ(compose_paths(x, Path::identity(q, "v")), x);
  EXPECT_EQ(Path::identity(q, "u").render(), "id{u}");
}

TEST(ComposePaths, SchRoundTrip) {
  const Quiver q = sch_quiver();
  const Path p = compose_paths(Path::of_arc(q, "x21"), Path::of_arc(q, "x12"));
  EXPECT_EQ(p.arcs(), (std::vector<std::string>{"x21", "x12"}));
  EXPECT_EQ(p.src(), "u");
  EXPECT_EQ(p.dst(), "u");
  EXPECT_EQ(p.render(), "x12 x21");
}

TEST(ComposePaths, RejectsNonComposable) {
  const Quiver q = sch_quiver();
  EXPECT_THROW(compose_paths(Path::of_arc(q, "x12"), Path::of_arc(q, "x12")), QuiverError);
  EXPECT_THROW(Path::of(q, {"x12", "x12"}), QuiverError);
  EXPECT_THROW(Path::of(q, {"nope"}), QuiverError);
}

TEST(EnumeratePaths, SchLoopsAtU) {
  const auto paths = enumerate_paths(sch_quiver(), "u", "u", 2);
  EXPECT_EQ(rendered(paths), (std::vector<std::string>{"id{u}", "x1", "x1 x1", "x12 x21"}));
}

TEST(EnumeratePaths, SchUtoV) {
  const auto paths = enumerate_paths(sch_quiver(), "u", "v", 1);
  EXPECT_EQ(rendered(paths), (std::vector<std::string>{"x21"}));
}

TEST(EnumeratePaths, LengthZeroIsIdentityOnly) {
  const auto paths = enumerate_paths(sch_quiver(), "v", "v", 0);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_TRUE(paths[0].is_identity());
  EXPECT_TRUE(enumerate_paths(sch_quiver(), "u", "v", 0).empty());
}

// Independent count: closed walks in the Sch graph via powers of the adjacency matrix.
TEST(EnumeratePaths, CountsMatchAdjacencyPowers) {
  const Quiver q = sch_quiver();
  long long adj[2][2] = {{1, 1}, {1, 1}};  // u->u, v->u, u->v, v->v, one arc each
  for (std::size_t len = 0; len <= 5; ++len) {
    long long power[2][2] = {{1, 0}, {0, 1}};
    long long total[2][2] = {{1, 0}, {0, 1}};
    for (std::size_t k = 1; k <= len; ++k) {
      long long next[2][2] = {{0, 0}, {0, 0}};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int m = 0; m < 2; ++m) next[i][j] += power[i][m] * adj[m][j];
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          power[i][j] = next[i][j];
          total[i][j] += next[i][j];
        }
    }
    const char* names[] = {"u", "v"};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        EXPECT_EQ(static_cast<long long>(enumerate_paths(q, names[i], names[j], len).size()), total[i][j]);
      }
  }
}

TEST(EnumeratePaths, FreeMonoidWordCount) {
  for (int d = 2; d <= 4; ++d) {
    for (std::size_t len = 0; len <= 4; ++len) {
      const auto n = enumerate_paths(classical_embed(d), "u", "u", len).size();
      const double want = (std::pow(d, static_cast<double>(len) + 1) - 1) / (d - 1);
      EXPECT_EQ(static_cast<double>(n), want) << "d=" << d << " len=" << len;
    }
  }
}

TEST(EnumeratePaths, LexicographicByArcIndex) {
  const auto paths = enumerate_paths(classical_embed(2), "u", "u", 2);
  EXPECT_EQ(rendered(paths),
            (std::vector<std::string>{"id{u}", "x", "x x", "y x", "y", "x y", "y y"}));
}

TEST(PathProperties, CompositionIsAssociative) {
  const Quiver q = sch_quiver();
  std::vector<Path> all;
  for (const auto& s : q.vertices())
    for (const auto& t : q.vertices())
      for (auto& p : enumerate_paths(q, s, t, 2)) all.push_back(p);
  int triples = 0;
  for (const auto& a : all)
    for (const auto& b : all) {
      if (a.dst() != b.src()) continue;
      for (const auto& c : all) {
        if (b.dst() != c.src()) continue;
        EXPECT_EQ(compose_paths(compose_paths(a, b), c), compose_paths(a, compose_paths(b, c)));
        ++triples;
      }
    }
  EXPECT_GT(triples, 100);
}

TEST(PathProperties, ParallelismIsAnEquivalence) {
  const Quiver q = sch_quiver();
  std::vector<Path> all;
  for (const auto& s : q.vertices())
    for (const auto& t : q.vertices())
      for (auto& p : enumerate_paths(q, s, t, 2)) all.push_back(p);
  for (const auto& a : all) {
    EXPECT_TRUE(is_parallel(a, a));
    for (const auto& b : all) {
      EXPECT_EQ(is_parallel(a, b), is_parallel(b, a));
      if (!is_parallel(a, b)) continue;
      for (const auto& c : all) {
        if (is_parallel(b, c)) EXPECT_TRUE(is_parallel(a, c));
      }
    }
  }
}

TEST(IsParallel, Examples) {
  const Quiver q = sch_quiver();
  EXPECT_TRUE(is_parallel(Path::of_arc(q, "x1"), Path::of(q, {"x21", "x12"})));
  EXPECT_FALSE(is_parallel(Path::of_arc(q, "x1"), Path::of_arc(q, "x21")));
  EXPECT_TRUE(is_parallel(Path::identity(q, "u"), Path::identity(q, "u")));
}

TEST(RelationPresentation, RequiresParallelSides) {
  const Quiver q = sch_quiver();
  EXPECT_THROW(RelationPresentation(q, {{Path::of_arc(q, "x1"), Path::of_arc(q, "x21")}}), QuiverError);
  EXPECT_NO_THROW(RelationPresentation(q, {{Path::of_arc(q, "x1"), Path::of(q, {"x21", "x12"})}}));
}

TEST(ClassicalEmbed, ArcNames) {
  EXPECT_EQ(classical_embed(1).arcs().front().name, "x");
  EXPECT_EQ(classical_embed(2).arc_count(), 2u);
  EXPECT_EQ(classical_embed(3).arcs()[2].name, "z");
  EXPECT_EQ(classical_embed(5).arcs()[4].name, "x5");
  EXPECT_THROW(classical_embed(0), QuiverError);
}
