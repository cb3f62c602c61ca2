#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "freequiver/free_map.hpp"

namespace freequiver {

/// One vertex u with d loops: x for d = 1; x, y for d = 2; x, y, z for d = 3;
/// x1 .. xd otherwise.
Quiver classical_embed(int d);

/// Endomorphism of q whose entry for arc a is a sum of `terms` distinct paths
/// parallel to a, of length <= max_degree, with standard complex normal
/// coefficients. The pool includes the arc itself and, for loops, the identity.
FreeMapDef random_polynomial_map(const Quiver& q, int max_degree, std::uint64_t seed, int terms = 4);

enum class CheckKind { DirectSum, Similarity, Intertwine, LemmaPart1 };
std::string check_name(CheckKind kind);

struct TrialPlan {
  std::uint64_t master_seed = 0;
  int trials = 1;
  /// Trial t uses profile t mod size for x and (t + 1) mod size for y.
  std::vector<Dims> dim_profiles;
  double tolerance = 1e-7;
  std::vector<CheckKind> checks = {CheckKind::DirectSum, CheckKind::Similarity,
                                   CheckKind::Intertwine};
  /// Worker threads; results do not depend on it.
  int threads = 1;
};

struct CheckSummary {
  std::string name;
  int executed = 0;
  int passed = 0;
  int skipped = 0;
  double max_residual = 0.0;
  std::vector<std::uint64_t> failing_seeds;
  std::string note;
};

struct ConformanceReport {
  std::vector<CheckSummary> checks;
  double wall_seconds = 0.0;
  bool all_passed() const;
};

/// Stand-in for eval_map, so maps outside the expression language can be run
/// through the same checks.
using MapUnderTest = std::function<Rep(const Rep&)>;

/// Seed of one (trial, check) pair: mix_seed(master, trial, check name).
std::uint64_t trial_seed(std::uint64_t master, int trial, CheckKind kind);

ConformanceReport run_conformance(const FreeMapDef& f, const TrialPlan& plan);
/// `f` supplies quivers and regularity; `apply` replaces evaluation.
ConformanceReport run_conformance(const FreeMapDef& f, const TrialPlan& plan,
                                  const MapUnderTest& apply);

/// Residual of one trial; nullopt when the sampled point was skipped.
std::optional<double> run_check(const FreeMapDef& f, const MapUnderTest& apply, CheckKind kind,
                 const Dims& dx, const Dims& dy, std::uint64_t seed);

}  // namespace freequiver
