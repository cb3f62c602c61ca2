#include "freequiver/harness.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <thread>

#include "freequiver/calculus.hpp"
#include "freequiver/errors.hpp"
#include "freequiver/rng.hpp"

namespace freequiver {

Quiver classical_embed(int d) {
  if (d < 1) throw QuiverError("classical_embed needs at least one loop");
  std::vector<Arc> arcs;
  static const char* const kSmall[] = {"x", "y", "z"};
  for (int i = 0; i < d; ++i) {
    std::string name = d <= 3 ? kSmall[i] : "x" + std::to_string(i + 1);
    arcs.push_back({std::move(name), "u", "u"});
  }
  return Quiver({"u"}, std::move(arcs));
}

FreeMapDef random_polynomial_map(const Quiver& q, int max_degree, std::uint64_t seed, int terms) {
  Rng rng(seed);
  std::vector<Expr> entries;
  for (const auto& a : q.arcs()) {
    std::vector<Path> pool = enumerate_paths(q, a.src, a.dst, static_cast<std::size_t>(std::max(max_degree, 1)));
    std::vector<Expr> chosen;
    for (int t = 0; t < terms && !pool.empty(); ++t) {
      const auto pick = static_cast<std::size_t>(rng.next_u64() % pool.size());
      chosen.push_back(Expr::scale(rng.complex_normal(), path_expr(pool[pick])));
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    entries.push_back(chosen.size() == 1 ? chosen.front() : Expr::add(std::move(chosen)));
  }
  return FreeMapDef(q, q, std::move(entries));
}

std::string check_name(CheckKind kind) {
  switch (kind) {
    case CheckKind::DirectSum: return "direct_sum";
    case CheckKind::Similarity: return "similarity";
    case CheckKind::Intertwine: return "intertwine";
    case CheckKind::LemmaPart1: return "lemma_part1";
  }
  return "?";
}

bool ConformanceReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckSummary& c) { return c.passed == c.executed; });
}

std::uint64_t trial_seed(std::uint64_t master, int trial, CheckKind kind) {
  return mix_seed(master, static_cast<std::uint64_t>(trial), check_name(kind));
}

namespace {

bool regular_at(const FreeMapDef& f, const Rep& x) {
  try {
    return is_regular(f, x).regular;
  } catch (const Error&) {
    return false;
  }
}

std::vector<Matrix> to_target(const FreeMapDef& f, const std::vector<Matrix>& per_source) {
  std::vector<Matrix> out;
  for (std::size_t v : f.vertex_map()) out.push_back(per_source[v]);
  return out;
}

bool identification_is_bijective(const FreeMapDef& f) {
  std::vector<std::size_t> seen = f.vertex_map();
  std::sort(seen.begin(), seen.end());
  return seen.size() == f.source().vertex_count() &&
         std::adjacent_find(seen.begin(), seen.end()) == seen.end();
}

// x (+) y conjugated by a random natural automorphism: contains a copy of x,
// so intertwiners from x into it exist and are not all zero.
Rep hidden_sum(const Rep& x, const Rep& y, std::uint64_t seed) {
  const Rep sum = direct_sum(x, y);
  return conjugate(sum, random_nat_auto(sum.quiver(), sum.dims(), seed));
}

}  // namespace

std::optional<double> run_check(const FreeMapDef& f, const MapUnderTest& apply, CheckKind kind,
                                const Dims& dx, const Dims& dy, std::uint64_t seed) {
  const Quiver& q = f.source();
  const Rep x = random_rep(q, dx, mix_seed(seed, 0, "x"));
  const Rep y = random_rep(q, dy, mix_seed(seed, 1, "y"));
  if (!regular_at(f, x)) return std::nullopt;
  switch (kind) {
    case CheckKind::DirectSum: {
      if (!regular_at(f, y)) return std::nullopt;
      return rep_difference(apply(direct_sum(x, y)), direct_sum(apply(x), apply(y)));
    }
    case CheckKind::Similarity: {
      const NatAuto s = random_nat_auto(q, x.dims(), mix_seed(seed, 2, "s"));
      const Rep moved = conjugate(x, s);
      if (!regular_at(f, moved)) return std::nullopt;
      return rep_difference(apply(moved), conjugate_target(f, apply(x), s));
    }
    case CheckKind::Intertwine: {
      const Rep z = hidden_sum(x, y, mix_seed(seed, 3, "t"));
      if (!regular_at(f, z)) return std::nullopt;
      const Rep fz = apply(z);
      const Rep fx = apply(x);
      double worst = 0.0;
      for (const NatTrans& g : intertwiner_space(z, x)) {
        worst = std::max(worst, intertwining_residual(fz, fx, to_target(f, g.gammas), 0.0).residual);
      }
      return worst;
    }
    case CheckKind::LemmaPart1: {
      if (!identification_is_bijective(f)) return std::nullopt;
      const Rep z = hidden_sum(x, y, mix_seed(seed, 3, "t"));
      if (!regular_at(f, z)) return std::nullopt;
      if (!ift_certificate(f, z).full_rank || !ift_certificate(f, x).full_rank) return std::nullopt;
      const Rep fz = apply(z);
      const Rep fx = apply(x);
      std::vector<std::size_t> back(f.source().vertex_count());
      for (std::size_t t = 0; t < f.vertex_map().size(); ++t) back[f.vertex_map()[t]] = t;
      double worst = 0.0;
      for (const NatTrans& g : intertwiner_space(fz, fx)) {
        std::vector<Matrix> per_source;
        for (std::size_t v = 0; v < back.size(); ++v) per_source.push_back(g.gammas[back[v]]);
        worst = std::max(worst, intertwining_residual(z, x, per_source, 0.0).residual);
      }
      return worst;
    }
  }
  return std::nullopt;
}

ConformanceReport run_conformance(const FreeMapDef& f, const TrialPlan& plan) {
  return run_conformance(f, plan, [&f](const Rep& x) { return eval_map(f, x); });
}

ConformanceReport run_conformance(const FreeMapDef& f, const TrialPlan& plan,
                                  const MapUnderTest& apply) {
  if (plan.trials < 1) throw Error("a trial plan needs at least one trial");
  if (plan.dim_profiles.empty()) throw Error("a trial plan needs at least one dimension profile");
  for (const auto& profile : plan.dim_profiles) dims_vector(f.source(), profile);

  const auto start = std::chrono::steady_clock::now();
  const std::size_t nchecks = plan.checks.size();
  const std::size_t trials = static_cast<std::size_t>(plan.trials);
  std::vector<std::optional<double>> results(nchecks * trials);
  std::vector<std::uint64_t> seeds(nchecks * trials);
  std::vector<std::string> errors(nchecks * trials);

  const auto work = [&](std::size_t job) {
    const std::size_t c = job / trials;
    const int t = static_cast<int>(job % trials);
    const std::size_t np = plan.dim_profiles.size();
    const Dims& dx = plan.dim_profiles[static_cast<std::size_t>(t) % np];
    const Dims& dy = plan.dim_profiles[static_cast<std::size_t>(t + 1) % np];
    seeds[job] = trial_seed(plan.master_seed, t, plan.checks[c]);
    try {
      results[job] = run_check(f, apply, plan.checks[c], dx, dy, seeds[job]);
    } catch (const std::exception& e) {
      results[job] = std::numeric_limits<double>::infinity();
      errors[job] = e.what();
    }
  };

  const std::size_t jobs = results.size();
  const std::size_t nthreads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(plan.threads, 1)), 1, jobs);
  if (nthreads == 1) {
    for (std::size_t j = 0; j < jobs; ++j) work(j);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nthreads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t j = w; j < jobs; j += nthreads) work(j);
      });
    }
    for (auto& th : pool) th.join();
  }

  ConformanceReport report;
  for (std::size_t c = 0; c < nchecks; ++c) {
    CheckSummary s;
    s.name = check_name(plan.checks[c]);
    if (plan.checks[c] == CheckKind::LemmaPart1) s.note = "conditional on sampled injectivity evidence";
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t job = c * trials + t;
      if (!results[job]) {
        ++s.skipped;
        continue;
      }
      ++s.executed;
      const double r = *results[job];
      s.max_residual = std::max(s.max_residual, r);
      if (r <= plan.tolerance) {
        ++s.passed;
      } else {
        s.failing_seeds.push_back(seeds[job]);
        if (!errors[job].empty() && s.note.empty()) s.note = errors[job];
      }
    }
    report.checks.push_back(std::move(s));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace freequiver
