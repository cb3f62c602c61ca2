#include "freequiver/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "freequiver/calculus.hpp"
#include "freequiver/errors.hpp"
#include "freequiver/harness.hpp"
#include "freequiver/io.hpp"
#include "freequiver/library_maps.hpp"
#include "freequiver/rng.hpp"

namespace freequiver::cli {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = s.find(sep, start);
    out.push_back(trim(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start)));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

}  // namespace

Dims parse_dims(std::string_view text) {
  Dims dims;
  for (const auto& item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Error("malformed dims item '" + item + "' (want vertex=n)");
    const std::string name = trim(item.substr(0, eq));
    const std::string value = trim(item.substr(eq + 1));
    long long n = -1;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc() || ptr != value.data() + value.size() || n < 0) {
      throw Error("malformed dimension '" + value + "' for vertex '" + name + "'");
    }
    if (!dims.emplace(name, static_cast<Index>(n)).second) throw Error("vertex '" + name + "' given twice");
  }
  return dims;
}

std::vector<Dims> parse_dim_profiles(std::string_view text) {
  std::vector<Dims> out;
  for (const auto& p : split(text, ';')) out.push_back(parse_dims(p));
  return out;
}

std::vector<Complex> parse_poly(std::string_view text) {
  std::vector<Complex> out;
  for (const auto& item : split(text, ',')) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error("malformed coefficient '" + item + "'");
    }
    out.emplace_back(v, 0.0);
  }
  return out;
}

namespace {

struct Options {
  std::string command;
  std::string demo;
  std::string map;
  std::string rep;
  std::optional<std::uint64_t> seed;
  std::string dims;
  std::optional<double> tol;
  int trials = 20;
  std::string format = "human";
  std::string out;
  std::string zero_arc;
  std::string poly;
  int n = 0;
  double eps = 1e-6;
  bool lemma = false;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string entry_text(Complex z) {
  char buf[64];
  if (z.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.6g", z.real() == 0.0 ? 0.0 : z.real());
  } else {
    std::snprintf(buf, sizeof buf, "%.6g%+.6gi", z.real(), z.imag());
  }
  return buf;
}

class Report {
 public:
  explicit Report(bool machine) : machine_(machine) {}

  void header(const Options& o, std::uint64_t seed) {
    if (!machine_) return;
    Json args = Json::object();
    if (!o.demo.empty()) args["demo"] = o.demo;
    if (!o.map.empty()) args["map"] = o.map;
    if (!o.rep.empty()) args["rep"] = o.rep;
    if (!o.dims.empty()) args["dims"] = o.dims;
    if (!o.zero_arc.empty()) args["zero_arc"] = o.zero_arc;
    if (!o.poly.empty()) args["poly"] = o.poly;
    if (o.n > 0) args["n"] = o.n;
    if (o.tol) args["tol"] = *o.tol;
    if (o.command == "check-free") args["trials"] = o.trials;
    args["seed"] = seed;
    emit({{"record", "header"}, {"format", "freequiver-report"}, {"version", kReportVersion},
          {"command", o.command}, {"args", std::move(args)}});
  }

  void text(const std::string& line) {
    if (!machine_) body_ << line << '\n';
  }

  void record(Json j, const std::string& human = {}) {
    if (machine_) {
      emit(std::move(j));
    } else if (!human.empty()) {
      body_ << human << '\n';
    }
  }

  void check(const std::string& name, bool pass, Json details, const std::string& human_detail) {
    failed_ = failed_ || !pass;
    Json j = {{"record", "check"}, {"name", name}, {"pass", pass}};
    for (auto& kv : details.items()) j[kv.key()] = kv.value();
    record(std::move(j), "check " + name + ": " + (pass ? "PASS" : "FAIL") +
                             (human_detail.empty() ? "" : " (" + human_detail + ")"));
  }

  void residual_check(const std::string& name, double residual, double tol) {
    check(name, residual <= tol, {{"residual", residual}, {"tol", tol}},
          "residual " + sci(residual) + ", tol " + sci(tol));
  }

  void error(int code, const std::string& kind, const std::string& message) {
    failed_ = true;
    record({{"record", "error"}, {"kind", kind}, {"exit", code}, {"message", message}},
           "error (" + kind + "): " + message);
  }

  void matrix(const std::string& title, const Matrix& m) {
    if (machine_) return;
    body_ << title << " (" << m.rows() << "x" << m.cols() << ")\n";
    for (Index r = 0; r < m.rows(); ++r) {
      body_ << "  [";
      for (Index c = 0; c < m.cols(); ++c) body_ << (c ? ", " : "") << entry_text(m(r, c));
      body_ << "]\n";
    }
  }

  void finish(int code) {
    if (machine_) emit({{"record", "summary"}, {"status", code == kOk ? "pass" : "fail"}, {"exit", code}});
  }

  bool failed() const { return failed_; }
  std::string str() const { return body_.str(); }

 private:
  void emit(Json j) { body_ << j.dump() << '\n'; }

  bool machine_;
  bool failed_ = false;
  std::ostringstream body_;
};

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("FREEQUIVER_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("FREEQUIVER_SEED is not an integer");
    return v;
  }
  return 0;
}

std::optional<FreeMapDef> builtin_map(const std::string& name) {
  if (name == "schur") return schur_map();
  if (name == "ppt_d") return ppt_map(Pivot::D);
  if (name == "ppt_a") return ppt_map(Pivot::A);
  if (name == "block_inverse") return block_inverse_map();
  if (name == "smw_lhs") return smw_lhs();
  if (name == "smw_rhs") return smw_rhs();
  if (name == "cbh") return cbh_truncated(3);
  if (name == "rational_example") return rational_example_map();
  if (name == "derivative_example") return derivative_example_map();
  if (name.rfind("identity:", 0) == 0) {
    if (auto q = builtin_quiver(name.substr(9))) return identity_map(*q);
  }
  return std::nullopt;
}

FreeMapDef load_map(const std::string& spec) {
  if (spec.empty()) throw Error("--map is required");
  if (std::filesystem::exists(spec)) {
    Definition d = parse_definition_file(spec);
    if (auto* f = std::get_if<FreeMapDef>(&d)) return *f;
    throw DefinitionError("file does not define a map", "/kind");
  }
  if (auto f = builtin_map(spec)) return *f;
  throw Error("no map file or built-in map named '" + spec + "'");
}

Rep zero_arc(const Rep& x, const std::string& arc) {
  if (arc.empty()) return x;
  if (!x.quiver().has_arc(arc)) throw Error("--zero-arc: unknown arc '" + arc + "'");
  std::vector<Matrix> mats = x.mats();
  Matrix& m = mats[x.quiver().arc_index(arc)];
  m.setZero();
  return x.with_mats(std::move(mats));
}

Rep sample_point(const Quiver& q, const Options& o, std::uint64_t seed, const std::string& default_dims) {
  const std::string dims = o.dims.empty() ? default_dims : o.dims;
  if (dims.empty()) throw Error("--dims is required");
  return zero_arc(random_rep(q, parse_dims(dims), mix_seed(seed, 0, "point")), o.zero_arc);
}

Rep load_point(const FreeMapDef& f, const Options& o, std::uint64_t seed) {
  if (o.rep.empty()) return sample_point(f.source(), o, seed, "");
  Definition d = parse_definition_file(o.rep);
  auto* x = std::get_if<Rep>(&d);
  if (!x) throw DefinitionError("file does not define a representation", "/kind");
  if (!(x->quiver() == f.source())) throw DefinitionError("representation is not over the map's source quiver", "/quiver");
  return zero_arc(*x, o.zero_arc);
}

Json mats_json(const Rep& shape, const std::vector<Matrix>& mats) {
  Json j = Json::object();
  for (std::size_t a = 0; a < mats.size(); ++a) j[shape.quiver().arcs()[a].name] = matrix_to_json(mats[a]);
  return j;
}

void print_mats(Report& r, const Rep& shape, const std::vector<Matrix>& mats, const std::string& prefix) {
  for (std::size_t a = 0; a < mats.size(); ++a) r.matrix(prefix + shape.quiver().arcs()[a].name, mats[a]);
}

void cmd_eval(const Options& o, std::uint64_t seed, Report& r) {
  const FreeMapDef f = load_map(o.map);
  const Rep x = load_point(f, o, seed);
  const Rep image = eval_map(f, x);
  for (std::size_t i = 0; i < f.entries().size(); ++i) {
    r.text(f.target().arcs()[i].name + " = " + f.entries()[i].render());
  }
  print_mats(r, image, image.mats(), "");
  r.record({{"record", "image"}, {"rep", rep_to_json(image)}});
}

void cmd_derive(const Options& o, std::uint64_t seed, Report& r) {
  const FreeMapDef f = load_map(o.map);
  const Rep x = load_point(f, o, seed);
  const DirectionField h = random_direction(x, mix_seed(seed, 1, "direction"));
  const DirectionField d = directional_derivative(f, x, h.h);
  const DirectionField fd = finite_difference(f, x, h.h, o.eps);
  double worst = 0.0;
  for (std::size_t i = 0; i < d.h.size(); ++i) worst = std::max(worst, relative_difference(d.h[i], fd.h[i]));
  print_mats(r, d.base, d.h, "D");
  r.record({{"record", "derivative"}, {"direction", mats_json(x, h.h)}, {"mats", mats_json(d.base, d.h)}});
  r.residual_check("finite_difference", worst, o.tol.value_or(1e-4));
}

Json certificate_json(const IftCertificate& c) {
  std::vector<double> profile(c.profile.data(), c.profile.data() + c.profile.size());
  Json j = {{"record", "certificate"},
            {"status", c.full_rank ? "full_rank" : "collision"},
            {"sigma_min", c.sigma_min},
            {"sigma_max", c.sigma_max},
            {"kernel_dim", c.kernel_dim},
            {"threshold", c.threshold},
            {"profile", profile}};
  if (c.collision) {
    j["collision_residual"] = c.collision->image_residual;
    j["separation"] = c.collision->separation;
    j["verified"] = c.collision->verified;
  }
  return j;
}

std::string certificate_text(const IftCertificate& c) {
  std::string s = std::string(c.full_rank ? "full rank" : "collision") + ": sigma_min " + sci(c.sigma_min) +
                  ", sigma_max " + sci(c.sigma_max) + ", kernel dimension " + std::to_string(c.kernel_dim);
  if (c.collision) {
    s += "\ncollision residual " + sci(c.collision->image_residual) + ", separation " +
         sci(c.collision->separation) + (c.collision->verified ? ", verified" : ", NOT verified");
  }
  return s;
}

void cmd_certify(const Options& o, std::uint64_t seed, Report& r) {
  const FreeMapDef f = load_map(o.map);
  const Rep x = load_point(f, o, seed);
  const IftCertificate c = ift_certificate(f, x, o.tol.value_or(1e-8));
  r.record(certificate_json(c), certificate_text(c));
  const bool ok = c.full_rank || (c.collision && c.collision->verified);
  r.check("certificate", ok, Json::object(), c.full_rank ? "full rank" : "collision");
}

void report_conformance(Report& r, const ConformanceReport& rep, double tol) {
  for (const auto& c : rep.checks) {
    Json j = {{"executed", c.executed}, {"passed", c.passed}, {"skipped", c.skipped},
              {"max_residual", c.max_residual}, {"tol", tol}, {"failing_seeds", c.failing_seeds}};
    if (!c.note.empty()) j["note"] = c.note;
    std::string human = std::to_string(c.passed) + "/" + std::to_string(c.executed) + " passed, " +
                        std::to_string(c.skipped) + " skipped, max residual " + sci(c.max_residual);
    if (!c.note.empty()) human += ", " + c.note;
    r.check(c.name, c.passed == c.executed, std::move(j), human);
  }
  r.text("wall time " + sci(rep.wall_seconds) + " s");
}

void cmd_check_free(const Options& o, std::uint64_t seed, Report& r) {
  const FreeMapDef f = load_map(o.map);
  if (o.dims.empty()) throw Error("--dims is required");
  TrialPlan plan;
  plan.master_seed = seed;
  plan.trials = o.trials;
  plan.dim_profiles = parse_dim_profiles(o.dims);
  plan.tolerance = o.tol.value_or(1e-7);
  if (o.lemma) plan.checks.push_back(CheckKind::LemmaPart1);
  report_conformance(r, run_conformance(f, plan), plan.tolerance);
}

void demo_schur(const Options& o, std::uint64_t seed, Report& r) {
  const double tol = o.tol.value_or(1e-9);
  const FreeMapDef f = schur_map();
  const Rep x = sample_point(sch_quiver(), o, seed, "u=3,v=2");
  r.text("Sch(x) = " + f.entries()[0].render());
  const Matrix direct = x.mat("x1") - x.mat("x12") * x.mat("x2").partialPivLu().solve(x.mat("x21"));
  r.residual_check("schur_value", relative_difference(eval_map(f, x).mat(0), direct), tol);

  const DirectionField h = random_direction(x, mix_seed(seed, 1, "direction"));
  const Matrix automatic = directional_derivative(f, x, h.h).h[0];
  r.residual_check("dsch_closed_form", relative_difference(automatic, dsch_closed_form(x, h.h)), tol);

  const IftCertificate c = ift_certificate(f, zero_arc(x, "x21"));
  r.record(certificate_json(c), certificate_text(c));
  r.check("c_zero_collision", c.collision && c.collision->verified, Json::object(),
          c.collision ? "collision found" : "no collision");

  TrialPlan plan;
  plan.master_seed = seed;
  plan.trials = 5;
  plan.dim_profiles = {x.dims_by_name()};
  plan.tolerance = 1e-7;
  report_conformance(r, run_conformance(f, plan), plan.tolerance);
}

void demo_ppt(const Options& o, std::uint64_t seed, Report& r) {
  const double tol = o.tol.value_or(1e-9);
  const FreeMapDef f = ppt_map(Pivot::D);
  const Rep x = sample_point(sch_quiver(), o, seed, "u=3,v=2");
  for (std::size_t i = 0; i < f.entries().size(); ++i) {
    r.text(f.target().arcs()[i].name + " -> " + f.entries()[i].render());
  }
  r.residual_check("involution", rep_difference(eval_map(f, eval_map(f, x)), x), std::max(tol, 1e-8));

  const DirectionField h = random_direction(x, mix_seed(seed, 1, "direction"));
  const DirectionField d = directional_derivative(f, x, h.h);
  const std::vector<Matrix> closed = dppt_closed_form(x, h.h);
  double worst = 0.0;
  for (std::size_t i = 0; i < closed.size(); ++i) worst = std::max(worst, relative_difference(d.h[i], closed[i]));
  r.residual_check("dppt_closed_form", worst, tol);

  const IftCertificate c = ift_certificate(f, x);
  r.record(certificate_json(c), certificate_text(c));
  const double ratio = c.sigma_max > 0.0 ? c.sigma_min / c.sigma_max : 0.0;
  r.check("full_rank", c.full_rank && ratio >= 1e-6, {{"ratio", ratio}}, "sigma ratio " + sci(ratio));
}

void demo_block_inverse(const Options& o, std::uint64_t seed, Report& r) {
  const FreeMapDef f = block_inverse_map();
  for (std::size_t i = 0; i < f.entries().size(); ++i) {
    r.text(f.target().arcs()[i].name + " -> " + f.entries()[i].render());
  }
  const Rep x = sample_point(sch_quiver(), o, seed, "u=5,v=3");
  r.residual_check("block_inverse", block_inverse_check(x), o.tol.value_or(1e-9));
}

void demo_smw(const Options& o, std::uint64_t seed, Report& r) {
  const double tol = o.tol.value_or(1e-9);
  const Rep x = sample_point(smw_quiver(), o, seed, "u=5,v=1");
  r.text("(a + U c V)^-1 = " + smw_rhs().entries()[0].render());
  r.residual_check("smw", smw_check(x), tol);
  r.residual_check("smw_free_rational",
                   rep_difference(eval_map(smw_lhs(), x), eval_map(smw_rhs(), x)), tol);
}

void demo_cbh(const Options& o, std::uint64_t seed, Report& r) {
  Rng rng(mix_seed(seed, 0, "cbh"));
  const Matrix x = rng.ginibre(4, 4);
  const Matrix y = rng.ginibre(4, 4);
  r.text("Z = " + cbh_truncated(3).entries()[0].render());
  const CbhSweep s = cbh_sweep(x, y, {0.1, 0.05, 0.025});
  for (std::size_t i = 0; i < s.radii.size(); ++i) {
    r.record({{"record", "cbh_error"}, {"radius", s.radii[i]}, {"error", s.errors[i]}},
             "radius " + sci(s.radii[i]) + ": error " + sci(s.errors[i]));
  }
  const double order = *std::min_element(s.orders.begin(), s.orders.end());
  r.check("truncation_order", order >= 3.5, {{"order", order}, {"min_order", 3.5}}, "observed order " + sci(order));

  const Matrix xs = 0.1 * x / op_norm(x);
  const Matrix ys = xs * xs;
  const Rep z = eval_map(cbh_truncated(3), Rep(classical_embed(2), {4}, {xs, ys}));
  r.residual_check("commuting", relative_difference(z.mat(0), xs + ys), o.tol.value_or(1e-12));
}

void demo_nilpotent(const Options&, std::uint64_t, Report& r) {
  const std::vector<Complex> p = {1.0, 4.0, 0.0, 3.0};
  const std::vector<std::vector<double>> want = {{1, 4, 0}, {1, 4, 0, 3}};
  for (const auto& w : want) {
    const Index n = static_cast<Index>(w.size());
    const NilpotentResult res = nilpotent_coefficients(p, n);
    r.matrix("p(N" + std::to_string(n) + ")", res.value);
    bool exact = true;
    std::vector<double> row;
    for (Index j = 0; j < n; ++j) {
      row.push_back(res.top_row[static_cast<std::size_t>(j)].real());
      exact = exact && res.top_row[static_cast<std::size_t>(j)] == Complex(w[static_cast<std::size_t>(j)], 0.0);
    }
    r.check("top_row_n" + std::to_string(n), exact, {{"top_row", row}}, "");
  }
}

void cmd_demo(const Options& o, std::uint64_t seed, Report& r) {
  if (o.demo == "schur") return demo_schur(o, seed, r);
  if (o.demo == "ppt") return demo_ppt(o, seed, r);
  if (o.demo == "block-inverse") return demo_block_inverse(o, seed, r);
  if (o.demo == "smw") return demo_smw(o, seed, r);
  if (o.demo == "cbh") return demo_cbh(o, seed, r);
  if (o.demo == "nilpotent") return demo_nilpotent(o, seed, r);
  throw Error("unknown demo '" + o.demo + "' (schur, ppt, block-inverse, smw, cbh, nilpotent)");
}

void cmd_coeffs(const Options& o, std::uint64_t, Report& r) {
  if (o.poly.empty()) throw Error("--poly is required");
  if (o.n < 1) throw Error("--n must be >= 1");
  const NilpotentResult res = nilpotent_coefficients(parse_poly(o.poly), o.n);
  std::string line;
  Json row = Json::array();
  for (std::size_t j = 0; j < res.top_row.size(); ++j) {
    line += (j ? " " : "") + format_scalar(res.top_row[j]);
    if (res.top_row[j].imag() == 0.0) {
      row.push_back(res.top_row[j].real());
    } else {
      row.push_back(scalar_to_json(res.top_row[j]));
    }
  }
  r.record({{"record", "coeffs"}, {"n", o.n}, {"top_row", std::move(row)}}, line);
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "master seed (falls back to FREEQUIVER_SEED, then 0)");
  sub->add_option("--dims", o.dims, "dimensions, e.g. u=3,v=2 (check-free: profiles separated by ';')");
  sub->add_option("--tol", o.tol, "pass threshold");
  sub->add_option("--format", o.format, "human or machine")->check(CLI::IsMember({"human", "machine"}));
  sub->add_option("--out", o.out, "write the report to this file");
  sub->add_option("--zero-arc", o.zero_arc, "replace this arc's matrix by zero");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"free maps between quiver representations"};
  app.name("freequiver");
  app.require_subcommand(1);

  const auto with_map = [&](CLI::App* sub) {
    sub->add_option("--map", o.map, "map definition file or built-in name")->required();
    sub->add_option("--rep", o.rep, "representation file (default: random point from --dims)");
    add_common(sub, o);
  };
  CLI::App* eval = app.add_subcommand("eval", "evaluate a map");
  with_map(eval);
  CLI::App* derive = app.add_subcommand("derive", "directional derivative along a random direction");
  with_map(derive);
  derive->add_option("--eps", o.eps, "finite-difference step");
  CLI::App* certify = app.add_subcommand("certify", "inverse function theorem certificate");
  with_map(certify);
  CLI::App* check = app.add_subcommand("check-free", "randomized freeness conformance");
  with_map(check);
  check->add_option("--trials", o.trials, "trials per check")->check(CLI::PositiveNumber);
  check->add_flag("--lemma", o.lemma, "also run lemma_part1");
  CLI::App* demo = app.add_subcommand("demo", "built-in scenario");
  demo->add_option("name", o.demo, "schur | ppt | block-inverse | smw | cbh | nilpotent")->required();
  add_common(demo, o);
  CLI::App* coeffs = app.add_subcommand("coeffs", "read polynomial coefficients off a nilpotent matrix");
  coeffs->add_option("--poly", o.poly, "coefficients k0,k1,...")->required();
  coeffs->add_option("--n", o.n, "size of the nilpotent matrix")->required();
  add_common(coeffs, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  o.command = app.get_subcommands().front()->get_name();

  Report report(o.format == "machine");
  int code = kOk;
  try {
    const std::uint64_t seed = resolve_seed(o);
    report.header(o, seed);
    if (o.command == "eval") cmd_eval(o, seed, report);
    if (o.command == "derive") cmd_derive(o, seed, report);
    if (o.command == "certify") cmd_certify(o, seed, report);
    if (o.command == "check-free") cmd_check_free(o, seed, report);
    if (o.command == "demo") cmd_demo(o, seed, report);
    if (o.command == "coeffs") cmd_coeffs(o, seed, report);
    code = report.failed() ? kCheckFailed : kOk;
  } catch (const RegularityError& e) {
    code = kRegularityError;
    report.error(code, "regularity", e.what());
    err << "freequiver: " << e.what() << '\n';
  } catch (const std::exception& e) {
    code = kInputError;
    report.error(code, "input", e.what());
    err << "freequiver: " << e.what() << '\n';
  }
  report.finish(code);

  if (o.out.empty()) {
    out << report.str();
  } else {
    std::ofstream file(o.out, std::ios::binary);
    if (!file) {
      err << "freequiver: cannot write '" << o.out << "'\n";
      return kInputError;
    }
    file << report.str();
  }
  return code;
}

}  // namespace freequiver::cli
