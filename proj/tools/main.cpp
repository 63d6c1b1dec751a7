// wpscert: models weighted-projective-space bundles with bigraded coordinate
// rings and checks the finite lemmas behind their non-rationality
// certificates.  Every subcommand is batch-oriented and deterministic: the
// same argv and seed produce identical bytes.
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "wpscert/certify.hpp"

using namespace wpscert;
using nlohmann::ordered_json;

namespace {

struct FamilyFlags {
  std::string family = "P";
  int n = 0;
  int r = 0;
  std::optional<int> l;
};

void add_family_flags(CLI::App* sub, FamilyFlags& ff) {
  sub->add_option("--family", ff.family, "Bundle family: P, Q, or R")
      ->check(CLI::IsMember({"P", "Q", "R"}))
      ->required();
  sub->add_option("--n", ff.n, "Total dimension parameter")->required();
  sub->add_option("--r", ff.r, "Fiber weighting parameter")->required();
  sub->add_option("--l", ff.l, "Degree of the z variable (family Q only)");
}

WpsBundle make_bundle(const FamilyFlags& ff) {
  if (ff.family == "P") return WpsBundle::standard_P(ff.n, ff.r);
  if (ff.family == "R") return WpsBundle::standard_R(ff.n, ff.r);
  if (!ff.l) throw std::invalid_argument("family Q needs --l");
  return WpsBundle::standard_Q(ff.n, ff.r, *ff.l);
}

Bidegree parse_bidegree(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 == s.size())
    throw std::invalid_argument("bidegree must be two comma-separated integers, e.g. 2,3");
  return {std::stoll(s.substr(0, comma)), std::stoll(s.substr(comma + 1))};
}

std::vector<BiPoly> piece_sections(const WpsBundle& b, const Field& f, const Bidegree& d) {
  std::vector<BiPoly> out;
  for (const Expo& e : b.grading().basis(d)) {
    BiPoly s(b.grading_ptr(), f, d);
    s.add_term(e, f.one());
    out.push_back(std::move(s));
  }
  return out;
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_describe(const FamilyFlags& ff, bool json) {
  const WpsBundle b = make_bundle(ff);
  if (json) {
    emit(b.describe());
    return 0;
  }
  const GradingMatrix& g = b.grading();
  std::vector<std::size_t> width(g.var_count());
  const auto cell = [](std::int64_t v) { return std::to_string(v); };
  for (std::size_t i = 0; i < g.var_count(); ++i)
    width[i] = std::max({g.name(i).size(), cell(g.row1(i)).size(), cell(g.row2(i)).size()});
  std::cout << b.name() << ", dimension " << b.dimension() << "\n";
  const auto row = [&](const std::string& head, auto value) {
    std::cout << "  " << head << ":";
    for (std::size_t i = 0; i < g.var_count(); ++i) {
      const std::string v = value(i);
      std::cout << " " << std::string(width[i] - v.size(), ' ') << v;
      if (i + 1 == g.base_count()) std::cout << "  |";
    }
    std::cout << "\n";
  };
  row("vars", [&](std::size_t i) { return g.name(i); });
  row("deg1", [&](std::size_t i) { return cell(g.row1(i)); });
  row("deg2", [&](std::size_t i) { return cell(g.row2(i)); });
  std::cout << "  charts:";
  for (const Chart& c : b.charts()) std::cout << " " << c.label();
  std::cout << "\n";
  return 0;
}

int cmd_basis(const FamilyFlags& ff, const std::string& bidegree, bool json) {
  const WpsBundle b = make_bundle(ff);
  const Bidegree d = parse_bidegree(bidegree);
  const std::vector<Expo> basis = b.grading().basis(d);
  if (json) {
    ordered_json j;
    j["bundle"] = b.name();
    j["bidegree"] = d.str();
    j["dim"] = basis.size();
    ordered_json monos = ordered_json::array();
    for (const Expo& e : basis) monos.push_back(b.grading().monomial_str(e));
    j["monomials"] = monos;
    emit(j);
    return 0;
  }
  for (const Expo& e : basis) std::cout << b.grading().monomial_str(e) << "\n";
  std::cout << "dim " << b.name() << "_" << d.str() << " = " << basis.size() << "\n";
  return 0;
}

struct JetFlags {
  std::string bidegree;
  std::uint64_t p = 0;
  std::optional<int> k;
  std::string chart;
  int order = 2;
  std::string center;
};

int cmd_jet_rank(const FamilyFlags& ff, const JetFlags& jf, bool json) {
  const WpsBundle b = make_bundle(ff);
  const Bidegree d = parse_bidegree(jf.bidegree);
  if (!is_prime(static_cast<std::int64_t>(jf.p)))
    throw std::invalid_argument("--p must be prime");
  const Field f =
      Field::finite(static_cast<std::int64_t>(jf.p),
                    jf.k ? *jf.k : default_jet_degree(jf.p));
  Chart chart = b.charts().front();
  if (!jf.chart.empty()) {
    const auto comma = jf.chart.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("--chart must be base,fiber, e.g. u0,x1");
    const std::size_t base = b.grading().index_of(jf.chart.substr(0, comma));
    chart = b.chart(base, jf.chart.substr(comma + 1));
  }
  std::vector<Elem> center(chart.dim(), f.zero());
  if (!jf.center.empty()) {
    std::stringstream ss(jf.center);
    std::string tok;
    std::size_t at = 0;
    while (std::getline(ss, tok, ',')) {
      if (at >= center.size()) throw std::invalid_argument("--center has too many coordinates");
      center[at] = f.from_index(std::stoull(tok));
      at += 1;
    }
    if (at != center.size()) throw std::invalid_argument("--center has too few coordinates");
  }
  const std::vector<BiPoly> sections = piece_sections(b, f, d);
  const SurjectivityResult res = rest_surjective(sections, JetTarget(chart, center, jf.order));
  if (json) {
    ordered_json j;
    j["bundle"] = b.name();
    j["bidegree"] = d.str();
    j["field"] = f.name();
    j["chart"] = chart.label();
    j["order"] = jf.order;
    ordered_json c = ordered_json::array();
    for (const Elem& v : center) c.push_back(v.str());
    j["center"] = c;
    j["sections"] = sections.size();
    j["target_dim"] = res.target_dim;
    j["rank"] = res.rank;
    j["surjective"] = res.surjective;
    emit(j);
  } else {
    std::cout << b.name() << " " << d.str() << " over " << f.name() << ", chart "
              << chart.label() << ", order " << jf.order << ": rank " << res.rank << " of "
              << res.target_dim << " -> " << (res.surjective ? "SURJECTIVE" : "NOT SURJECTIVE")
              << "\n";
  }
  return res.surjective ? 0 : 1;
}

struct TupleFlags {
  std::uint64_t n = 0, m = 0, r = 0;
  std::optional<std::uint64_t> p;
  std::optional<int> k;
  std::uint64_t seed = 3;
};

void add_tuple_flags(CLI::App* sub, TupleFlags& tf) {
  sub->add_option("--n", tf.n, "Total dimension parameter")->required();
  sub->add_option("--m", tf.m, "Degree parameter (l = n + 1 - m)")->required();
  sub->add_option("--r", tf.r, "Fiber weighting parameter")->required();
  sub->add_option("--p", tf.p, "Prime dividing l (default: smallest)");
  sub->add_option("--k", tf.k, "Field degree, 1..4 (default: smallest adequate)");
  sub->add_option("--seed", tf.seed, "Root seed for every random draw")->capture_default_str();
}

int cmd_census(const TupleFlags& tf, std::uint64_t budget, int max_attempts, bool json) {
  const ParamTuple t = make_tuple(tf.n, tf.m, tf.r, tf.p, tf.k, tf.seed);
  const CensusReport rep =
      census(t.n, t.m, t.r, t.p, t.census_field(), t.seed, budget, max_attempts);
  if (json) {
    emit(rep.to_json());
    return rep.pass ? 0 : 1;
  }
  std::cout << "census " << t.label() << " over " << rep.field_name << ", seed " << rep.seed
            << "\n";
  std::cout << "  a = " << rep.a_str << "\n  f = " << rep.f_str << "\n";
  std::cout << "  critical points off the branch divisor: " << rep.critical_total
            << " (skipped on it: " << rep.a_zero_skipped << ")\n";
  std::size_t shown = 0;
  for (const auto& rec : rep.points) {
    if (shown == 20) {
      std::cout << "  ... and " << rep.points.size() - shown << " more\n";
      break;
    }
    std::cout << "  " << rec.chart << " [";
    for (std::size_t i = 0; i < rec.point.size(); ++i)
      std::cout << (i ? "," : "") << rec.point[i].str();
    std::cout << "] " << (rec.on_gamma ? "on" : "off") << " the marked section, "
              << to_string(rec.verdict.status) << "\n";
    shown += 1;
  }
  std::cout << "  on the marked section: " << rep.gamma_count << "\n";
  if (!rep.warning.empty()) std::cout << "  warning: " << rep.warning << "\n";
  std::cout << (rep.pass ? "PASS" : "FAIL") << "\n";
  return rep.pass ? 0 : 1;
}

void print_run(const RunBundle& run) {
  for (const LemmaCertificate& c : run.certificates) {
    std::cout << "  " << (c.passed() ? "PASS   " : c.skipped() ? "SKIP   " : "FAIL   ")
              << c.lemma_id << " (" << c.scope << ")";
    if (c.skipped()) {
      const auto open = c.verdict.find('(');
      std::cout << ": " << c.verdict.substr(open + 1, c.verdict.size() - open - 2);
    }
    std::cout << "\n";
  }
}

std::filesystem::path write_bundle(const RunBundle& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path =
      dir / (run.tuple.label() + "-seed" + std::to_string(run.tuple.seed) + ".json");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << run.to_json().dump(2) << "\n";
  return path;
}

int cmd_verify(const TupleFlags& tf, const VerifyOptions& opt, const std::string& out_dir,
               bool json) {
  const ParamTuple t = make_tuple(tf.n, tf.m, tf.r, tf.p, tf.k, tf.seed);
  const RunBundle run = run_all(t, opt);
  if (!out_dir.empty()) {
    const auto path = write_bundle(run, out_dir);
    if (!json) std::cout << "wrote " << path.string() << "\n";
  }
  if (json) {
    emit(run.to_json());
  } else {
    std::cout << "verify " << t.label() << ", seed " << t.seed << "\n";
    print_run(run);
    std::cout << (run.overall_pass ? "PASS" : "FAIL") << "\n";
  }
  return run.overall_pass ? 0 : 1;
}

int cmd_sweep(std::uint64_t n_max, std::uint64_t base_seed, int jobs, const VerifyOptions& opt,
              const std::string& out_dir, bool json) {
  const std::vector<ParamTuple> tuples = grid_tuples(n_max, base_seed);
  std::vector<RunBundle> runs(tuples.size());
  if (jobs < 1) throw std::invalid_argument("--jobs must be at least 1");
  if (jobs == 1) {
    for (std::size_t i = 0; i < tuples.size(); ++i) runs[i] = run_all(tuples[i], opt);
  } else {
    // field tables are built behind a lock, but warm them serially anyway so
    // workers only ever read
    for (const ParamTuple& t : tuples) {
      t.field();
      t.census_field();
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tuples.size(); i = next.fetch_add(1))
          runs[i] = run_all(tuples[i], opt);
      });
    for (std::thread& th : pool) th.join();
  }
  bool all = true;
  for (const RunBundle& run : runs) all = all && run.overall_pass;
  if (json) {
    ordered_json j;
    j["tool_version"] = std::string(kToolVersion);
    j["n_max"] = n_max;
    j["base_seed"] = base_seed;
    j["overall_pass"] = all;
    ordered_json arr = ordered_json::array();
    for (const RunBundle& run : runs) arr.push_back(run.to_json());
    j["runs"] = arr;
    emit(j);
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!out_dir.empty()) write_bundle(runs[i], out_dir);
    if (!json)
      std::cout << tuples[i].label() << " seed " << tuples[i].seed << ": "
                << (runs[i].overall_pass ? "PASS" : "FAIL") << "\n";
  }
  if (!json)
    std::cout << runs.size() << " tuples, " << (all ? "all PASS" : "some FAIL") << "\n";
  return all ? 0 : 1;
}

int cmd_e_table(std::uint64_t n_max, bool json) {
  bool all = true;
  ordered_json rows = ordered_json::array();
  for (std::uint64_t n = 3; n <= n_max; ++n) {
    const ETableRow row = theorem2_arith(n);
    all = all && row.inequality_ok;
    if (json) {
      ordered_json j;
      j["n"] = row.n;
      j["e"] = row.e;
      j["admissible_r"] = row.admissible_r;
      j["inequality_ok"] = row.inequality_ok;
      rows.push_back(j);
    } else {
      std::cout << "n=" << n << "  e=" << row.e << "  r:";
      if (row.admissible_r.empty()) std::cout << " none";
      for (std::uint64_t r : row.admissible_r) std::cout << " " << r;
      std::cout << "  " << (row.inequality_ok ? "ok" : "VIOLATED") << "\n";
    }
  }
  if (json) emit(rows);
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified checks for weighted-projective-space bundle families"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  FamilyFlags ff;
  JetFlags jf;
  TupleFlags tf;
  std::string bidegree, out_dir;
  std::uint64_t budget = kDefaultScanBudget;
  std::uint64_t n_max = 6, sweep_seed = 3;
  int jobs = 1, max_attempts = 8, samples = 25;
  bool json = false, timing = false;

  CLI::App* describe = app.add_subcommand("describe", "Print a bundle's grading matrix");
  add_family_flags(describe, ff);
  describe->add_flag("--json", json, "Machine-readable output");

  CLI::App* basis = app.add_subcommand("basis", "Enumerate the monomials of a bidegree piece");
  add_family_flags(basis, ff);
  basis->add_option("--bidegree", bidegree, "Piece to enumerate, e.g. 2,3")->required();
  basis->add_flag("--json", json, "Machine-readable output");

  CLI::App* jet = app.add_subcommand("jet-rank", "Rank of the jet evaluation at a chart point");
  add_family_flags(jet, ff);
  jet->add_option("--bidegree", jf.bidegree, "Section piece, e.g. 2,3")->required();
  jet->add_option("--p", jf.p, "Field characteristic (prime)")->required();
  jet->add_option("--k", jf.k, "Field degree, 1..4");
  jet->add_option("--chart", jf.chart, "Chart as base,fiber (default: first chart)");
  jet->add_option("--order", jf.order, "Jet order, 1..4")->capture_default_str()->check(CLI::Range(1, 4));
  jet->add_option("--center", jf.center, "Point as comma-separated element indices (default 0)");
  jet->add_flag("--json", json, "Machine-readable output");

  CLI::App* census_cmd = app.add_subcommand("census", "Critical-point census of a random member");
  add_tuple_flags(census_cmd, tf);
  census_cmd->add_option("--budget", budget, "Point-scan budget")->capture_default_str();
  census_cmd->add_option("--max-attempts", max_attempts, "Redraw limit for degenerate data")->capture_default_str();
  census_cmd->add_flag("--json", json, "Machine-readable output");

  CLI::App* verify = app.add_subcommand("verify", "Run every lemma check for one tuple");
  add_tuple_flags(verify, tf);
  verify->add_option("--budget", budget, "Point-scan budget")->capture_default_str();
  verify->add_option("--samples", samples, "Random centers per chart")->capture_default_str();
  verify->add_option("--max-attempts", max_attempts, "Redraw limit for degenerate data")->capture_default_str();
  verify->add_option("--out", out_dir, "Directory for certificate files");
  verify->add_flag("--timing", timing, "Fill elapsed_ms (breaks byte determinism)");
  verify->add_flag("--json", json, "Machine-readable output");

  CLI::App* sweep = app.add_subcommand("sweep", "Verify every tuple up to --nmax");
  sweep->add_option("--nmax", n_max, "Largest n in the grid")->capture_default_str();
  sweep->add_option("--seed", sweep_seed, "Base seed; per-tuple seeds derive from it")->capture_default_str();
  sweep->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
  sweep->add_option("--budget", budget, "Point-scan budget")->capture_default_str();
  sweep->add_option("--samples", samples, "Random centers per chart")->capture_default_str();
  sweep->add_option("--max-attempts", max_attempts, "Redraw limit for degenerate data")->capture_default_str();
  sweep->add_option("--out", out_dir, "Directory for certificate files");
  sweep->add_flag("--timing", timing, "Fill elapsed_ms (breaks byte determinism)");
  sweep->add_flag("--json", json, "Machine-readable output");

  CLI::App* etable = app.add_subcommand("e-table", "Exponent bound arithmetic per n");
  etable->add_option("--nmax", n_max, "Largest n to tabulate")->capture_default_str();
  etable->add_flag("--json", json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    ordered_json err;
    err["error"] = e.what();
    err["kind"] = "usage";
    std::cerr << err.dump() << "\n";
    return 2;
  }

  try {
    VerifyOptions opt;
    opt.budget = budget;
    opt.sample_points = samples;
    opt.max_attempts = max_attempts;
    opt.timing = timing;
    if (describe->parsed()) return cmd_describe(ff, json);
    if (basis->parsed()) return cmd_basis(ff, bidegree, json);
    if (jet->parsed()) return cmd_jet_rank(ff, jf, json);
    if (census_cmd->parsed()) return cmd_census(tf, budget, max_attempts, json);
    if (verify->parsed()) return cmd_verify(tf, opt, out_dir, json);
    if (sweep->parsed()) return cmd_sweep(n_max, sweep_seed, jobs, opt, out_dir, json);
    if (etable->parsed()) return cmd_e_table(n_max, json);
  } catch (const std::exception& e) {
    ordered_json err;
    err["error"] = e.what();
    err["kind"] = "invalid-input";
    std::cerr << err.dump() << "\n";
    return 2;
  }
  return 2;
}
