#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qconv/conversion.hpp"
#include "qconv/decomp.hpp"
#include "qconv/errors.hpp"
#include "qconv/measures.hpp"
#include "qconv/robustness.hpp"
#include "qconv/state_io.hpp"
#include "qconv/states.hpp"
#include "qconv/verify.hpp"

namespace qconv::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double x, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string full(double x) { return format_double(x, 17); }
std::string brief(double x) { return format_double(x, 10); }

void field(std::ostream& out, std::string_view key, const std::string& value) {
  out << key;
  for (std::size_t i = key.size(); i < 20; ++i) out << ' ';
  out << value << '\n';
}

struct MeasureArgs {
  std::string state;
  bool robustness = false;
  double tolerance = 1e-6;
  bool json = false;
};

struct ConvertArgs {
  std::string initial;
  std::string target;
  std::optional<double> prob;
  std::optional<double> fid;
  std::vector<double> fid2;
  bool no_bound = false;
  double tolerance = 1e-6;
  bool json = false;
};

struct SweepArgs {
  std::string figure = "custom";
  std::string initial;
  std::string target;
  std::string axis;
  std::vector<double> range;
  std::optional<double> p;
  bool bound = false;
  std::string format = "csv";
  std::string out;
  double tolerance = 1e-6;
  unsigned threads = 0;
};

struct VerifyArgs {
  std::string suite;
  std::size_t samples = 200;
  std::optional<std::uint64_t> seed;
  std::size_t cases = 0;
  unsigned threads = 0;
  bool json = false;
};

struct StateArgs {
  std::string state;
  std::string out;
  bool json = false;
};

struct Args {
  std::string config;
  MeasureArgs measure;
  ConvertArgs convert;
  SweepArgs sweep;
  VerifyArgs verify;
  StateArgs decompose;
  StateArgs state;
};

void define(CLI::App& app, Args& a) {
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  auto* m = app.add_subcommand("measure", "Concurrence, geometric entanglement, E_F (and robustness)");
  m->add_option("state", a.measure.state, "State descriptor, e.g. werner:0.9");
  m->add_flag("--robustness", a.measure.robustness, "Also solve the robustness SDP");
  m->add_option("--tol", a.measure.tolerance, "SDP gap tolerance")->capture_default_str();
  m->add_flag("--json", a.measure.json, "JSON output");

  auto* c = app.add_subcommand("convert", "Optimal conversion figures for a pure initial state");
  c->add_option("initial", a.convert.initial, "Pure initial state descriptor");
  c->add_option("target", a.convert.target, "Target state descriptor");
  c->add_option("--prob", a.convert.prob, "Best fidelity at success probability p");
  c->add_option("--fid", a.convert.fid, "Best probability at fidelity f");
  c->add_option("--fid2", a.convert.fid2, "Best probability with fidelities f1 (initial) and f2 (target)")
      ->expected(2);
  c->add_flag("--no-bound", a.convert.no_bound, "Skip the robustness bound");
  c->add_option("--tol", a.convert.tolerance, "SDP gap tolerance")->capture_default_str();
  c->add_flag("--json", a.convert.json, "JSON output");

  auto* s = app.add_subcommand("sweep", "Figure data as CSV or JSON");
  s->add_option("--figure", a.sweep.figure, "fig1a | fig1b | fig2 | custom")
      ->check(CLI::IsMember({"fig1a", "fig1b", "fig2", "custom"}))
      ->capture_default_str();
  s->add_option("--initial", a.sweep.initial, "Pure initial state descriptor");
  s->add_option("--target", a.sweep.target, "Target state descriptor (not with --axis r)");
  s->add_option("--axis", a.sweep.axis, "p | f | r")->check(CLI::IsMember({"p", "f", "r"}));
  s->add_option("--range", a.sweep.range, "start stop points")->expected(3);
  s->add_option("--p", a.sweep.p, "Success probability for --axis r");
  s->add_flag("--bound", a.sweep.bound, "Add the robustness bound column (solves one SDP)");
  s->add_option("--format", a.sweep.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  s->add_option("--out", a.sweep.out, "Output path (default stdout)");
  s->add_option("--tol", a.sweep.tolerance, "SDP gap tolerance")->capture_default_str();
  s->add_option("--threads", a.sweep.threads, "Worker threads (0 = all cores)");

  auto* v = app.add_subcommand("verify", "Run a verification suite");
  v->add_option("suite", a.verify.suite, "Suite name or 'all'");
  v->add_option("--samples", a.verify.samples, "Sample budget")->capture_default_str();
  v->add_option("--seed", a.verify.seed, "Seed (default $QCONV_SEED, else 0)");
  v->add_option("--cases", a.verify.cases, "States for theorem2-min/max (0 = 200)");
  v->add_option("--threads", a.verify.threads, "Worker threads (0 = all cores)");
  v->add_flag("--json", a.verify.json, "JSON output");

  auto* d = app.add_subcommand("decompose", "Equal-G pure-state decomposition");
  d->add_option("state", a.decompose.state, "State descriptor");
  d->add_flag("--json", a.decompose.json, "JSON output");

  auto* st = app.add_subcommand("state", "Print or save a state as JSON");
  st->add_option("state", a.state.state, "State descriptor");
  st->add_option("--out", a.state.out, "Write the state file here instead of printing");

  for (auto* sub : {m, c, s, v, d, st}) {
    sub->add_option("--config", a.config, "JSON file with default values for this command's flags");
  }
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
}

std::string config_scalar(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return full(v.get<double>());
  throw UsageError("config key '" + key + "' has an unsupported value type");
}

// Appends config values for every option of `sub` not given on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args, const CLI::App& sub, const json& config) {
  if (!config.is_object()) throw UsageError("config file must hold a JSON object");
  std::vector<std::string> used;
  for (const CLI::Option* opt : sub.get_options()) {
    const bool positional = !opt->nonpositional();
    const std::string key = positional ? opt->get_name() : opt->get_lnames().empty() ? "" : opt->get_lnames().front();
    if (key.empty() || key == "config" || !config.contains(key)) continue;
    used.push_back(key);
    if (opt->count() > 0) continue;
    const json& v = config.at(key);
    if (v.is_boolean()) {
      if (positional) throw UsageError("config key '" + key + "' must be a string");
      if (v.get<bool>()) args.push_back("--" + key);
      continue;
    }
    if (!positional) args.push_back("--" + key);
    if (v.is_array()) {
      for (const auto& item : v) args.push_back(config_scalar(item, key));
    } else {
      args.push_back(config_scalar(v, key));
    }
  }
  for (const auto& [key, value] : config.items()) {
    if (key != "config" && std::find(used.begin(), used.end(), key) == used.end()) {
      throw UsageError("unknown config key '" + key + "' for '" + sub.get_name() + "'");
    }
  }
  return args;
}

std::string require_spec(const std::string& spec, const char* what) {
  if (spec.empty()) throw UsageError(std::string("missing ") + what + " state descriptor");
  return spec;
}

PureState require_pure(const std::string& spec) {
  AnyState s = parse_state_spec(spec);
  if (auto* psi = std::get_if<PureState>(&s)) return *psi;
  throw DomainError("initial state '" + spec +
                    "' is mixed; the conversion formulas are only valid for pure initial states");
}

Robustness certified_robustness(const PureState& psi, double tolerance) {
  const RobustnessResult r = generalized_robustness(DensityMatrix::from_pure(psi), {tolerance});
  return {r.value, r.gap <= 10.0 * tolerance};
}

int cmd_measure(const MeasureArgs& a, std::ostream& out) {
  const std::string spec = require_spec(a.state, "a");
  const AnyState s = parse_state_spec(spec);
  const MeasureReport report =
      std::holds_alternative<PureState>(s) ? measure_report(std::get<PureState>(s)) : measure_report(std::get<DensityMatrix>(s));
  std::optional<RobustnessResult> robustness;
  if (a.robustness) robustness = generalized_robustness(as_density(s), {a.tolerance});

  if (a.json) {
    json j = to_json(report);
    j["state"] = spec;
    if (robustness) j["robustness"] = to_json(*robustness);
    out << j.dump(2) << '\n';
    return kOk;
  }
  field(out, "state", spec);
  field(out, "geometric", brief(report.geometric));
  field(out, "concurrence", brief(report.concurrence));
  field(out, "eof", brief(report.eof));
  if (robustness) {
    field(out, "robustness", brief(robustness->value));
    field(out, "robustness_lower", brief(robustness->lower_bound));
    field(out, "robustness_gap", brief(robustness->gap));
    field(out, "newton_steps", std::to_string(robustness->iterations));
  }
  return kOk;
}

int cmd_convert(const ConvertArgs& a, std::ostream& out, std::ostream& err) {
  const int chosen = int(a.prob.has_value()) + int(a.fid.has_value()) + int(!a.fid2.empty());
  if (chosen != 1) throw UsageError("convert needs exactly one of --prob, --fid, --fid2");
  const std::string initial = require_spec(a.initial, "initial");
  const std::string target = require_spec(a.target, "target");
  const PureState psi = require_pure(initial);
  const DensityMatrix rho = as_density(parse_state_spec(target));

  ConversionReport report = a.prob   ? f_p(psi, rho, *a.prob)
                            : a.fid  ? p_f(psi, rho, *a.fid)
                                     : p_f1_f2(psi, rho, a.fid2[0], a.fid2[1]);
  report.initial = initial;
  report.target = target;
  if (!a.no_bound && report.query != ConversionQuery::ProbabilityAtFidelityPair) {
    try {
      const Robustness r = certified_robustness(psi, a.tolerance);
      if (r.certified) {
        attach_thm1_bound(report, r, geometric_entanglement(rho));
      } else {
        err << "note: robustness gap above tolerance; bound omitted\n";
      }
    } catch (const SolverError& e) {
      err << "note: robustness solver did not converge (" << e.what() << "); bound omitted\n";
    }
  }

  if (a.json) {
    out << to_json(report).dump(2) << '\n';
    return kOk;
  }
  field(out, "initial", initial);
  field(out, "target", target);
  field(out, "query", std::string(query_name(report.query)));
  for (const auto& [k, v] : report.parameters.items()) field(out, k, brief(v.get<double>()));
  field(out, "exact", brief(report.exact_value));
  if (report.branch_discriminant) field(out, "branch_discriminant", brief(*report.branch_discriminant));
  if (report.thm1_bound) field(out, "bound", brief(*report.thm1_bound));
  if (report.gap) field(out, "gap", brief(*report.gap));
  return kOk;
}

struct SweepPlan {
  std::string figure;
  std::string initial;
  std::string target;  // empty for axis r
  std::string axis;
  double start = 0.0;
  double stop = 1.0;
  std::size_t points = 2;
  double p = 1.0;  // axis r only
};

SweepPlan plan_sweep(const SweepArgs& a) {
  SweepPlan plan;
  plan.figure = a.figure;
  if (a.figure == "fig1a") {
    plan = {a.figure, "pure:0.01", "werner:0.9", "p", 0.01, 1.0, 100, 1.0};
  } else if (a.figure == "fig1b") {
    plan = {a.figure, "pure:0.01", "", "r", 0.0, 1.0, 101, 0.75};
  } else if (a.figure == "fig2") {
    plan = {a.figure, "pure:0.2", "bell:phi+", "p", 0.01, 1.0, 100, 1.0};
  } else if (a.axis.empty() || a.range.empty()) {
    throw UsageError("a custom sweep needs --axis and --range");
  } else {
    plan.axis = a.axis;
  }
  if (!a.axis.empty() && a.axis != plan.axis) {
    throw UsageError("--axis " + a.axis + " does not match " + a.figure + " (axis " + plan.axis + ")");
  }
  if (!a.initial.empty()) plan.initial = a.initial;
  if (!a.target.empty()) plan.target = a.target;
  if (a.p) plan.p = *a.p;
  if (!a.range.empty()) {
    plan.start = a.range[0];
    plan.stop = a.range[1];
    const double points = a.range[2];
    if (!(points >= 2.0) || points != static_cast<double>(static_cast<std::size_t>(points))) {
      throw UsageError("--range points must be an integer >= 2");
    }
    plan.points = static_cast<std::size_t>(points);
  }
  if (!(plan.start < plan.stop)) throw UsageError("--range needs start < stop");
  if (plan.initial.empty()) throw UsageError("missing --initial");
  if (plan.axis == "r" && !plan.target.empty()) throw UsageError("--axis r sweeps werner:r; drop --target");
  if (plan.axis != "r" && plan.target.empty()) throw UsageError("missing --target");
  if (plan.axis != "r" && a.p) throw UsageError("--p only applies to --axis r");
  return plan;
}

struct SweepRow {
  double x = 0.0;
  double exact = 0.0;
  std::optional<double> bound;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  const SweepPlan plan = plan_sweep(a);
  const PureState psi = require_pure(plan.initial);
  std::optional<DensityMatrix> target;
  if (!plan.target.empty()) target = as_density(parse_state_spec(plan.target));

  std::optional<Robustness> r;
  if (a.bound) {
    try {
      r = certified_robustness(psi, a.tolerance);
      if (!r->certified) {
        err << "note: robustness gap above tolerance; bound column left empty\n";
        r.reset();
      }
    } catch (const SolverError& e) {
      err << "note: robustness solver did not converge (" << e.what() << "); bound column left empty\n";
    }
  }

  std::vector<SweepRow> rows(plan.points);
  parallel_for(plan.points, a.threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.x = i + 1 == plan.points ? plan.stop
                                 : plan.start + (plan.stop - plan.start) * static_cast<double>(i) /
                                                    static_cast<double>(plan.points - 1);
    if (plan.axis == "r") {
      const DensityMatrix rho = werner(row.x);
      row.exact = f_p(psi, rho, plan.p).exact_value;
      if (r) row.bound = thm1_fidelity_bound(*r, geometric_entanglement(rho), plan.p);
    } else if (plan.axis == "p") {
      row.exact = f_p(psi, *target, row.x).exact_value;
      if (r) row.bound = thm1_fidelity_bound(*r, geometric_entanglement(*target), row.x);
    } else {
      row.exact = p_f(psi, *target, row.x).exact_value;
      if (r) row.bound = thm1_probability_bound(*r, geometric_entanglement(*target), row.x);
    }
  });

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw UsageError("cannot open '" + a.out + "' for writing");
  }
  std::ostream& sink = a.out.empty() ? out : file;

  if (a.format == "csv") {
    sink << "x,exact,bound,gap\n";
    for (const auto& row : rows) {
      sink << full(row.x) << ',' << full(row.exact) << ',';
      if (row.bound) sink << full(*row.bound) << ',' << full(std::max(*row.bound - row.exact, 0.0));
      else sink << ',';
      sink << '\n';
    }
  } else {
    json j_rows = json::array();
    for (const auto& row : rows) {
      json jr = {{"x", row.x}, {"exact", row.exact}, {"bound", nullptr}, {"gap", nullptr}};
      if (row.bound) {
        jr["bound"] = *row.bound;
        jr["gap"] = std::max(*row.bound - row.exact, 0.0);
      }
      j_rows.push_back(jr);
    }
    json j = {{"figure", plan.figure}, {"initial", plan.initial}, {"axis", plan.axis}, {"rows", j_rows}};
    j["target"] = plan.target.empty() ? json(nullptr) : json(plan.target);
    if (plan.axis == "r") j["p"] = plan.p;
    j["robustness"] = r ? json(r->value) : json(nullptr);
    sink << j.dump(2) << '\n';
  }
  if (!a.out.empty() && !sink.flush()) throw UsageError("failed writing '" + a.out + "'");
  return kOk;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("QCONV_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("QCONV_SEED='") + env + "' is not an unsigned integer");
  }
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  if (a.suite.empty()) throw UsageError("missing suite name");
  if (a.samples < 1) throw UsageError("--samples must be >= 1");
  std::vector<Suite> suites;
  if (a.suite == "all") {
    suites = all_suites();
  } else if (auto s = parse_suite(a.suite)) {
    suites = {*s};
  } else {
    std::string names;
    for (Suite s : all_suites()) names += std::string(" ") + std::string(suite_name(s));
    throw UsageError("unknown suite '" + a.suite + "' (known:" + names + ", all)");
  }
  SuiteOptions options;
  options.samples = a.samples;
  options.seed = a.seed ? *a.seed : default_seed();
  options.cases = a.cases;
  options.threads = a.threads;

  bool passed = true;
  json reports = json::array();
  for (Suite s : suites) {
    const SuiteReport report = run_suite(s, options);
    passed = passed && report.passed();
    if (a.json) {
      reports.push_back(to_json(report));
      continue;
    }
    out << report.suite << ": " << (report.passed() ? "PASS" : "FAIL") << " (" << report.cases << " cases, "
        << report.checks << " checks, " << report.failures.size() << " failures, seed " << options.seed << ", "
        << brief(report.wall_time) << " s)\n";
    const std::size_t shown = std::min<std::size_t>(report.failures.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) {
      const auto& f = report.failures[i];
      out << "  case " << f.case_index << " seed " << f.seed << ": " << f.check << " expected " << full(f.expected)
          << " got " << full(f.got) << " tol " << brief(f.tolerance) << '\n';
    }
    if (shown < report.failures.size()) out << "  ... " << report.failures.size() - shown << " more\n";
  }
  if (a.json) out << (suites.size() == 1 ? reports.front() : reports).dump(2) << '\n';
  return passed ? kOk : kVerificationFailed;
}

int cmd_decompose(const StateArgs& a, std::ostream& out) {
  const std::string spec = require_spec(a.state, "a");
  const EqualGDecomposition d = equal_g_decomposition(as_density(parse_state_spec(spec)));
  if (a.json) {
    json j = to_json(d);
    j["state"] = spec;
    out << j.dump(2) << '\n';
    return kOk;
  }
  field(out, "state", spec);
  field(out, "common_angle", brief(d.common_angle));
  for (std::size_t i = 0; i < d.terms.size(); ++i) {
    const auto& t = d.terms[i];
    field(out, "term " + std::to_string(i),
          "p=" + brief(t.probability) + " G=" + brief(geometric_entanglement(t.state)));
  }
  return kOk;
}

int cmd_state(const StateArgs& a, std::ostream& out) {
  const AnyState s = parse_state_spec(require_spec(a.state, "a"));
  if (a.out.empty()) {
    out << to_json(s).dump(2) << '\n';
  } else {
    save_state_file(a.out, s);
  }
  return kOk;
}

int dispatch(const CLI::App& sub, const Args& a, std::ostream& out, std::ostream& err) {
  const std::string& name = sub.get_name();
  if (name == "measure") return cmd_measure(a.measure, out);
  if (name == "convert") return cmd_convert(a.convert, out, err);
  if (name == "sweep") return cmd_sweep(a.sweep, out, err);
  if (name == "verify") return cmd_verify(a.verify, out);
  if (name == "decompose") return cmd_decompose(a.decompose, out);
  return cmd_state(a.state, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    std::vector<std::string> merged = args;
    bool config_merged = false;
    for (;;) {
      CLI::App app{"qconv: two-qubit stochastic approximate entanglement conversion"};
      app.name("qconv");
      Args a;
      define(app, a);
      try {
        // CLI11 consumes a vector from the back.
        app.parse(std::vector<std::string>(merged.rbegin(), merged.rend()));
      } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
      }
      const CLI::App& sub = *app.get_subcommands().front();
      if (!a.config.empty() && !config_merged) {
        merged = merge_config(merged, sub, load_json(a.config));
        config_merged = true;
        continue;
      }
      return dispatch(sub, a, out, err);
    }
  } catch (const SolverError& e) {
    err << "solver refused: " << e.what();
    if (!std::isnan(e.best_value())) err << " (best feasible value " << full(e.best_value()) << ")";
    err << '\n';
    return kSolverRefusal;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace qconv::cli
