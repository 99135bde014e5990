#include "tgfem/experiment.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace tgfem {

namespace {

using json = nlohmann::json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

template <class T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return value;
}

// A field value together with where it came from, for error messages.
template <class T>
struct Field {
  std::optional<T> value;
  std::string where;

  void set(T v, std::string origin) {
    value = std::move(v);
    where = std::move(origin);
  }
};

struct RawSpec {
  Field<int> dim;
  Field<std::string> problem;
  Field<std::string> coupling;
  Field<std::vector<int>> coarse_n;
  Field<std::string> norm;
  Field<std::string> local_rhs;
  Field<int> max_iter;
  Field<double> stop_tol;
  Field<bool> k_formula;
  Field<double> k_constant;
  Field<int> threads;
  Field<std::string> out;
  Field<std::string> json_out;
};

std::optional<std::vector<int>> parse_int_list(std::string_view text) {
  std::vector<int> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const auto v = parse_number<int>(text.substr(start, comma - start));
    if (!v) return std::nullopt;
    values.push_back(*v);
    start = comma + 1;
  }
  return values;
}

void read_config(const std::string& path, RawSpec& raw, std::vector<std::string>& issues) {
  std::ifstream in(path);
  if (!in) {
    issues.push_back("--config: cannot open '" + path + "'");
    return;
  }
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    issues.push_back("--config: invalid JSON in '" + path + "': " + e.what());
    return;
  }
  if (!cfg.is_object()) {
    issues.push_back("config: top level must be an object");
    return;
  }

  for (const auto& [key, value] : cfg.items()) {
    const std::string where = "config." + key;
    auto want_int = [&](Field<int>& f) {
      if (value.is_number_integer()) f.set(value.get<int>(), where);
      else issues.push_back(where + ": expected an integer");
    };
    auto want_number = [&](Field<double>& f) {
      if (value.is_number()) f.set(value.get<double>(), where);
      else issues.push_back(where + ": expected a number");
    };
    auto want_string = [&](Field<std::string>& f) {
      if (value.is_string()) f.set(value.get<std::string>(), where);
      else issues.push_back(where + ": expected a string");
    };

    if (key == "dim") want_int(raw.dim);
    else if (key == "problem") want_string(raw.problem);
    else if (key == "coupling") want_string(raw.coupling);
    else if (key == "norm") want_string(raw.norm);
    else if (key == "local_rhs") want_string(raw.local_rhs);
    else if (key == "max_iter") want_int(raw.max_iter);
    else if (key == "stop_tol") want_number(raw.stop_tol);
    else if (key == "k_constant") want_number(raw.k_constant);
    else if (key == "threads") want_int(raw.threads);
    else if (key == "out") want_string(raw.out);
    else if (key == "json") want_string(raw.json_out);
    else if (key == "k_formula") {
      if (value.is_boolean()) raw.k_formula.set(value.get<bool>(), where);
      else issues.push_back(where + ": expected a boolean");
    } else if (key == "H") {
      if (!value.is_array()) {
        issues.push_back(where + ": expected an array of integers");
        continue;
      }
      std::vector<int> list;
      bool ok = true;
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_number_integer()) {
          issues.push_back(where + "[" + std::to_string(i) + "]: expected an integer");
          ok = false;
        } else {
          list.push_back(value[i].get<int>());
        }
      }
      if (ok) raw.coarse_n.set(std::move(list), where);
    } else {
      issues.push_back(where + ": unknown key");
    }
  }
}

void validate(const RawSpec& raw, RunSpec& spec, std::vector<std::string>& issues) {
  std::vector<std::string> missing;
  if (!raw.dim.value) missing.push_back("dim");
  if (!raw.problem.value) missing.push_back("problem");
  if (!raw.coupling.value) missing.push_back("coupling");
  if (!raw.coarse_n.value) missing.push_back("H");
  if (!raw.norm.value) missing.push_back("norm");
  if (!missing.empty()) issues.push_back("missing required field(s): " + join(missing, ", "));

  if (raw.dim.value) {
    spec.dim = *raw.dim.value;
    if (spec.dim != 2 && spec.dim != 3) issues.push_back(raw.dim.where + ": must be 2 or 3");
  }
  if (raw.problem.value) {
    spec.problem = *raw.problem.value;
    if (spec.problem != "example1" && spec.problem != "example2")
      issues.push_back(raw.problem.where + ": unknown problem '" + spec.problem + "' (example1|example2)");
  }
  if (raw.norm.value) {
    const std::string& n = *raw.norm.value;
    if (n == "h1") spec.norm = NormKind::H1;
    else if (n == "l2") spec.norm = NormKind::L2;
    else issues.push_back(raw.norm.where + ": unknown norm '" + n + "' (h1|l2)");
  }
  if (raw.local_rhs.value) {
    const std::string& f = *raw.local_rhs.value;
    if (f == "interpolated") spec.local_rhs = LocalRhs::Interpolated;
    else if (f == "exact") spec.local_rhs = LocalRhs::Exact;
    else issues.push_back(raw.local_rhs.where + ": unknown form '" + f + "' (interpolated|exact)");
  }
  bool coupling_ok = false;
  if (raw.coupling.value) {
    try {
      spec.coupling = Coupling::parse(*raw.coupling.value);
      coupling_ok = true;
    } catch (const std::invalid_argument& e) {
      issues.push_back(raw.coupling.where + ": " + e.what());
    }
  }
  if (raw.coarse_n.value) {
    spec.coarse_n = *raw.coarse_n.value;
    if (spec.coarse_n.empty()) issues.push_back(raw.coarse_n.where + ": list is empty");
    for (std::size_t i = 0; i < spec.coarse_n.size(); ++i) {
      const int n = spec.coarse_n[i];
      const std::string at = raw.coarse_n.where + "[" + std::to_string(i) + "]";
      if (n < 2) {
        issues.push_back(at + ": H_n must be at least 2, got " + std::to_string(n));
        continue;
      }
      if (coupling_ok) {
        try {
          spec.coupling.ratio_for(n);
        } catch (const std::invalid_argument& e) {
          issues.push_back(at + ": " + e.what());
        }
      }
    }
  }
  if (raw.max_iter.value) {
    spec.iteration.max_iterations = *raw.max_iter.value;
    if (spec.iteration.max_iterations < 1) issues.push_back(raw.max_iter.where + ": must be at least 1");
  }
  if (raw.stop_tol.value) {
    spec.iteration.stop_rel_change = *raw.stop_tol.value;
    if (!(spec.iteration.stop_rel_change >= 0.0) || !std::isfinite(spec.iteration.stop_rel_change))
      issues.push_back(raw.stop_tol.where + ": must be a finite nonnegative number");
  }
  if (raw.k_formula.value) spec.iteration.k_formula = *raw.k_formula.value;
  if (raw.k_constant.value) {
    spec.iteration.k_constant = *raw.k_constant.value;
    if (!(spec.iteration.k_constant > 0.0) || !std::isfinite(spec.iteration.k_constant))
      issues.push_back(raw.k_constant.where + ": must be positive");
  }
  if (raw.threads.value) {
    spec.threads = *raw.threads.value;
    if (spec.threads < 1) issues.push_back(raw.threads.where + ": must be at least 1");
  }
  if (raw.out.value) spec.out = *raw.out.value;
  if (raw.json_out.value) spec.json_out = *raw.json_out.value;
}

double safe_order(double (*order)(double, double, double, NormKind), double e0, double e1, double h,
                  NormKind norm) {
  if (!(e0 > 0.0) || !(e1 > 0.0)) return kNaN;
  return order(e0, e1, h, norm);
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return std::isnan(v) ? "nan" : buf;
}

}  // namespace

SpecError::SpecError(std::vector<std::string> issues)
    : std::runtime_error(join(issues, "; ")), issues_(std::move(issues)) {}

Coupling Coupling::parse(std::string_view text) {
  if (text == "h2") return {CouplingKind::H2, 0};
  if (text == "h32") return {CouplingKind::H32, 0};
  if (text.starts_with("ratio=")) {
    const auto r = parse_number<int>(text.substr(6));
    if (!r || *r < 1) throw std::invalid_argument("ratio must be a positive integer in 'ratio=<int>'");
    return {CouplingKind::Ratio, *r};
  }
  throw std::invalid_argument("unknown coupling '" + std::string(text) + "' (h2|h32|ratio=<int>)");
}

std::string Coupling::label() const {
  switch (kind) {
    case CouplingKind::H2: return "h2";
    case CouplingKind::H32: return "h32";
    case CouplingKind::Ratio: return "ratio=" + std::to_string(ratio);
  }
  return {};
}

int Coupling::ratio_for(int coarse_n) const {
  switch (kind) {
    case CouplingKind::H2: return coarse_n;
    case CouplingKind::H32: {
      const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(coarse_n))));
      if (r * r != coarse_n)
        throw std::invalid_argument("H_n = " + std::to_string(coarse_n) +
                                    " is not a perfect square, required by coupling h32");
      return r;
    }
    case CouplingKind::Ratio: return ratio;
  }
  return 0;
}

std::string_view norm_name(NormKind norm) { return norm == NormKind::H1 ? "h1" : "l2"; }

std::string_view local_rhs_name(LocalRhs form) {
  return form == LocalRhs::Interpolated ? "interpolated" : "exact";
}

RunSpec parse_spec(const std::vector<std::string>& args) {
  CLI::App app{"Local-and-parallel two-grid P1 solver for the Poisson problem on the unit square/cube.",
               "tgfem"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string dim, problem, coupling, coarse, norm, max_iter, stop_tol, threads, out, json_out, config,
      k_constant, local_rhs;
  bool k_formula = false;
  app.add_option("--dim", dim, "Space dimension: 2 or 3");
  app.add_option("--problem", problem, "example1 or example2");
  app.add_option("--coupling", coupling, "h2, h32 or ratio=<int>");
  app.add_option("--H", coarse, "Comma-separated coarse subdivisions H_n (H = 1/H_n)");
  app.add_option("--norm", norm, "h1 or l2");
  app.add_option("--max-iter", max_iter, "Maximum two-grid sweeps (default 5)");
  app.add_option("--stop-tol", stop_tol, "Relative H1 change that ends the sweep (default 1e-10)");
  app.add_flag("--k-formula", k_formula, "Take the sweep count from K = [1/alpha_d + 0.5]");
  app.add_option("--k-constant", k_constant, "Constant c in alpha_d (default 1)");
  app.add_option("--local-rhs", local_rhs,
                 "Local problem load: interpolated (test with I_h(phi_j v), default) or exact (phi_j v)");
  app.add_option("--threads", threads, "OpenMP threads");
  app.add_option("--out", out, "CSV output path (default stdout)");
  app.add_option("--json", json_out, "JSON report path");
  app.add_option("--config", config, "JSON run specification; flags override it");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw SpecError({e.what()});
  }

  RawSpec raw;
  std::vector<std::string> issues;
  if (app.count("--config")) read_config(config, raw, issues);

  auto flag_int = [&](const char* name, const std::string& text, Field<int>& f) {
    if (!app.count(name)) return;
    if (auto v = parse_number<int>(text)) f.set(*v, name);
    else issues.push_back(std::string(name) + ": expected an integer, got '" + text + "'");
  };
  auto flag_double = [&](const char* name, const std::string& text, Field<double>& f) {
    if (!app.count(name)) return;
    if (auto v = parse_number<double>(text)) f.set(*v, name);
    else issues.push_back(std::string(name) + ": expected a number, got '" + text + "'");
  };
  auto flag_string = [&](const char* name, const std::string& text, Field<std::string>& f) {
    if (app.count(name)) f.set(text, name);
  };
  flag_int("--dim", dim, raw.dim);
  flag_string("--problem", problem, raw.problem);
  flag_string("--coupling", coupling, raw.coupling);
  flag_string("--norm", norm, raw.norm);
  flag_string("--local-rhs", local_rhs, raw.local_rhs);
  flag_int("--max-iter", max_iter, raw.max_iter);
  flag_double("--stop-tol", stop_tol, raw.stop_tol);
  flag_double("--k-constant", k_constant, raw.k_constant);
  flag_int("--threads", threads, raw.threads);
  flag_string("--out", out, raw.out);
  flag_string("--json", json_out, raw.json_out);
  if (app.count("--k-formula")) raw.k_formula.set(k_formula, "--k-formula");
  if (app.count("--H")) {
    if (auto v = parse_int_list(coarse)) raw.coarse_n.set(*v, "--H");
    else issues.push_back("--H: expected a comma-separated list of integers, got '" + coarse + "'");
  }

  RunSpec spec;
  validate(raw, spec, issues);
  if (!issues.empty()) throw SpecError(std::move(issues));
  return spec;
}

ConvergenceReport run(const RunSpec& spec, std::ostream* log) {
  if (spec.threads > 0) omp_set_num_threads(spec.threads);
  const Problem problem = problems::get(spec.problem, spec.dim);
  const QuadratureRule& error_quad = QuadratureRule::get(spec.dim, 5);
  ConvergenceReport report;

  for (int n : spec.coarse_n) {
    const int ratio = spec.coupling.ratio_for(n);
    if (log)
      *log << "dim=" << spec.dim << " " << spec.problem << " H_n=" << n << " ratio=" << ratio
           << " fine n=" << n * ratio << std::endl;

    DiscretizationOptions options;
    options.local_rhs = spec.local_rhs;
    Discretization disc(problem, n, ratio, options);
    const auto t0 = std::chrono::steady_clock::now();
    const TwoGridState state = iterate(disc, spec.iteration);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const FeFunction uh = solve_fine_reference(disc);
    const FeFunction coarse_on_fine = disc.prolongation().apply(state.coarse_solution);

    ConvergenceRow row;
    row.dim = spec.dim;
    row.problem = spec.problem;
    row.norm = spec.norm;
    row.coarse_n = n;
    row.ratio = ratio;
    row.iterations = state.iterations();
    row.seconds = seconds;
    row.history = state.history;
    row.ref_coarse = distance(uh, coarse_on_fine, spec.norm);
    row.ref_final = distance(uh, state.final_solution, spec.norm);

    const double h = disc.coarse_h();
    if (problem.has_exact_solution()) {
      auto err = [&](const FeFunction& f) {
        return spec.norm == NormKind::H1 ? h1_seminorm_error(f, *problem.exact_grad_u, error_quad)
                                         : l2_error(f, *problem.exact_u, error_quad);
      };
      row.err_coarse = err(state.coarse_solution);
      row.err_fine_ref = err(uh);
      row.err_final = err(state.final_solution);
      row.err_intermediate = err(state.first_intermediate);
      row.order1 = safe_order(order1, row.err_coarse, row.err_final, h, spec.norm);
    } else {
      row.err_coarse = row.ref_coarse;
      row.err_fine_ref = kNaN;
      row.err_final = row.ref_final;
      row.err_intermediate = distance(uh, state.first_intermediate, spec.norm);
      row.order1 = kNaN;
    }
    row.order2 = safe_order(order2, row.ref_coarse, row.ref_final, h, spec.norm);
    if (log)
      *log << "  err_coarse=" << format_number(row.err_coarse) << " err_final=" << format_number(row.err_final)
           << " order1=" << row.order1 << " order2=" << row.order2 << " iterations=" << row.iterations
           << " seconds=" << seconds << std::endl;
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "dim,problem,norm,H_n,ratio,err_coarse,err_fine_ref,err_final,order1,order2,iterations,seconds\n";
  for (const ConvergenceRow& r : report.rows) {
    char seconds[32];
    std::snprintf(seconds, sizeof seconds, "%.3f", r.seconds);
    out << r.dim << ',' << r.problem << ',' << norm_name(r.norm) << ',' << r.coarse_n << ',' << r.ratio << ','
        << format_number(r.err_coarse) << ',' << format_number(r.err_fine_ref) << ','
        << format_number(r.err_final) << ',' << format_number(r.order1) << ',' << format_number(r.order2)
        << ',' << r.iterations << ',' << seconds << '\n';
  }
}

void write_json(const ConvergenceReport& report, const RunSpec& spec, std::ostream& out) {
  json doc;
  doc["spec"] = {{"dim", spec.dim},
                 {"problem", spec.problem},
                 {"coupling", spec.coupling.label()},
                 {"H", spec.coarse_n},
                 {"norm", norm_name(spec.norm)},
                 {"max_iter", spec.iteration.max_iterations},
                 {"stop_tol", spec.iteration.stop_rel_change},
                 {"k_formula", spec.iteration.k_formula},
                 {"k_constant", spec.iteration.k_constant},
                 {"local_rhs", local_rhs_name(spec.local_rhs)},
                 {"threads", spec.threads}};
  // NaN has no JSON literal; nlohmann writes it as null.
  json rows = json::array();
  for (const ConvergenceRow& r : report.rows) {
    json history = json::array();
    for (const IterationRecord& it : r.history)
      history.push_back({{"iteration", it.iteration},
                         {"local_correction_h1", it.local_correction_h1},
                         {"coarse_correction_h1", it.coarse_correction_h1},
                         {"relative_change", it.relative_change},
                         {"step1_seconds", it.step1_seconds},
                         {"step2_seconds", it.step2_seconds}});
    rows.push_back({{"dim", r.dim},
                    {"problem", r.problem},
                    {"norm", norm_name(r.norm)},
                    {"H_n", r.coarse_n},
                    {"ratio", r.ratio},
                    {"err_coarse", r.err_coarse},
                    {"err_fine_ref", r.err_fine_ref},
                    {"err_final", r.err_final},
                    {"err_intermediate", r.err_intermediate},
                    {"ref_coarse", r.ref_coarse},
                    {"ref_final", r.ref_final},
                    {"order1", r.order1},
                    {"order2", r.order2},
                    {"iterations", r.iterations},
                    {"seconds", r.seconds},
                    {"history", history}});
  }
  doc["rows"] = rows;
  out << doc.dump(2) << '\n';
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunSpec spec;
  try {
    spec = parse_spec(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const SpecError& e) {
    for (const std::string& issue : e.issues()) err << "error: " << issue << '\n';
    return 1;
  }

  std::ofstream csv_file, json_file;
  if (!spec.out.empty()) {
    csv_file.open(spec.out, std::ios::binary);
    if (!csv_file) {
      err << "error: --out: cannot write '" << spec.out << "'\n";
      return 1;
    }
  }
  if (!spec.json_out.empty()) {
    json_file.open(spec.json_out, std::ios::binary);
    if (!json_file) {
      err << "error: --json: cannot write '" << spec.json_out << "'\n";
      return 1;
    }
  }

  ConvergenceReport report;
  try {
    report = run(spec, &err);
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 2;
  }

  write_csv(report, spec.out.empty() ? out : csv_file);
  if (json_file.is_open()) write_json(report, spec, json_file);
  return 0;
}

}  // namespace tgfem
