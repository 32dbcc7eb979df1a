#include "cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddcalc/ddcore.hpp"
#include "ddcalc/errors.hpp"
#include "ddcalc/funcs.hpp"
#include "ddcalc/verify.hpp"

namespace ddcalc::cli {

using Json = nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw UsageError("bad number '" + text + "' in " + what);
  }
  return v;
}

int parse_int(const std::string& text, const std::string& what) {
  int v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw UsageError("bad integer '" + text + "' in " + what);
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_double(s, what));
  return out;
}

std::vector<int> parse_ints(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_int(s, what));
  return out;
}

// "v:m,v:m,..." with the multiplicity optional.
NodeSystem parse_nodes(const std::string& text) {
  std::vector<NodeSystem::Entry> entries;
  for (const auto& item : split(text, ',')) {
    const auto colon = item.find(':');
    const double v = parse_double(item.substr(0, colon), "--nodes");
    const int m = colon == std::string::npos ? 1 : parse_int(item.substr(colon + 1), "--nodes");
    if (m < 1) throw UsageError("multiplicities must be positive in --nodes");
    entries.push_back({v, m});
  }
  if (entries.empty()) throw UsageError("--nodes is empty");
  return NodeSystem(std::move(entries));
}

Json nodes_json(const NodeSystem& ns) {
  Json arr = Json::array();
  for (const auto& e : ns.entries()) arr.push_back(Json{{"value", e.value}, {"multiplicity", e.multiplicity}});
  return arr;
}

Json header(const std::string& command) {
  return Json{{"schema", 1}, {"command", command}};
}

void emit_json(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

// ---------------------------------------------------------------------------

struct EvalOptions {
  std::string format = "pretty";
};

int cmd_dd(const std::string& nodes_text, const std::string& func, const std::string& oracle,
           const EvalOptions& o, std::ostream& out) {
  const NodeSystem nodes = parse_nodes(nodes_text);
  const ScalarFunction f = fn::from_name(func);
  const double value = dd::dd_confluent(nodes, f);
  std::optional<double> ov;
  if (oracle == "hermite") {
    ov = dd::dd_hermite_genocchi(nodes, f);
  } else if (oracle == "contour") {
    ov = dd::dd_contour_auto(nodes, f);
  }
  if (o.format == "json") {
    Json j = header("dd");
    j["status"] = "ok";
    j["nodes"] = nodes_json(nodes);
    j["function"] = func;
    j["value"] = value;
    if (ov) {
      j["oracle"] = oracle;
      j["oracle_value"] = *ov;
      j["delta"] = std::abs(value - *ov);
    }
    emit_json(out, j);
  } else if (o.format == "csv") {
    out << "value" << (ov ? ",oracle,oracle_value,delta" : "") << "\n" << format_number(value);
    if (ov) out << "," << oracle << "," << format_number(*ov) << "," << format_number(std::abs(value - *ov));
    out << "\n";
  } else {
    out << format_number(value) << "\n";
    if (ov) {
      out << oracle << " " << format_number(*ov) << "\n";
      out << "delta " << format_number(std::abs(value - *ov)) << "\n";
    }
  }
  return kExitOk;
}

int emit_value(const std::string& command, Json fields, double value, const EvalOptions& o,
               std::ostream& out) {
  if (o.format == "json") {
    Json j = header(command);
    j["status"] = "ok";
    for (auto& [k, v] : fields.items()) j[k] = v;
    j["value"] = value;
    emit_json(out, j);
  } else if (o.format == "csv") {
    out << "value\n" << format_number(value) << "\n";
  } else {
    out << format_number(value) << "\n";
  }
  return kExitOk;
}

int cmd_hm(bool is_h, const std::string& alpha_text, const std::string& s_text, int m,
           const EvalOptions& o, std::ostream& out) {
  const funcs::MultiIndex alpha(parse_ints(alpha_text, "--alpha"));
  const auto s = parse_doubles(s_text, "--s");
  const double v = is_h ? funcs::h_func(alpha, s, m) : funcs::m_func(alpha, s, m);
  return emit_value(is_h ? "hfun" : "mfun", Json{{"alpha", alpha.parts}, {"s", s}, {"m", m}}, v, o, out);
}

int cmd_hcm(const std::string& idx_text, double a, double b, bool check, const EvalOptions& o,
            std::ostream& out) {
  const auto idx = parse_ints(idx_text, "--indices");
  if (idx.size() != 3) throw UsageError("--indices needs three integers");
  const double v = funcs::hcm(idx[0], idx[1], idx[2], a, b);
  std::optional<double> closed;
  if (check) {
    closed = funcs::hcm_closed_form(idx[0], idx[1], idx[2], a, b);
    if (!closed) throw CapabilityError("no closed form for these indices");
  }
  if (o.format == "json") {
    Json j = header("hcm");
    j["status"] = "ok";
    j["indices"] = idx;
    j["a"] = a;
    j["b"] = b;
    j["value"] = v;
    if (closed) {
      j["closed_form"] = *closed;
      j["delta"] = std::abs(v - *closed);
    }
    emit_json(out, j);
  } else if (o.format == "csv") {
    out << "value" << (closed ? ",closed_form,delta" : "") << "\n" << format_number(v);
    if (closed) out << "," << format_number(*closed) << "," << format_number(std::abs(v - *closed));
    out << "\n";
  } else {
    out << format_number(v) << "\n";
    if (closed) {
      out << "closed_form " << format_number(*closed) << "\n";
      out << "delta " << format_number(std::abs(v - *closed)) << "\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

Json record_json(const verify::CaseRecord& r) {
  Json j{{"check", r.check}, {"index", r.index}, {"inputs", r.inputs}, {"lhs", r.lhs},
         {"rhs", r.rhs},     {"delta", r.delta}, {"tolerance", r.tolerance}, {"pass", r.pass}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

struct CheckSummary {
  std::string name;
  int cases = 0;
  int failures = 0;
  double worst = 0.0;
};

std::vector<CheckSummary> summarize(const verify::SuiteReport& rep) {
  std::vector<CheckSummary> out;
  for (const auto& r : rep.cases) {
    if (out.empty() || out.back().name != r.check) out.push_back({r.check});
    auto& s = out.back();
    ++s.cases;
    if (!r.pass) ++s.failures;
    double ratio = 0.0;
    if (!r.error.empty() || !std::isfinite(r.delta)) {
      ratio = std::numeric_limits<double>::infinity();
    } else if (r.tolerance > 0.0) {
      ratio = r.delta / r.tolerance;
    } else if (r.delta > 0.0) {
      ratio = std::numeric_limits<double>::infinity();
    }
    s.worst = std::max(s.worst, ratio);
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

int cmd_verify(const std::string& suite, const verify::RunConfig& cfg, const std::vector<std::string>& only,
               const std::string& format, std::ostream& out, std::ostream& err) {
  const verify::SuiteReport rep =
      only.empty() ? verify::run_suite(suite, cfg) : verify::run_checks(suite, only, cfg);
  const bool ok = rep.passed();
  const auto checks = summarize(rep);
  if (format == "json") {
    Json j = header("verify");
    j["suite"] = suite;
    j["seed"] = cfg.seed;
    j["dim"] = cfg.dim;
    j["cases"] = cfg.cases;
    j["tol_scale"] = cfg.tol_scale;
    j["status"] = ok ? "pass" : "fail";
    j["total"] = rep.cases.size();
    j["failures"] = rep.failures();
    j["max_ratio"] = finite_or_null(rep.worst_ratio());
    Json cj = Json::array();
    for (const auto& c : checks) {
      cj.push_back(Json{{"name", c.name}, {"cases", c.cases}, {"failures", c.failures},
                        {"max_ratio", finite_or_null(c.worst)}});
    }
    j["checks"] = cj;
    Json rj = Json::array();
    for (const auto& r : rep.cases) rj.push_back(record_json(r));
    j["records"] = rj;
    emit_json(out, j);
  } else if (format == "csv") {
    out << "check,index,inputs,lhs,rhs,delta,tolerance,pass,error\r\n";
    for (const auto& r : rep.cases) {
      out << r.check << "," << r.index << "," << csv_field(r.inputs) << "," << format_number(r.lhs) << ","
          << format_number(r.rhs) << "," << format_number(r.delta) << "," << format_number(r.tolerance)
          << "," << (r.pass ? "true" : "false") << "," << csv_field(r.error) << "\r\n";
    }
  } else {
    for (const auto& c : checks) {
      std::ostringstream ratio;
      ratio << std::setprecision(3) << c.worst;
      out << (c.failures == 0 ? "PASS " : "FAIL ") << std::left << std::setw(26) << c.name << std::right
          << std::setw(6) << c.cases << " cases  max delta/tol " << ratio.str() << "\n";
    }
    for (const auto& r : rep.cases) {
      if (r.pass) continue;
      out << "  failed " << r.check << "#" << r.index << " " << r.inputs << ": lhs " << format_number(r.lhs)
          << " rhs " << format_number(r.rhs) << " delta " << format_number(r.delta) << " tol "
          << format_number(r.tolerance) << (r.error.empty() ? "" : " error: " + r.error) << "\n";
    }
    out << "suite " << suite << ": " << (ok ? "pass" : "fail") << " (" << rep.cases.size() << " cases, "
        << rep.failures() << " failed)\n";
  }
  err << "verify " << suite << " finished in " << std::fixed << std::setprecision(2) << rep.seconds << " s\n";
  return ok ? kExitOk : kExitTolerance;
}

// ---------------------------------------------------------------------------

const std::vector<std::array<int, 3>> kTableIndices = {{1, 1, 1}, {1, 2, 1}, {2, 1, 1}, {2, 2, 1}, {3, 1, 1}};

std::vector<std::pair<double, double>> parse_grid(const std::string& text) {
  std::vector<std::pair<double, double>> pts;
  if (text.empty()) {
    const double g[] = {0.5, 1.5, 2.0, 3.0};
    for (double a : g) {
      for (double b : g) {
        if (a != b) pts.emplace_back(a, b);
      }
    }
    return pts;
  }
  for (const auto& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("grid points are written a:b");
    pts.emplace_back(parse_double(item.substr(0, colon), "--grid"),
                     parse_double(item.substr(colon + 1), "--grid"));
  }
  return pts;
}

int cmd_table(const std::string& grid, double tol, const std::string& format, std::ostream& out) {
  struct Row {
    std::string name;
    double a, b, dd, closed, delta;
  };
  std::vector<Row> rows;
  double worst = 0.0;
  for (const auto& [a, b] : parse_grid(grid)) {
    for (const auto& ijk : kTableIndices) {
      const double v = funcs::hcm(ijk[0], ijk[1], ijk[2], a, b);
      const double c = *funcs::hcm_closed_form(ijk[0], ijk[1], ijk[2], a, b);
      const std::string name = "H" + std::to_string(ijk[0]) + std::to_string(ijk[1]) + std::to_string(ijk[2]);
      rows.push_back({name, a, b, v, c, std::abs(v - c)});
      worst = std::max(worst, rows.back().delta);
    }
  }
  const bool ok = worst < tol;
  if (format == "json") {
    Json j = header("table");
    j["status"] = ok ? "pass" : "fail";
    j["tolerance"] = tol;
    Json rj = Json::array();
    for (const auto& r : rows) {
      rj.push_back(Json{{"function", r.name}, {"a", r.a}, {"b", r.b}, {"dd_value", r.dd},
                        {"closed_form", r.closed}, {"delta", r.delta}});
    }
    j["rows"] = rj;
    j["max_delta"] = worst;
    emit_json(out, j);
  } else if (format == "csv") {
    out << "function,a,b,dd_value,closed_form,delta\r\n";
    for (const auto& r : rows) {
      out << r.name << "," << format_number(r.a) << "," << format_number(r.b) << "," << format_number(r.dd)
          << "," << format_number(r.closed) << "," << format_number(r.delta) << "\r\n";
    }
  } else {
    out << std::left << std::setw(9) << "function" << std::setw(6) << "a" << std::setw(6) << "b"
        << std::setw(24) << "dd_value" << std::setw(24) << "closed_form" << "delta\n";
    for (const auto& r : rows) {
      out << std::left << std::setw(9) << r.name << std::setw(6) << format_number(r.a) << std::setw(6)
          << format_number(r.b) << std::setw(24) << format_number(r.dd) << std::setw(24)
          << format_number(r.closed) << format_number(r.delta) << "\n";
    }
    out << "max delta " << format_number(worst) << (ok ? "" : " (exceeds tolerance)") << "\n";
  }
  return ok ? kExitOk : kExitTolerance;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Divided differences, operator kernels and identity checks"};
  app.name("ddcalc");
  app.require_subcommand(1);

  const std::vector<std::string> eval_formats = {"pretty", "json", "csv"};
  EvalOptions eo;

  std::string nodes_text, func, oracle;
  auto* dd_cmd = app.add_subcommand("dd", "Divided difference over a node system");
  dd_cmd->add_option("--nodes", nodes_text, "Nodes as value:multiplicity, comma separated")->required();
  dd_cmd->add_option("--func", func, "exp, log, idmlog:m, modlog:m, gaussian, cosh, basic, bernoulli, poly:c0,c1,...")
      ->required();
  dd_cmd->add_option("--oracle", oracle, "Independent route: hermite or contour")
      ->check(CLI::IsMember({"hermite", "contour"}));
  dd_cmd->add_option("--format", eo.format)->check(CLI::IsMember(eval_formats));

  std::string alpha_text, s_text;
  int m = 0;
  auto* h_cmd = app.add_subcommand("hfun", "H(s, m) = M((1, s), m)");
  auto* m_cmd = app.add_subcommand("mfun", "M(s, m)");
  for (auto* c : {h_cmd, m_cmd}) {
    c->add_option("--alpha", alpha_text, "Multi-index a_0,...,a_p")->required();
    c->add_option("--s", s_text, "Arguments, comma separated")->required();
    c->add_option("--m", m, "Integer m")->required();
    c->add_option("--format", eo.format)->check(CLI::IsMember(eval_formats));
  }

  std::string idx_text;
  double a = 0.0, b = 0.0;
  bool check_closed = false;
  auto* hcm_cmd = app.add_subcommand("hcm", "Two-variable H^CM_{i,j,k}(a, b)");
  hcm_cmd->add_option("--indices", idx_text, "i,j,k")->required();
  hcm_cmd->add_option("--a", a)->required();
  hcm_cmd->add_option("--b", b)->required();
  hcm_cmd->add_flag("--check-closed-form", check_closed, "Compare with the explicit log/rational form");
  hcm_cmd->add_option("--format", eo.format)->check(CLI::IsMember(eval_formats));

  std::string suite;
  verify::RunConfig cfg;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> only;
  std::string vformat = "json";
  auto* v_cmd = app.add_subcommand("verify", "Run a seeded fuzz suite; exit 0 iff every case passes");
  std::vector<std::string> suites = verify::suite_names();
  suites.push_back("all");
  v_cmd->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(suites));
  v_cmd->add_option("--seed", seed, "Seed (default: DDCALC_SEED or 1)");
  v_cmd->add_option("--dim", cfg.dim, "Matrix dimension (0: drawn per case)")->check(CLI::NonNegativeNumber);
  v_cmd->add_option("--cases", cfg.cases, "Cases per check (0: defaults)")->check(CLI::NonNegativeNumber);
  v_cmd->add_option("--tol-scale", cfg.tol_scale, "Multiplier on every tolerance")->check(CLI::PositiveNumber);
  v_cmd->add_option("--only", only, "Run only these checks")->delimiter(',');
  v_cmd->add_option("--format", vformat)->check(CLI::IsMember(eval_formats));

  std::string grid;
  double table_tol = 1e-10;
  std::string tformat = "pretty";
  auto* t_cmd = app.add_subcommand("table", "Divided-difference path vs explicit H^CM forms");
  t_cmd->add_option("--grid", grid, "Points a:b, comma separated (default {0.5,1.5,2,3}^2 off-diagonal)");
  t_cmd->add_option("--tol", table_tol, "Tolerance on the max delta");
  t_cmd->add_option("--format", tformat)->check(CLI::IsMember(eval_formats));

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(std::move(rev));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*dd_cmd) return cmd_dd(nodes_text, func, oracle, eo, out);
    if (*h_cmd) return cmd_hm(true, alpha_text, s_text, m, eo, out);
    if (*m_cmd) return cmd_hm(false, alpha_text, s_text, m, eo, out);
    if (*hcm_cmd) return cmd_hcm(idx_text, a, b, check_closed, eo, out);
    if (*v_cmd) {
      cfg.seed = seed ? *seed : verify::default_seed();
      return cmd_verify(suite, cfg, only, vformat, out, err);
    }
    if (*t_cmd) return cmd_table(grid, table_tol, tformat, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ToleranceError& e) {
    err << "tolerance not met: " << e.what() << " (estimate " << format_number(e.estimate()) << ", error "
        << format_number(e.error_estimate()) << ")\n";
    return kExitTolerance;
  } catch (const NumericError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitTolerance;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace ddcalc::cli
