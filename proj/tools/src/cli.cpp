#include "pqfi_cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pqfi/error.hpp"
#include "pqfi/optimize.hpp"
#include "pqfi/qfi.hpp"
#include "pqfi/report.hpp"
#include "pqfi/version.hpp"

namespace pqfi::cli {

namespace {

using json = nlohmann::ordered_json;
using Params = std::map<std::string, std::string>;

// ---------------------------------------------------------------------------
// Family construction from key/value parameters.

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw Error(Errc::InvalidParameter, key + ": expected a real number, got '" + text + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  std::int64_t v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(Errc::InvalidParameter, key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

std::string canonical_family(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
  static const std::map<std::string, std::string> aliases = {
      {"mandm", "mandm"},       {"m&m", "mandm"},
      {"coherent", "coherent"}, {"squeezed", "squeezed"},
      {"ssw", "ssw"},           {"ss", "ss"},
      {"dowling", "dowling"},   {"small-peak", "small-peak"},
      {"smallpeak", "small-peak"}, {"geometric", "geometric"},
      {"negbin", "negbin"},     {"negative-binomial", "negbin"},
      {"logarithmic", "logarithmic"}, {"borel", "borel"},
      {"zeta", "zeta"},
  };
  const auto it = aliases.find(name);
  if (it == aliases.end()) throw Error(Errc::InvalidParameter, "unknown family '" + name + "'");
  return it->second;
}

DistributionSpec parse_spec_string(const std::string& text);

class ParamReader {
 public:
  ParamReader(std::string family, const Params& params) : family_(std::move(family)), params_(params) {}

  bool has(const std::string& key) {
    used_.insert(key);
    return params_.count(key) > 0;
  }
  double real(const std::string& key) {
    if (!has(key)) throw Error(Errc::InvalidParameter, family_ + " requires --" + key);
    return parse_real("--" + key, params_.at(key));
  }
  double real_or(const std::string& key, double fallback) { return has(key) ? real(key) : fallback; }
  std::int64_t integer(const std::string& key) {
    if (!has(key)) throw Error(Errc::InvalidParameter, family_ + " requires --" + key);
    return parse_int("--" + key, params_.at(key));
  }
  std::int64_t integer_or(const std::string& key, std::int64_t fallback) {
    return has(key) ? integer(key) : fallback;
  }
  const std::string& text(const std::string& key) {
    if (!has(key)) throw Error(Errc::InvalidParameter, family_ + " requires --" + key);
    return params_.at(key);
  }
  // Exactly one of two alternative parameterisations.
  bool either(const std::string& a, const std::string& b) {
    const bool ha = has(a), hb = has(b);
    if (ha == hb) throw Error(Errc::InvalidParameter, family_ + " takes exactly one of --" + a + ", --" + b);
    return ha;
  }
  void reject_unused() const {
    for (const auto& [key, value] : params_) {
      if (!used_.count(key)) throw Error(Errc::InvalidParameter, family_ + " does not take --" + key);
    }
  }

 private:
  std::string family_;
  const Params& params_;
  std::set<std::string> used_;
};

// Demo defaults for the cutoff-type families.
constexpr std::int64_t kDemoCutoff = 100;
constexpr double kDemoZ = 1.0;
constexpr double kDemoEta = 10.0;

DistributionSpec build_spec(const std::string& raw_family, const Params& params) {
  const std::string fam = canonical_family(raw_family);
  ParamReader p(fam, params);
  auto by_mean = [&](const char* name, double eta) { return mean_template(name, eta)(p.real("n")); };
  std::optional<DistributionSpec> spec;
  if (fam == "mandm") {
    const std::int64_t m = p.integer_or("m", 0);
    const std::int64_t M = p.integer("M");
    double a = 0.0;
    if (p.either("a", "n")) {
      a = p.real("a");
    } else {
      if (M <= m) throw Error(Errc::InvalidParameter, "mandm requires m < M");
      a = (p.real("n") - static_cast<double>(m)) / static_cast<double>(M - m);
    }
    spec = DistributionSpec(family::MAndM{m, M, a});
  } else if (fam == "coherent") {
    spec = DistributionSpec(family::Coherent{p.real("n")});
  } else if (fam == "squeezed") {
    spec = p.either("r", "n") ? DistributionSpec(family::SqueezedVacuum{p.real("r")}) : by_mean("squeezed", 1.0);
  } else if (fam == "ssw") {
    spec = DistributionSpec(family::Ssw{p.integer_or("M", kDemoCutoff)});
  } else if (fam == "ss") {
    spec = DistributionSpec(family::Ss{p.integer_or("M", kDemoCutoff), p.real_or("z", kDemoZ)});
  } else if (fam == "dowling") {
    spec = DistributionSpec(family::Dowling{p.real_or("z", kDemoZ), p.real_or("eta", kDemoEta)});
  } else if (fam == "small-peak") {
    spec = DistributionSpec::small_peak(p.real("a"), parse_spec_string(p.text("inner")));
  } else if (fam == "geometric") {
    spec = p.either("mu", "n") ? DistributionSpec(family::Geometric{p.real("mu")}) : by_mean("geometric", 1.0);
  } else if (fam == "negbin") {
    const double eta = p.real("eta");
    spec = p.either("mu", "n") ? DistributionSpec(family::NegativeBinomial{p.real("mu"), eta})
                               : by_mean("negbin", eta);
  } else if (fam == "logarithmic") {
    spec = p.either("mu", "n") ? DistributionSpec(family::Logarithmic{p.real("mu")}) : by_mean("logarithmic", 1.0);
  } else if (fam == "borel") {
    spec = p.either("mu", "n") ? DistributionSpec(family::Borel{p.real("mu")}) : by_mean("borel", 1.0);
  } else {
    spec = p.either("s", "n") ? DistributionSpec(family::Zeta{p.real("s")}) : by_mean("zeta", 1.0);
  }
  p.reject_unused();
  return *spec;
}

// "family:key=value,key=value". An `inner=` entry takes the rest of the text.
DistributionSpec parse_spec_string(const std::string& text) {
  const auto colon = text.find(':');
  const std::string fam = text.substr(0, colon);
  Params params;
  if (colon != std::string::npos) {
    std::size_t pos = colon + 1;
    while (pos < text.size()) {
      if (text.compare(pos, 6, "inner=") == 0) {
        params["inner"] = text.substr(pos + 6);
        break;
      }
      const auto comma = text.find(',', pos);
      const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(Errc::InvalidParameter, "malformed spec entry '" + item + "' in '" + text + "'");
      }
      std::string key = item.substr(0, eq);
      if (key == "n-fixed") key = "n";
      if (!params.emplace(key, item.substr(eq + 1)).second) {
        throw Error(Errc::InvalidParameter, "duplicate key '" + key + "' in '" + text + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  return build_spec(fam, params);
}

// ---------------------------------------------------------------------------
// Output.

enum class OutFormat { Csv, Json, Human };

struct Metadata {
  std::vector<std::pair<std::string, json>> entries;
};

std::string quote_arg(const std::string& a) {
  if (!a.empty() && a.find_first_of(" \t\"'\\$&;|<>()*?") == std::string::npos) return a;
  std::string out = "'";
  for (char c : a) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

Metadata base_metadata(const std::vector<std::string>& args, double tail_epsilon) {
  Metadata md;
  md.entries.emplace_back("tool", "pqfi");
  md.entries.emplace_back("version", kVersion);
  json argv = json::array();
  for (const auto& a : args) argv.push_back(a);
  md.entries.emplace_back("argv", argv);
  md.entries.emplace_back("tail_epsilon", tail_epsilon);
  return md;
}

std::string metadata_value_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (const auto& item : v) {
      if (!out.empty()) out += ' ';
      out += quote_arg(item.is_string() ? item.get<std::string>() : item.dump());
    }
    return out;
  }
  return v.dump();
}

std::string human_cell(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return "-";
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string render_human(const Table& t, bool color) {
  const std::string bold = color ? "\x1b[1m" : "";
  const std::string reset = color ? "\x1b[0m" : "";
  std::ostringstream os;
  if (t.rows.size() == 1) {
    std::size_t w = 0;
    for (const auto& c : t.columns) w = std::max(w, c.size());
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
      os << bold << t.columns[k] << reset << std::string(w - t.columns[k].size() + 2, ' ')
         << human_cell(t.rows[0][k]) << '\n';
    }
    return os.str();
  }
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width(t.columns.size());
  for (std::size_t k = 0; k < t.columns.size(); ++k) width[k] = t.columns[k].size();
  for (const auto& row : t.rows) {
    auto& out = cells.emplace_back();
    for (std::size_t k = 0; k < row.size(); ++k) {
      out.push_back(human_cell(row[k]));
      width[k] = std::max(width[k], out.back().size());
    }
  }
  for (std::size_t k = 0; k < t.columns.size(); ++k) {
    os << bold << t.columns[k] << reset << (k + 1 < t.columns.size() ? std::string(width[k] - t.columns[k].size() + 2, ' ') : "");
  }
  os << '\n';
  for (const auto& row : cells) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      os << row[k] << (k + 1 < row.size() ? std::string(width[k] - row[k].size() + 2, ' ') : "");
    }
    os << '\n';
  }
  return os.str();
}

// `body` is the exact serialize() output for csv/json.
std::string emit(const Table& table, const std::string& body_csv_or_json, OutFormat fmt, const Metadata& md,
                 bool with_metadata, bool color) {
  if (fmt == OutFormat::Json) {
    if (!with_metadata) return body_csv_or_json;
    json doc;
    json meta = json::object();
    for (const auto& [k, v] : md.entries) meta[k] = v;
    doc["metadata"] = meta;
    doc["records"] = json::parse(body_csv_or_json);
    return doc.dump(2) + "\n";
  }
  std::string preamble;
  if (with_metadata) {
    for (const auto& [k, v] : md.entries) preamble += "# " + k + ": " + metadata_value_text(v) + "\n";
  }
  if (fmt == OutFormat::Csv) return preamble + body_csv_or_json;
  return preamble + render_human(table, color);
}

// ---------------------------------------------------------------------------
// Commands.

struct Common {
  std::string format = "csv";
  std::string output;
  bool no_metadata = false;
  double tail_epsilon = 1e-14;
  std::int64_t max_terms = 10'000'000;
  std::uint32_t nu = 1;
};

OutFormat to_format(const std::string& f) {
  if (f == "csv") return OutFormat::Csv;
  if (f == "json") return OutFormat::Json;
  return OutFormat::Human;
}

Format machine(OutFormat f) { return f == OutFormat::Json ? Format::Json : Format::Csv; }

// Flags shared by commands that describe one distribution.
struct FamilyFlags {
  std::string family;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void attach(CLI::App* app) {
    app->add_option("--family", family, "Distribution family")->required();
    for (const char* key : {"mu", "eta", "s", "r", "n", "n-fixed", "m", "M", "a", "z", "inner"}) {
      options.emplace_back(key, app->add_option(std::string("--") + key, values[key]));
    }
  }

  DistributionSpec build() const {
    Params params;
    for (const auto& [key, opt] : options) {
      if (opt->count() == 0) continue;
      const std::string k = key == "n-fixed" ? "n" : key;
      if (!params.emplace(k, values.at(key)).second) {
        throw Error(Errc::InvalidParameter, "--n and --n-fixed are the same parameter");
      }
    }
    return build_spec(family, params);
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env) {
  CLI::App app{"Photon-number statistics and quantum Fisher information for phase estimation", "pqfi"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool with_nu) {
    sub->add_option("--format", common.format, "csv, json or human")
        ->check(CLI::IsMember({"csv", "json", "human"}));
    sub->add_option("--output", common.output, "Write data to this file instead of stdout");
    sub->add_flag("--no-metadata", common.no_metadata, "Emit only the serialized table");
    sub->add_option("--tail-epsilon", common.tail_epsilon, "Summation tail tolerance");
    sub->add_option("--max-terms", common.max_terms, "Summation term limit");
    if (with_nu) sub->add_option("--nu", common.nu, "Number of repetitions")->check(CLI::PositiveNumber);
  };

  FamilyFlags eval_flags;
  std::string method = "auto";
  CLI::App* eval = app.add_subcommand("eval", "Moments, QFI and phase bound of one distribution");
  eval_flags.attach(eval);
  eval->add_option("--method", method, "auto, closed or sum")->check(CLI::IsMember({"auto", "closed", "sum"}));
  add_common(eval, true);

  std::vector<std::string> compare_specs;
  CLI::App* cmp = app.add_subcommand("compare", "QFI of several distributions relative to the first");
  cmp->add_option("--spec", compare_specs, "family:key=value,... (repeatable)")->required();
  add_common(cmp, true);

  std::int64_t opt_m = 0, opt_M = 0;
  double opt_n = 0.0;
  CLI::App* optimize = app.add_subcommand("optimize", "Maximum variance on {m..M} at fixed mean");
  optimize->add_option("--m", opt_m, "Lowest photon number");
  optimize->add_option("--M", opt_M, "Highest photon number")->required();
  auto* n_opt = optimize->add_option("--n", opt_n, "Mean photon number");
  optimize->add_option("--n-fixed", opt_n, "Alias of --n")->excludes(n_opt);
  add_common(optimize, false);

  std::string scale_family;
  double scale_eta = 1.0, n_min = 1e2, n_max = 1e4;
  int points = 25;
  CLI::App* scaling = app.add_subcommand("scaling", "Fit the QFI-vs-N exponent of an unbounded family");
  scaling->add_option("--family", scale_family, "geometric, negbin, logarithmic, borel, coherent, squeezed, zeta")
      ->required();
  scaling->add_option("--eta", scale_eta, "Negative-binomial eta");
  scaling->add_option("--n-min", n_min, "Smallest mean photon number");
  scaling->add_option("--n-max", n_max, "Largest mean photon number");
  scaling->add_option("--points", points, "Number of log-spaced points");
  add_common(scaling, false);

  double fig_n = 7.46;
  std::int64_t fig_mmax = 3500;
  CLI::App* fig = app.add_subcommand("figure1", "0&M QFI against cutoff M at fixed mean");
  fig->add_option("--n", fig_n, "Mean photon number");
  fig->add_option("--M-max", fig_mmax, "Largest cutoff");
  add_common(fig, false);

  double tol = 1e-6;
  CLI::App* crit = app.add_subcommand("critical-mu", "Sign change of the logarithmic variance excess");
  crit->add_option("--tol", tol, "Bisection tolerance");
  add_common(crit, false);

  // CLI11 consumes arguments from the back.
  std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kArgumentError;
  }

  const OutFormat fmt = to_format(common.format);
  const bool color = env.color && common.output.empty();
  Metadata md = base_metadata(args, common.tail_epsilon);
  TruncationConfig cfg;
  cfg.tail_epsilon = common.tail_epsilon;
  cfg.max_terms = common.max_terms;

  int code = kOk;
  std::string text;
  try {
    if (eval->parsed()) {
      const DistributionSpec spec = eval_flags.build();
      const MomentMethod mm = method == "closed" ? MomentMethod::ClosedForm
                              : method == "sum"  ? MomentMethod::Summation
                                                 : MomentMethod::Auto;
      const SweepRecord rec = evaluate(spec, spec.primary_parameter(), common.nu, cfg, mm);
      md.entries.emplace_back("distribution", spec.describe());
      md.entries.emplace_back("nu", common.nu);
      if (rec.status == RecordStatus::Diverges) {
        const std::string note = "variance diverges; QFI is infinite and delta_phi is undefined";
        md.entries.emplace_back("note", note);
        err << "note: " << note << '\n';
      }
      if (rec.status == RecordStatus::NotConverged) {
        err << "error: summation did not converge within " << common.max_terms << " terms\n";
        code = kNotConverged;
      }
      const std::vector<SweepRecord> recs{rec};
      text = emit(to_table(recs), serialize(recs, machine(fmt)), fmt, md, !common.no_metadata, color);
    } else if (cmp->parsed()) {
      std::vector<DistributionSpec> specs;
      for (const auto& s : compare_specs) specs.push_back(parse_spec_string(s));
      const auto rows = compare(specs, compare_specs, common.nu, cfg);
      md.entries.emplace_back("nu", common.nu);
      const Table t = to_table(rows);
      text = emit(t, serialize(t, machine(fmt)), fmt, md, !common.no_metadata, color);
    } else if (optimize->parsed()) {
      const OptimizationProblem prob{opt_m, opt_M, opt_n};
      const Table t = to_table(prob, maximize_variance(prob));
      text = emit(t, serialize(t, machine(fmt)), fmt, md, !common.no_metadata, color);
    } else if (scaling->parsed()) {
      const std::string fam = canonical_family(scale_family);
      if (!(n_min > 0.0 && n_max > n_min)) throw Error(Errc::InvalidParameter, "need 0 < --n-min < --n-max");
      if (points < 2) throw Error(Errc::InvalidParameter, "--points must be at least 2");
      const ScalingFit fit = fit_scaling_exponent(mean_template(fam, scale_eta), log_spaced(n_min, n_max, points));
      const Table t = to_table(fam, fit);
      text = emit(t, serialize(t, machine(fmt)), fmt, md, !common.no_metadata, color);
    } else if (fig->parsed()) {
      const auto recs = figure1_dataset(fig_n, fig_mmax);
      md.entries.emplace_back("mean_photons", fig_n);
      md.entries.emplace_back("h_sq", qfi_squeezed(fig_n));
      md.entries.emplace_back("crossover_M", crossover_m(fig_n, qfi_squeezed(fig_n)));
      text = emit(to_table(recs), serialize(recs, machine(fmt)), fmt, md, !common.no_metadata, color);
    } else if (crit->parsed()) {
      const double mu = logarithmic_critical_mu(tol);
      Table t;
      t.columns = {"mu_c", "tol", "excess_below", "excess_above"};
      const double step = std::max(10 * tol, 1e-3);
      t.rows.push_back({mu, tol, logarithmic_variance_excess(mu - step), logarithmic_variance_excess(mu + step)});
      text = emit(t, serialize(t, machine(fmt)), fmt, md, !common.no_metadata, color);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case Errc::NotConvergedInput: return kNotConverged;
      case Errc::DivergentMember: return kDivergent;
      default: return kArgumentError;
    }
  }

  if (common.output.empty()) {
    out << text;
  } else {
    std::ofstream file(common.output, std::ios::binary);
    file << text;
    if (!file) {
      err << "error: cannot write " << common.output << '\n';
      return kArgumentError;
    }
  }
  return code;
}

}  // namespace pqfi::cli
