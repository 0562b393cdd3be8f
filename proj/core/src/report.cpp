#include "pqfi/report.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "pqfi/error.hpp"
#include "pqfi/qfi.hpp"

namespace pqfi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::string> kRecordColumns = {"param",    "mean",     "variance", "qfi",
                                                 "delta_phi", "weight_a", "status"};

bool finite_status(RecordStatus s) { return s == RecordStatus::Exact || s == RecordStatus::Converged; }

SweepRecord failed(double param) {
  SweepRecord rec;
  rec.param_value = param;
  rec.mean = kNaN;
  rec.variance = kNaN;
  rec.qfi = kNaN;
  rec.status = RecordStatus::Error;
  return rec;
}

SweepRecord from_moments(double param, const MomentResult& mom, std::uint32_t nu) {
  SweepRecord rec;
  rec.param_value = param;
  switch (mom.status) {
    case MomentStatus::NotConverged:
      rec.mean = kNaN;
      rec.variance = kNaN;
      rec.qfi = kNaN;
      rec.status = RecordStatus::NotConverged;
      return rec;
    case MomentStatus::Diverges: rec.status = RecordStatus::Diverges; break;
    case MomentStatus::Converged: rec.status = RecordStatus::Converged; break;
    case MomentStatus::Exact: rec.status = RecordStatus::Exact; break;
  }
  const QfiReport q = qfi_from_moments(mom, nu);
  rec.mean = q.mean;
  rec.variance = q.variance;
  rec.qfi = q.qfi;
  rec.delta_phi = q.delta_phi;
  return rec;
}

Cell number(double x) {
  if (std::isnan(x)) return std::monostate{};
  return x;
}

Cell number(const std::optional<double>& x) {
  if (!x) return std::monostate{};
  return number(*x);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return std::isnan(*d) ? "" : format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* s = std::get_if<std::string>(&cell)) return csv_escape(*s);
  return "";
}

double parse_double(std::string_view text) {
  if (text == "inf") return kInf;
  if (text == "-inf") return -kInf;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(Errc::ParseError, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

void check_consistency(std::span<const SweepRecord> records) {
  for (const SweepRecord& r : records) {
    if (finite_status(r.status) && r.qfi != 4.0 * r.variance) {
      throw Error(Errc::InconsistentRecord,
                  "record at param " + format_double(r.param_value) + " violates qfi = 4 variance");
    }
  }
}

}  // namespace

std::string_view to_string(RecordStatus status) noexcept {
  switch (status) {
    case RecordStatus::Exact: return "exact";
    case RecordStatus::Converged: return "converged";
    case RecordStatus::Diverges: return "diverges";
    case RecordStatus::NotConverged: return "not_converged";
    case RecordStatus::Error: return "error";
  }
  return "error";
}

RecordStatus record_status_from_string(std::string_view text) {
  for (RecordStatus s : {RecordStatus::Exact, RecordStatus::Converged, RecordStatus::Diverges,
                         RecordStatus::NotConverged, RecordStatus::Error}) {
    if (to_string(s) == text) return s;
  }
  throw Error(Errc::ParseError, "unknown status '" + std::string(text) + "'");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

SweepRecord evaluate(const DistributionSpec& spec, double param_value, std::uint32_t nu,
                     const TruncationConfig& cfg, MomentMethod method) {
  MomentResult mom;
  switch (method) {
    case MomentMethod::ClosedForm:
      mom = moments_closed_form(spec);
      break;
    case MomentMethod::Summation:
      mom = moments_by_summation(make_pmf(spec), cfg);
      break;
    case MomentMethod::Auto:
      try {
        mom = moments_closed_form(spec);
      } catch (const Error& e) {
        if (e.code() != Errc::Unsupported) throw;
        mom = moments_by_summation(make_pmf(spec), cfg);
      }
      break;
  }
  return from_moments(param_value, mom, nu);
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw Error(Errc::InvalidParameter, "sweep: no values");
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    if (!std::isfinite(spec.values[k]) || (k > 0 && !(spec.values[k] > spec.values[k - 1]))) {
      throw Error(Errc::InvalidParameter, "sweep: values must be finite and strictly increasing");
    }
  }
  if (spec.nu < 1) throw Error(Errc::InvalidParameter, "sweep: nu must be >= 1");

  std::vector<SweepRecord> out;
  out.reserve(spec.values.size());

  if (spec.fixed_n) {
    const double N = *spec.fixed_n;
    if (!std::isfinite(N) || N < static_cast<double>(spec.m) || N > spec.values.front() ||
        spec.m < 0) {
      throw Error(Errc::InvalidParameter, "sweep: fixed mean must lie in [m, M] for every M");
    }
    for (double value : spec.values) {
      if (value != std::floor(value) || !(value > static_cast<double>(spec.m))) {
        out.push_back(failed(value));
        continue;
      }
      const auto M = static_cast<std::int64_t>(value);
      SweepRecord rec;
      rec.param_value = value;
      rec.mean = N;
      rec.variance = bhatia_davis_bound(spec.m, M, N);
      rec.qfi = qfi_mandm_fixed_n(spec.m, M, N);
      if (rec.qfi > 0.0) rec.delta_phi = crlb(rec.qfi, spec.nu);
      rec.weight_a = (N - static_cast<double>(spec.m)) / static_cast<double>(M - spec.m);
      rec.status = RecordStatus::Exact;
      out.push_back(rec);
    }
    return out;
  }

  if (!spec.family) throw Error(Errc::InvalidParameter, "sweep: missing family template");
  for (double value : spec.values) {
    try {
      out.push_back(evaluate(spec.family(value), value, spec.nu, spec.truncation));
    } catch (const Error&) {
      out.push_back(failed(value));
    }
  }
  return out;
}

std::vector<SweepRecord> figure1_dataset(double N, std::int64_t M_max) {
  if (!std::isfinite(N) || !(N > 0.0) || !(static_cast<double>(M_max) > N)) {
    throw Error(Errc::InvalidParameter, "figure1: requires N > 0 and M_max > N");
  }
  const auto start = static_cast<std::int64_t>(std::ceil(N)) + 1;
  if (start > M_max) {
    throw Error(Errc::InvalidParameter, "figure1: no cutoff M in [ceil(N)+1, M_max]");
  }
  SweepSpec spec;
  spec.parameter = "M";
  spec.fixed_n = N;
  spec.m = 0;
  for (std::int64_t M = start; M <= M_max; ++M) spec.values.push_back(static_cast<double>(M));
  return run_sweep(spec);
}

std::vector<ComparisonRow> compare(std::span<const DistributionSpec> specs,
                                   std::span<const std::string> labels, std::uint32_t nu,
                                   const TruncationConfig& cfg) {
  if (specs.size() < 2) throw Error(Errc::InvalidParameter, "compare: needs at least two specs");
  if (!labels.empty() && labels.size() != specs.size()) {
    throw Error(Errc::InvalidParameter, "compare: one label per spec");
  }
  std::vector<ComparisonRow> rows;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    ComparisonRow row;
    row.label = labels.empty() ? specs[k].describe() : labels[k];
    row.record = evaluate(specs[k], specs[k].primary_parameter(), nu, cfg);
    rows.push_back(std::move(row));
  }
  const double base = rows.front().record.qfi;
  for (ComparisonRow& row : rows) {
    const double q = row.record.qfi;
    row.ratio = (std::isfinite(base) && base > 0.0 && !std::isnan(q)) ? q / base : kNaN;
  }
  return rows;
}

Table to_table(std::span<const SweepRecord> records) {
  Table t;
  t.columns = kRecordColumns;
  for (const SweepRecord& r : records) {
    t.rows.push_back({number(r.param_value), number(r.mean), number(r.variance), number(r.qfi),
                      number(r.delta_phi), number(r.weight_a), std::string(to_string(r.status))});
  }
  return t;
}

Table to_table(std::span<const ComparisonRow> rows) {
  Table t;
  t.columns = {"family", "mean", "variance", "qfi", "delta_phi", "ratio", "status"};
  for (const ComparisonRow& row : rows) {
    const SweepRecord& r = row.record;
    t.rows.push_back({row.label, number(r.mean), number(r.variance), number(r.qfi),
                      number(r.delta_phi), number(row.ratio), std::string(to_string(r.status))});
  }
  return t;
}

Table to_table(const OptimizationProblem& prob, const Optimum& opt) {
  std::string support, weights;
  for (std::size_t k = 0; k < opt.support_points.size(); ++k) {
    if (k > 0) {
      support += ';';
      weights += ';';
    }
    support += std::to_string(opt.support_points[k]);
    weights += format_double(opt.weights[k]);
  }
  Table t;
  t.columns = {"m", "M", "N", "support", "weights", "variance", "qfi", "bound_gap"};
  t.rows.push_back({prob.m, prob.M, prob.N, support, weights, opt.variance, 4.0 * opt.variance,
                    opt.bound_gap});
  return t;
}

Table to_table(std::string_view family, const ScalingFit& fit) {
  Table t;
  t.columns = {"family", "exponent", "intercept", "r_squared", "n_min",
               "n_max",  "points",   "delta_phi_exponent"};
  t.rows.push_back({std::string(family), fit.exponent, fit.intercept, fit.r_squared, fit.n_min,
                    fit.n_max, static_cast<std::int64_t>(fit.points), -fit.exponent / 2.0});
  return t;
}

std::string serialize(const Table& table, Format format) {
  if (format == Format::Csv) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c > 0) out += ',';
      out += csv_escape(table.columns[c]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c > 0) out += ',';
        out += csv_cell(row[c]);
      }
      out += '\n';
    }
    return out;
  }

  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size() && c < table.columns.size(); ++c) {
      const std::string& key = table.columns[c];
      const Cell& cell = row[c];
      if (const auto* d = std::get_if<double>(&cell)) {
        if (std::isnan(*d)) continue;
        if (std::isinf(*d)) {
          obj[key] = format_double(*d);
        } else {
          obj[key] = *d;
        }
      } else if (const auto* i = std::get_if<std::int64_t>(&cell)) {
        obj[key] = *i;
      } else if (const auto* s = std::get_if<std::string>(&cell)) {
        obj[key] = *s;
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

std::string serialize(std::span<const SweepRecord> records, Format format) {
  check_consistency(records);
  return serialize(to_table(records), format);
}

std::vector<SweepRecord> deserialize(std::string_view text, Format format) {
  std::vector<SweepRecord> out;
  auto optional_number = [](std::string_view cell) -> std::optional<double> {
    if (cell.empty()) return std::nullopt;
    return parse_double(cell);
  };

  if (format == Format::Csv) {
    std::vector<std::string_view> lines = split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw Error(Errc::ParseError, "csv: missing header");
    std::string header;
    for (std::size_t c = 0; c < kRecordColumns.size(); ++c) {
      header += (c > 0 ? "," : "") + kRecordColumns[c];
    }
    if (lines.front() != header) throw Error(Errc::ParseError, "csv: unexpected header");
    for (std::size_t k = 1; k < lines.size(); ++k) {
      const auto cells = split(lines[k], ',');
      if (cells.size() != kRecordColumns.size()) {
        throw Error(Errc::ParseError, "csv: wrong field count on line " + std::to_string(k + 1));
      }
      SweepRecord r;
      r.param_value = optional_number(cells[0]).value_or(kNaN);
      r.mean = optional_number(cells[1]).value_or(kNaN);
      r.variance = optional_number(cells[2]).value_or(kNaN);
      r.qfi = optional_number(cells[3]).value_or(kNaN);
      r.delta_phi = optional_number(cells[4]);
      r.weight_a = optional_number(cells[5]);
      r.status = record_status_from_string(cells[6]);
      out.push_back(r);
    }
    return out;
  }

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("json: ") + e.what());
  }
  if (!doc.is_array()) throw Error(Errc::ParseError, "json: expected an array");
  auto field = [](const nlohmann::json& obj, const char* key) -> std::optional<double> {
    const auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (it->is_string()) return parse_double(it->get<std::string>());
    if (it->is_number()) return it->get<double>();
    throw Error(Errc::ParseError, std::string("json: bad value for ") + key);
  };
  for (const auto& obj : doc) {
    if (!obj.is_object()) throw Error(Errc::ParseError, "json: expected objects");
    SweepRecord r;
    r.param_value = field(obj, "param").value_or(kNaN);
    r.mean = field(obj, "mean").value_or(kNaN);
    r.variance = field(obj, "variance").value_or(kNaN);
    r.qfi = field(obj, "qfi").value_or(kNaN);
    r.delta_phi = field(obj, "delta_phi");
    r.weight_a = field(obj, "weight_a");
    const auto st = obj.find("status");
    if (st == obj.end() || !st->is_string()) throw Error(Errc::ParseError, "json: missing status");
    r.status = record_status_from_string(st->get<std::string>());
    out.push_back(r);
  }
  return out;
}

}  // namespace pqfi
