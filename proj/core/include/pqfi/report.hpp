#pragma once

// Parameter sweeps, comparison tables and their CSV/JSON serialisation.
//
// CSV: header row, `,` separator, `.` decimal point, LF line endings, doubles
// with 17 significant digits, +inf as `inf`, missing values as empty cells.
// JSON: an array of flat objects with the same keys; +inf as the string
// "inf"; missing values are absent keys.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pqfi/dist.hpp"
#include "pqfi/optimize.hpp"

namespace pqfi {

enum class RecordStatus { Exact, Converged, Diverges, NotConverged, Error };

std::string_view to_string(RecordStatus status) noexcept;
RecordStatus record_status_from_string(std::string_view text);

struct SweepRecord {
  double param_value = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double qfi = 0.0;
  std::optional<double> delta_phi;
  std::optional<double> weight_a;
  RecordStatus status = RecordStatus::Exact;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct SweepSpec {
  /// Builds the distribution at each value; unused for fixed-mean m&M sweeps.
  SpecTemplate family;
  std::string parameter = "param";
  /// Non-empty, strictly increasing. Cutoffs M for fixed-mean m&M sweeps.
  std::vector<double> values;
  /// When set, sweep the m&M cutoff M at this fixed mean with lower point m.
  std::optional<double> fixed_n;
  std::int64_t m = 0;
  std::uint32_t nu = 1;
  TruncationConfig truncation;
};

/// One record per value. Per-point failures become records with status Error
/// (or the moment status) instead of aborting the sweep. Invalid sweep specs
/// throw InvalidParameter.
std::vector<SweepRecord> run_sweep(const SweepSpec& spec);

/// Auto: closed form when available, summation otherwise.
enum class MomentMethod { Auto, ClosedForm, Summation };

/// Moments, QFI and bound for a single distribution, reported against
/// `param_value`.
SweepRecord evaluate(const DistributionSpec& spec, double param_value, std::uint32_t nu = 1,
                     const TruncationConfig& cfg = {}, MomentMethod method = MomentMethod::Auto);

/// 0&M records for M = ceil(N)+1 .. M_max at fixed mean N; weight_a = N/M.
std::vector<SweepRecord> figure1_dataset(double N, std::int64_t M_max);

struct ComparisonRow {
  std::string label;
  SweepRecord record;
  double ratio = 0.0;  ///< qfi / qfi of the first row
};

/// Evaluates each spec and relates its QFI to the first entry. Needs >= 2 specs.
std::vector<ComparisonRow> compare(std::span<const DistributionSpec> specs,
                                   std::span<const std::string> labels, std::uint32_t nu = 1,
                                   const TruncationConfig& cfg = {});

enum class Format { Csv, Json };

/// A cell is empty, a floating-point number, an integer or text.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string serialize(const Table& table, Format format);

Table to_table(std::span<const SweepRecord> records);
Table to_table(std::span<const ComparisonRow> rows);
Table to_table(const OptimizationProblem& prob, const Optimum& opt);
Table to_table(std::string_view family, const ScalingFit& fit);

/// Checks qfi == 4 variance on every finite record (InconsistentRecord) and
/// renders the fixed `param,mean,variance,qfi,delta_phi,weight_a,status` table.
std::string serialize(std::span<const SweepRecord> records, Format format);

/// Inverse of serialize for sweep records. Throws ParseError.
std::vector<SweepRecord> deserialize(std::string_view text, Format format);

/// 17 significant digits, locale independent; `inf`/`-inf` for infinities.
std::string format_double(double x);

}  // namespace pqfi
