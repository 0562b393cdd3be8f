#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "pqfi/error.hpp"
#include "pqfi/qfi.hpp"
#include "pqfi/report.hpp"

using namespace pqfi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class Fn>
Errc code_of(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected pqfi::Error";
  return Errc::ParseError;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const SweepRecord& at_param(const std::vector<SweepRecord>& recs, double v) {
  for (const auto& r : recs) {
    if (r.param_value == v) return r;
  }
  throw std::runtime_error("no record");
}

// Random double whose bit pattern exercises all 17 digits.
double rough(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mant(1.0, 10.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  return mant(rng) * std::pow(10.0, ex(rng));
}

}  // namespace

TEST(Figure1, WorkingPoint) {
  const auto recs = figure1_dataset(7.46, 100);
  ASSERT_EQ(recs.size(), 100u - 9u + 1u);
  EXPECT_EQ(recs.front().param_value, 9.0);
  EXPECT_EQ(recs.back().param_value, 100.0);
  const SweepRecord& r25 = at_param(recs, 25);
  const SweepRecord& r24 = at_param(recs, 24);
  const double hsq = qfi_squeezed(7.46);
  EXPECT_NEAR(r25.qfi, 523.39, 0.01);
  EXPECT_NEAR(r24.qfi, 493.55, 0.01);
  EXPECT_GT(r25.qfi, hsq);
  EXPECT_LT(r24.qfi, hsq);
  ASSERT_TRUE(r25.weight_a.has_value());
  EXPECT_NEAR(*r25.weight_a, 0.2984, 1e-12);
  EXPECT_EQ(r25.mean, 7.46);
  EXPECT_EQ(r25.status, RecordStatus::Exact);
}

TEST(Figure1, MonotoneColumns) {
  const auto recs = figure1_dataset(7.46, 3500);
  for (std::size_t k = 1; k < recs.size(); ++k) {
    ASSERT_GT(recs[k].qfi, recs[k - 1].qfi);
    ASSERT_LT(*recs[k].weight_a, *recs[k - 1].weight_a);
    ASSERT_EQ(recs[k].qfi, 4.0 * recs[k].variance);
  }
  EXPECT_GT(recs.back().qfi, 1e5);
}

TEST(Figure1, SingleCutoff) {
  const auto recs = figure1_dataset(1.0, 2);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].param_value, 2.0);
  EXPECT_DOUBLE_EQ(recs[0].qfi, 4.0);
  EXPECT_DOUBLE_EQ(*recs[0].weight_a, 0.5);
}

TEST(Figure1, Errors) {
  EXPECT_EQ(code_of([] { figure1_dataset(0.0, 10); }), Errc::InvalidParameter);
  EXPECT_EQ(code_of([] { figure1_dataset(7.46, 7); }), Errc::InvalidParameter);
  EXPECT_EQ(code_of([] { figure1_dataset(7.46, 8); }), Errc::InvalidParameter);
}

TEST(Figure1, MatchesGoldenCsv) {
  const std::string golden = read_file(std::string(PQFI_GOLDEN_DIR) + "/figure1_n7.46_m3500.csv");
  ASSERT_FALSE(golden.empty());
  EXPECT_EQ(serialize(figure1_dataset(7.46, 3500), Format::Csv), golden);
}

TEST(Sweep, FixedMeanMAndM) {
  SweepSpec spec;
  spec.parameter = "M";
  spec.fixed_n = 7.46;
  for (int M = 8; M <= 100; ++M) spec.values.push_back(M);
  const auto recs = run_sweep(spec);
  ASSERT_EQ(recs.size(), 93u);
  const SweepRecord& r = at_param(recs, 25);
  EXPECT_NEAR(r.qfi, 523.39, 0.01);
  EXPECT_NEAR(*r.weight_a, 0.2984, 1e-12);
}

TEST(Sweep, Borel) {
  SweepSpec spec;
  spec.parameter = "mu";
  spec.family = [](double mu) { return DistributionSpec(family::Borel{mu}); };
  spec.values = {0.9, 0.99, 0.999};
  const auto recs = run_sweep(spec);
  const double Ns[] = {10, 100, 1000};
  for (int k = 0; k < 3; ++k) {
    const double N = Ns[k];
    EXPECT_NEAR(recs[k].mean, N, 1e-9 * N);
    EXPECT_NEAR(recs[k].qfi, 4 * N * N * (N - 1), 1e-9 * recs[k].qfi);
    EXPECT_FALSE(recs[k].weight_a.has_value());
  }
  EXPECT_NEAR(recs[1].qfi, 3.96e6, 1e-3);
}

TEST(Sweep, FailuresBecomeRecords) {
  SweepSpec spec;
  spec.family = [](double mu) { return DistributionSpec(family::Geometric{mu}); };
  spec.values = {0.5, 1.5};
  const auto recs = run_sweep(spec);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].status, RecordStatus::Exact);
  EXPECT_EQ(recs[1].status, RecordStatus::Error);
  EXPECT_TRUE(std::isnan(recs[1].qfi));
}

TEST(Sweep, DivergentPointIsData) {
  SweepSpec spec;
  spec.family = [](double s) { return DistributionSpec(family::Zeta{s}); };
  spec.values = {2.5, 4.0};
  const auto recs = run_sweep(spec);
  EXPECT_EQ(recs[0].status, RecordStatus::Diverges);
  EXPECT_TRUE(std::isinf(recs[0].qfi));
  EXPECT_FALSE(recs[0].delta_phi.has_value());
  EXPECT_EQ(recs[1].status, RecordStatus::Exact);
}

TEST(Sweep, InvalidSpecs) {
  SweepSpec empty;
  empty.family = [](double mu) { return DistributionSpec(family::Geometric{mu}); };
  EXPECT_EQ(code_of([&] { run_sweep(empty); }), Errc::InvalidParameter);
  SweepSpec unsorted = empty;
  unsorted.values = {0.5, 0.4};
  EXPECT_EQ(code_of([&] { run_sweep(unsorted); }), Errc::InvalidParameter);
  SweepSpec outside;
  outside.fixed_n = 30.0;
  outside.values = {25.0, 26.0};
  EXPECT_EQ(code_of([&] { run_sweep(outside); }), Errc::InvalidParameter);
}

TEST(Compare, Ratios) {
  const double N = 7.46;
  {
    const DistributionSpec specs[] = {DistributionSpec(family::SqueezedVacuum{std::asinh(std::sqrt(N))}),
                                      DistributionSpec(family::MAndM{0, 25, N / 25})};
    const auto rows = compare(specs, {});
    EXPECT_NEAR(rows[1].ratio, 1.0366430260047281, 1e-9);
    EXPECT_EQ(rows[0].ratio, 1.0);
  }
  {
    const DistributionSpec specs[] = {DistributionSpec(family::Coherent{N}),
                                      DistributionSpec(family::SqueezedVacuum{std::asinh(std::sqrt(N))})};
    const std::string labels[] = {"coh", "sq"};
    const auto rows = compare(specs, labels);
    EXPECT_NEAR(rows[1].ratio, 16.92, 1e-9);
    EXPECT_EQ(rows[1].label, "sq");
  }
  {
    const DistributionSpec g(family::Geometric{0.3});
    const DistributionSpec specs[] = {g, g};
    EXPECT_EQ(compare(specs, {})[1].ratio, 1.0);
  }
  const DistributionSpec one[] = {DistributionSpec(family::Geometric{0.3})};
  EXPECT_EQ(code_of([&] { compare(one, {}); }), Errc::InvalidParameter);
}

TEST(Serialize, OneRecordCsv) {
  SweepRecord r;
  r.param_value = 0.5;
  r.mean = 1;
  r.variance = 2;
  r.qfi = 8;
  r.delta_phi = 1 / std::sqrt(8.0);
  const std::vector<SweepRecord> recs{r};
  EXPECT_EQ(serialize(recs, Format::Csv),
            "param,mean,variance,qfi,delta_phi,weight_a,status\n"
            "0.5,1,2,8,0.35355339059327373,,exact\n");
}

TEST(Serialize, DivergentRecord) {
  const SweepRecord r = evaluate(DistributionSpec(family::Zeta{2.5}), 2.5);
  EXPECT_EQ(r.status, RecordStatus::Diverges);
  const std::vector<SweepRecord> recs{r};
  const std::string csv = serialize(recs, Format::Csv);
  const std::string row = csv.substr(csv.find('\n') + 1);
  std::vector<std::string> cells;
  std::stringstream ss(row.substr(0, row.size() - 1));
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  cells.resize(7);
  EXPECT_EQ(cells[2], "inf");
  EXPECT_EQ(cells[3], "inf");
  EXPECT_EQ(cells[4], "");
  EXPECT_EQ(cells[6], "diverges");

  const std::string json = serialize(recs, Format::Json);
  EXPECT_NE(json.find("\"qfi\": \"inf\""), std::string::npos);
  EXPECT_EQ(json.find("delta_phi"), std::string::npos);
}

TEST(Serialize, ConsistencyCheck) {
  SweepRecord r;
  r.mean = 1;
  r.variance = 2;
  r.qfi = 9;
  const std::vector<SweepRecord> recs{r};
  EXPECT_EQ(code_of([&] { serialize(recs, Format::Csv); }), Errc::InconsistentRecord);
  EXPECT_EQ(code_of([&] { serialize(recs, Format::Json); }), Errc::InconsistentRecord);
}

TEST(Serialize, RoundTripProperty) {
  std::mt19937_64 rng(41);
  std::bernoulli_distribution coin(0.5);
  const RecordStatus statuses[] = {RecordStatus::Exact, RecordStatus::Converged, RecordStatus::Diverges,
                                   RecordStatus::NotConverged};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SweepRecord> recs(1 + trial % 7);
    for (SweepRecord& r : recs) {
      r.param_value = coin(rng) ? rough(rng) : -rough(rng);
      r.mean = rough(rng);
      r.status = statuses[rng() % 4];
      if (r.status == RecordStatus::Diverges) {
        r.variance = kInf;
        r.qfi = kInf;
      } else {
        // Exact multiplication by 4 keeps the consistency check satisfied.
        r.variance = rough(rng) * 1e-5;
        r.qfi = 4.0 * r.variance;
        if (coin(rng)) r.delta_phi = rough(rng);
      }
      if (coin(rng)) r.weight_a = rough(rng);
    }
    for (Format f : {Format::Csv, Format::Json}) {
      const auto back = deserialize(serialize(recs, f), f);
      ASSERT_EQ(back, recs) << "trial " << trial;
    }
  }
}

TEST(Serialize, ErrorRecordsRoundTrip) {
  SweepSpec spec;
  spec.family = [](double mu) { return DistributionSpec(family::Geometric{mu}); };
  spec.values = {0.25, 2.0};
  const auto recs = run_sweep(spec);
  for (Format f : {Format::Csv, Format::Json}) {
    const auto back = deserialize(serialize(recs, f), f);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0], recs[0]);
    EXPECT_EQ(back[1].status, RecordStatus::Error);
    EXPECT_TRUE(std::isnan(back[1].qfi));
    EXPECT_EQ(back[1].param_value, 2.0);
  }
}

TEST(Serialize, ParseErrors) {
  EXPECT_EQ(code_of([] { deserialize("a,b\n1,2\n", Format::Csv); }), Errc::ParseError);
  EXPECT_EQ(code_of([] { deserialize("{\"x\":1}", Format::Json); }), Errc::ParseError);
  EXPECT_EQ(code_of([] { deserialize("[", Format::Json); }), Errc::ParseError);
}

TEST(Serialize, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(523.3936), "523.39359999999999");
  EXPECT_EQ(format_double(kInf), "inf");
  EXPECT_EQ(format_double(-kInf), "-inf");
  EXPECT_EQ(format_double(4.0), "4");
}

TEST(Tables, OptimumAndScaling) {
  const OptimizationProblem prob{0, 25, 7.46};
  const std::string csv = serialize(to_table(prob, maximize_variance(prob)), Format::Csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "m,M,N,support,weights,variance,qfi,bound_gap");
  EXPECT_NE(csv.find("0;25"), std::string::npos);

  const ScalingFit fit = fit_scaling_exponent(mean_template("geometric"), log_spaced(1e2, 1e4, 10));
  const std::string js = serialize(to_table("geometric", fit), Format::Json);
  EXPECT_NE(js.find("\"delta_phi_exponent\""), std::string::npos);
  EXPECT_NE(js.find("\"family\": \"geometric\""), std::string::npos);
}
