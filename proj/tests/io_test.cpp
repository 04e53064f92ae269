#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "sparsehcr/io.hpp"

namespace {

using namespace sparsehcr;
namespace fs = std::filesystem;

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("sparsehcr_io_test_" + std::to_string(::getpid()) + "_" + name);
}

TEST(FormatDouble, RoundTripsAndNamesNonFinite) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(io::format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(MatrixText, RoundTripsExactly) {
  const Mat a = sample_gaussian_ensemble(4, 3, 8);
  const fs::path path = temp_path("matrix.txt");
  io::write_matrix(path.string(), a);
  EXPECT_EQ(io::read_matrix(path.string()), a);
  fs::remove(path);
}

TEST(MatrixText, ParsesHeaderAndRowMajorValues) {
  const Mat a = io::parse_matrix("2 3\n1 2 3\n4 5 6\n");
  EXPECT_EQ(a(0, 2), 3.0);
  EXPECT_EQ(a(1, 0), 4.0);
}

TEST(MatrixText, ReportsMalformedInput) {
  auto code = [](const std::string& text) {
    try {
      io::parse_matrix(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code("2 2\n1 2 3\n"), ErrorCode::InputIo);
  EXPECT_EQ(code("2 2\n1 2 3 x\n"), ErrorCode::InputIo);
  EXPECT_EQ(code("1 1\n1 2\n"), ErrorCode::InputIo);
  EXPECT_EQ(code("0 2\n"), ErrorCode::InputIo);
  EXPECT_EQ(code(""), ErrorCode::InputIo);
}

TEST(Files, MissingInputAndUnwritableOutput) {
  try {
    io::read_matrix("/nonexistent/dir/phi.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InputIo);
  }
  try {
    io::write_text("/nonexistent/dir/out.jsonl", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutputIo);
  }
}

TEST(Json, SupportsAreOneBasedArrays) {
  EXPECT_EQ(io::to_json(Support(9, {1, 4, 9})).dump(), "[1,4,9]");
}

TEST(Json, NonFiniteNumbersBecomeStrings) {
  EXPECT_EQ(io::number(std::numeric_limits<double>::infinity()).dump(), "\"inf\"");
  EXPECT_EQ(io::number(std::optional<double>{}).dump(), "null");
  EXPECT_EQ(io::number(0.5).dump(), "0.5");
}

TEST(Json, ExperimentRecordCarriesConfigAndBounds) {
  TrialConfig c;
  c.trials = 200;
  c.theta_min = 6.0;
  const io::Json j = io::to_json(run_monte_carlo(c));
  EXPECT_EQ(j["config"]["trials"], 200);
  EXPECT_EQ(j["config"]["decoder"], "mle");
  EXPECT_TRUE(j["hcr_bound"].is_number());
  EXPECT_EQ(j["true_support"].dump(), "[1,2]");
  // Doubles survive the text form bit for bit.
  const io::Json back = io::Json::parse(j.dump());
  EXPECT_EQ(back["d_min"].get<double>(), j["d_min"].get<double>());
}

TEST(Jsonl, OneRecordPerLine) {
  const std::string text = io::to_jsonl({io::Json{{"a", 1}}, io::Json{{"b", 2}}});
  EXPECT_EQ(text, "{\"a\":1}\n{\"b\":2}\n");
}

TEST(Csv, HeaderAndRowsWithFullPrecision) {
  TrialConfig c;
  c.trials = 100;
  c.theta_min = 3.0;
  const ExperimentRecord r = run_monte_carlo(c);
  io::CsvTable t{io::experiment_csv_header(), {io::experiment_csv_row(r)}};
  const std::string text = io::format_csv(t);
  EXPECT_EQ(text.substr(0, 8), "p,k,m,th");
  EXPECT_NE(text.find(",1;2,"), std::string::npos);
  EXPECT_NE(text.find(io::format_double(r.d_min)), std::string::npos);
  EXPECT_EQ(t.header.size(), t.rows[0].size());
}

}  // namespace
