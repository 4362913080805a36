#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "envkit/commands.hpp"
#include "envkit/dataset_csv.hpp"
#include "envkit/error.hpp"
#include "support/testgen.hpp"

using namespace envkit;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("envkit_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

void write_dataset(const fs::path& path, const Dataset& ds, bool binary_labels = false) {
  std::ofstream out(path);
  for (Eigen::Index j = 0; j < ds.p(); ++j) out << "x" << (j + 1) << ",";
  out << "y\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    for (Eigen::Index j = 0; j < ds.p(); ++j) out << ds.X(i, j) << ",";
    if (binary_labels) {
      out << (ds.y(i) > 0.5 ? "yes" : "no") << "\n";
    } else {
      out << ds.y(i) << "\n";
    }
  }
}

Dataset linear_toy(std::uint64_t seed, Eigen::Index n, Eigen::Index p) {
  testgen::Gen g(seed);
  Dataset ds;
  ds.family = Family::Linear;
  ds.X = g.normal_matrix(n, p);
  const Vector beta = g.normal_vector(p);
  ds.y = ds.X * beta + 0.5 * g.normal_vector(n);
  return ds;
}

int run_cli(const std::string& args, const fs::path& stdout_path = {}) {
  std::string cmd = std::string(ENVKIT_CLI_PATH) + " " + args;
  cmd += stdout_path.empty() ? " >/dev/null" : " >" + stdout_path.string();
  cmd += " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("csv dataset reader") {
  SUBCASE("numeric columns and response by name") {
    std::istringstream in("a,y,b\n1,2,3\n4,5,6\n7,8,-9\n");
    const Dataset ds = read_dataset_csv(in, {"y", Family::Linear, false});
    CHECK(ds.n() == 3);
    CHECK(ds.p() == 2);
    CHECK(ds.predictor_names == std::vector<std::string>{"a", "b"});
    CHECK(ds.X(1, 1) == 6.0);
    CHECK(ds.y(0) == 2.0);
  }
  SUBCASE("binary text response") {
    std::istringstream in("x,y\n0.5,pos\n-1,neg\n2,pos\n");
    const Dataset ds = read_dataset_csv(in, {"y", Family::Logistic, true});
    CHECK(ds.y(0) == 0.0);
    CHECK(ds.y(1) == 1.0);
    CHECK(ds.y(2) == 0.0);
    CHECK(ds.has_intercept);
  }
  SUBCASE("malformed row names the line") {
    std::istringstream in("x,y\n1,2\n3\n");
    try {
      read_dataset_csv(in, {"y", Family::Linear, false});
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream bad("x,y\n1,2\n1.5x,2\n");
    try {
      read_dataset_csv(bad, {"y", Family::Linear, false});
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("missing response column") {
    std::istringstream in("x,z\n1,2\n");
    CHECK_THROWS_AS(read_dataset_csv(in, {"y", Family::Linear, false}), Error);
  }
  SUBCASE("family domain") {
    std::istringstream in("x,y\n1,2\n2,0\n3,1\n");
    try {
      read_dataset_csv(in, {"y", Family::Logistic, false});
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::FamilyMismatch);
    }
    std::istringstream neg("x,y\n1,-1\n2,0\n3,1\n");
    CHECK_THROWS_AS(read_dataset_csv(neg, {"y", Family::Poisson, false}), Error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_dataset_csv_file("/nonexistent/data.csv", {"y", Family::Linear, false}), Error);
  }
}

TEST_CASE("report csv round trip") {
  testgen::Gen g(51);
  for (int t = 0; t < 50; ++t) {
    Report r;
    r.command = "fit";
    r.meta.emplace_back("family", std::string("logistic"));
    r.meta.emplace_back("n", static_cast<double>(g.integer(2, 1000)));
    r.meta.emplace_back("C", g.uniform(0.1, 5.0));
    const int ntab = g.integer(1, 3);
    for (int k = 0; k < ntab; ++k) {
      ReportTable tab;
      tab.name = "t" + std::to_string(k);
      const int ncol = g.integer(1, 5);
      for (int c = 0; c < ncol; ++c) tab.columns.push_back("c" + std::to_string(c));
      const int nrow = g.integer(1, 6);
      for (int i = 0; i < nrow; ++i) {
        std::vector<double> row;
        for (int c = 0; c < ncol; ++c) {
          const double scale = std::pow(10.0, g.integer(-12, 12));
          row.push_back(g.integer(0, 9) == 0 ? std::nan("") : g.normal() * scale);
        }
        tab.add_row(i % 2 ? "row, " + std::to_string(i) : "r\"" + std::to_string(i), row);
      }
      r.tables.push_back(tab);
    }
    const Report back = parse_report_csv(to_csv(r));
    CHECK(back.command == r.command);
    REQUIRE(back.tables.size() == r.tables.size());
    CHECK(std::get<std::string>(*back.meta_value("family")) == "logistic");
    CHECK(std::get<double>(*back.meta_value("C")) == std::get<double>(*r.meta_value("C")));
    for (std::size_t k = 0; k < r.tables.size(); ++k) {
      const auto& a = r.tables[k];
      const auto& b = back.tables[k];
      CHECK(a.name == b.name);
      CHECK(a.columns == b.columns);
      CHECK(a.row_labels == b.row_labels);
      for (std::size_t i = 0; i < a.values.size(); ++i) {
        for (std::size_t c = 0; c < a.columns.size(); ++c) {
          const double x = a.values[i][c], y = b.values[i][c];
          if (std::isnan(x)) {
            CHECK(std::isnan(y));
          } else {
            CHECK(std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)));
          }
        }
      }
    }
  }
  CHECK_THROWS_AS(parse_report_csv("table,row,column,value\nmeta,,schema,other/9\n"), Error);
  CHECK_THROWS_AS(parse_report_csv("a,b\n"), Error);
}

TEST_CASE("json report layout") {
  Report r;
  r.command = "fit";
  r.meta.emplace_back("n", 10.0);
  ReportTable t{"coefficients", {"a", "b"}, {}, {}};
  t.add_row("x1", {1.5, std::nan("")});
  r.tables.push_back(t);
  const auto j = nlohmann::ordered_json::parse(to_json(r));
  CHECK(j.at("schema") == "envelope-report/1");
  CHECK(j.begin().key() == "schema");
  CHECK(j.at("command") == "fit");
  CHECK(j.at("meta").at("n") == 10);
  const auto& row = j.at("tables").at("coefficients").at("rows").at(0);
  CHECK(row.at("label") == "x1");
  CHECK(row.at("a") == 1.5);
  CHECK(row.at("b").is_null());
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(std::nan("")) == "NA");
}

TEST_CASE("fit on linear data matches least squares") {
  const Dataset ds = linear_toy(52, 120, 4);
  const fs::path path = scratch_dir() / "linear.csv";
  write_dataset(path, ds);
  RunConfig cfg;
  cfg.command = "fit";
  cfg.input_path = path.string();
  cfg.response = "y";
  const Report r = run_command(cfg);
  const Vector ols = ds.X.colPivHouseholderQr().solve(ds.y);
  const ReportTable* coef = r.table("coefficients");
  REQUIRE(coef != nullptr);
  REQUIRE(coef->values.size() == 4);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(coef->values[j][0] == doctest::Approx(ols(static_cast<Eigen::Index>(j))).epsilon(1e-9));
  }
  const ReportTable* dims = r.table("dimensions");
  REQUIRE(dims != nullptr);
  CHECK(dims->values.size() == 4);
  CHECK(dims->values.front()[0] == 1.0);
  double wsum = 0.0;
  for (const auto& row : dims->values)
    if (!std::isnan(row[2])) wsum += row[2];
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::get<double>(*r.meta_value("p")) == 4.0);
  CHECK(std::get<std::string>(*r.meta_value("method")) == "1d");
}

TEST_CASE("bootstrap report keys and determinism") {
  const Dataset ds = testgen::logistic_toy(53, 150, 3);
  const fs::path path = scratch_dir() / "logit.csv";
  write_dataset(path, ds, true);
  RunConfig cfg;
  cfg.command = "bootstrap";
  cfg.input_path = path.string();
  cfg.response = "y";
  cfg.family = Family::Logistic;
  cfg.B = 2;
  cfg.seed = 11;
  const Report r = run_command(cfg);
  const auto j = nlohmann::ordered_json::parse(render(r, OutputFormat::Json));
  CHECK(j.at("schema") == "envelope-report/1");
  for (const char* k : {"family", "method", "n", "p", "C", "range", "u_hat", "B", "seed", "used", "skipped"}) {
    CHECK_MESSAGE(j.at("meta").contains(k), k);
  }
  const auto& tables = j.at("tables");
  for (const char* k : {"coefficients", "sd_matrix_w", "sd_matrix_varu", "sd_matrix_fixu", "sd_matrix_mle",
                        "u_distribution"}) {
    CHECK_MESSAGE(tables.contains(k), k);
  }
  const auto cols = tables.at("coefficients").at("columns");
  for (const char* k : {"theta_w", "sd_w", "theta_uhat", "sd_varu", "sd_fixu", "theta_mle", "sd_mle", "ratio_w",
                        "ratio_varu", "ratio_fixu"}) {
    CHECK_MESSAGE(std::find(cols.begin(), cols.end(), k) != cols.end(), k);
  }

  cfg.B = 25;
  cfg.workers = 1;
  const std::string once = render(run_command(cfg), OutputFormat::Csv);
  cfg.workers = 4;
  CHECK(render(run_command(cfg), OutputFormat::Csv) == once);
  cfg.seed = 12;
  CHECK(render(run_command(cfg), OutputFormat::Csv) != once);
}

TEST_CASE("RunConfig validation") {
  RunConfig cfg;
  cfg.command = "fit";
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.input_path = "x.csv";
  cfg.response = "y";
  CHECK_NOTHROW(cfg.validate());
  cfg.C = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.command = "simulate";
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.family = Family::Poisson;
  CHECK_NOTHROW(cfg.validate());
  cfg.ns = {1};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.command = "nope";
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("workers_from_env") {
  ::unsetenv("ENVKIT_WORKERS");
  CHECK(workers_from_env(0, false) == 0);
  CHECK(workers_from_env(3, true) == 3);
  ::setenv("ENVKIT_WORKERS", "5", 1);
  CHECK(workers_from_env(0, false) == 5);
  CHECK(workers_from_env(2, true) == 2);
  ::setenv("ENVKIT_WORKERS", "five", 1);
  CHECK_THROWS_AS(workers_from_env(0, false), Error);
  ::unsetenv("ENVKIT_WORKERS");
}

TEST_CASE("cli binary") {
  const fs::path dir = scratch_dir();
  SUBCASE("simulate smoke") {
    const fs::path out = dir / "sim.json";
    fs::remove(out);
    CHECK(run_cli("simulate --family logistic --setting A --n 200 --B 10 --seed 3 --out " + out.string()) == 0);
    REQUIRE(fs::exists(out));
    const auto j = nlohmann::ordered_json::parse(slurp(out));
    CHECK(j.at("schema") == "envelope-report/1");
    const auto& t = j.at("tables").at("ratios");
    CHECK(t.at("rows").size() == 8);
    int ratio_cols = 0;
    for (const auto& c : t.at("columns")) ratio_cols += c.get<std::string>().rfind("ratio_", 0) == 0;
    CHECK(ratio_cols == 3);
  }
  SUBCASE("invalid setting is a usage error") {
    const fs::path out = dir / "never.json";
    fs::remove(out);
    CHECK(run_cli("simulate --family logistic --setting Z --n 200 --B 5 --out " + out.string()) != 0);
    CHECK_FALSE(fs::exists(out));
    CHECK(run_cli("") != 0);
    CHECK(run_cli("fit --family linear") != 0);
  }
  SUBCASE("fit writes csv to a file or stdout") {
    const fs::path data = dir / "cli_linear.csv";
    write_dataset(data, linear_toy(54, 80, 3));
    const fs::path out = dir / "fit.csv";
    fs::remove(out);
    CHECK(run_cli("fit --input " + data.string() + " --response y --format csv --out " + out.string()) == 0);
    const Report r = parse_report_csv(slurp(out));
    CHECK(r.command == "fit");
    CHECK(r.table("coefficients")->values.size() == 3);
    const fs::path piped = dir / "fit_stdout.csv";
    CHECK(run_cli("fit --input " + data.string() + " --response y --format csv", piped) == 0);
    CHECK(slurp(piped) == slurp(out));
  }
  SUBCASE("bad data and unwritable output are nonzero") {
    const fs::path data = dir / "cli_bad.csv";
    std::ofstream(data) << "x,y\n1,2\n3\n";
    CHECK(run_cli("fit --input " + data.string() + " --response y") != 0);
    const fs::path good = dir / "cli_good.csv";
    write_dataset(good, linear_toy(55, 40, 2));
    CHECK(run_cli("fit --input " + good.string() + " --response y --out /nonexistent/dir/x.json") != 0);
  }
}
