#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "sps/data_io.hpp"
#include "sps/error.hpp"
#include "support.hpp"

using namespace sps;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& text, const std::string& name = "data.csv") {
    path = std::filesystem::temp_directory_path() / ("sps_test_" + std::to_string(::getpid()) + "_" + name);
    std::ofstream(path) << text;
  }
  ~TempFile() { std::filesystem::remove(path); }
  std::string str() const { return path.string(); }
};

ErrorKind load_error(const std::string& text, DatasetSpec spec = {}) {
  TempFile f(text);
  try {
    load_csv(f.str(), spec);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a load error");
  return ErrorKind::config;
}

std::string load_message(const std::string& text, DatasetSpec spec = {}) {
  TempFile f(text);
  try {
    load_csv(f.str(), spec);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("data_io") {
  TEST_CASE("registry dimensions") {
    const auto& reg = builtin_registry();
    CHECK(reg.size() == 8);
    const auto diabetes = registry_spec(reg, "Diabetes");
    CHECK(*diabetes.observations == 768);
    CHECK(*diabetes.covariates == 13);
    CHECK(*diabetes.categories == 2);
    const auto transport = registry_spec(reg, "Transportation");
    CHECK(*transport.observations == 210);
    CHECK(*transport.covariates == 9);
    CHECK(*transport.categories == 4);
    CHECK(*transport.covariates * (*transport.categories - 1) == 27);
    CHECK(*registry_spec(reg, "Germany").modal_g == 0.0625);
    CHECK(registry_spec(reg, "Caesarean 2").supplement);
    try {
      registry_spec(reg, "Iris");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
      CHECK(std::string(e.what()).find("Cars") != std::string::npos);
    }
  }

  TEST_CASE("registry manifest parsing") {
    const auto reg = parse_registry(R"({"version": 1, "datasets": [{"name": "Toy", "T": 2, "k": 1, "C": 2, "modal_g": 0.5}]})");
    CHECK(reg.at("Toy").modal_g == 0.5);
    CHECK_THROWS_AS(parse_registry(R"({"version": 2, "datasets": []})"), Error);
    CHECK_THROWS_AS(parse_registry("{not json"), Error);
  }

  TEST_CASE("small CSV round trip") {
    TempFile f("1,0.5,-2\n2,1.25,3e-2\n");
    const LogitData a = load_csv(f.str(), {});
    CHECK(a.y == std::vector<int>{1, 2});
    CHECK(a.categories == 2);
    CHECK(a.X(0, 0) == 0.5);
    CHECK(a.X(0, 1) == -2.0);
    CHECK(a.X(1, 1) == 0.03);
    const LogitData b = load_csv(f.str(), {});
    CHECK(a.X == b.X);
    CHECK(a.y == b.y);

    DatasetSpec spec;
    spec.intercept = true;
    spec.header = true;
    TempFile h("y,x\n1,4\n2,5\n", "header.csv");
    const LogitData c = load_csv(h.str(), spec);
    CHECK(c.observations() == 2);
    CHECK(c.covariates() == 2);
    CHECK(c.X(1, 0) == 1.0);
    CHECK(c.X(1, 1) == 5.0);
  }

  TEST_CASE("load errors name the offending row") {
    CHECK(load_error("1,2\n1,2,3\n") == ErrorKind::data);
    CHECK(load_message("1,2\n1,2,3\n").find("line 2") != std::string::npos);
    CHECK(load_message("1,2\n2,abc\n").find("line 2") != std::string::npos);
    CHECK(load_message("1,2\n1.5,3\n").find("line 2") != std::string::npos);
    DatasetSpec three;
    three.categories = 2;
    CHECK(load_message("1,2\n3,3\n", three).find("observation 2") != std::string::npos);
    DatasetSpec dims;
    dims.name = "Toy";
    dims.observations = 3;
    CHECK(load_error("1,2\n2,3\n", dims) == ErrorKind::data);
    dims.observations = 2;
    dims.covariates = 2;
    CHECK(load_error("1,2\n2,3\n", dims) == ErrorKind::data);
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", {}), Error);
  }

  TEST_CASE("synthetic fixture loads") {
    const LogitData data = test::synthetic_mnl();
    CHECK(data.observations() == 150);
    CHECK(data.covariates() == 2);
    CHECK(data.dim() == 4);
  }

  TEST_CASE("design supplement fills an empty cell") {
    // Saturated 2x2 design with one cell never observed.
    RowMatrix X(6, 4);
    X << 1, 0, 0, 0,
         1, 1, 0, 0,
         1, 0, 1, 0,
         1, 1, 0, 0,
         1, 0, 1, 0,
         1, 0, 0, 0;
    DatasetSpec spec;
    spec.name = "saturated";
    CHECK(design_supplement(X, spec) == X);
    CHECK_THROWS_AS(build_g_prior(X, 3, 1.0), Error);

    spec.supplement = true;
    const RowMatrix prior_x = design_supplement(X, spec);
    CHECK(prior_x.rows() == 7);
    CHECK(prior_x.row(6) == Eigen::RowVector4d(0, 0, 0, 1));
    const GaussianPrior p = build_g_prior(prior_x, 3, 1.0);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(p.cov).eigenvalues().minCoeff() > 0.0);

    std::vector<std::string> warnings;
    RowMatrix full = prior_x;
    CHECK(design_supplement(full, spec, &warnings) == full);
    CHECK(warnings.size() == 1);
  }
}
