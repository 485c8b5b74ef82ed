#include "doctest.h"

#include <cmath>
#include <limits>

#include "thermocap/errors.hpp"
#include "thermocap/serialization.hpp"

using namespace thermocap;

TEST_SUITE("serialization") {

TEST_CASE("covariance matrices round-trip") {
  Eigen::MatrixXd g = thermal_cm(0.7, 2).gamma();
  g(0, 2) = g(2, 0) = 0.3;
  const CovMatrix cm(g);
  const Json j = to_json(cm);
  CHECK(j["n"] == 2);
  CHECK(j["gamma"].size() == 16);
  const CovMatrix back = cm_from_json(Json::parse(j.dump()));
  CHECK((back.gamma() - g).norm() == 0.0);

  Json bad = j;
  bad["gamma"].erase(bad["gamma"].begin());
  CHECK_THROWS_AS(cm_from_json(bad), InvalidInput);
}

TEST_CASE("number-basis densities round-trip") {
  FockDensity f = thermal_fock(0.5, 6);
  f.rho(1, 2) = {0.01, 0.02};
  f.rho(2, 1) = std::conj(f.rho(1, 2));
  const FockDensity back = fock_from_json(Json::parse(to_json(f).dump()));
  CHECK(back.d == 6);
  CHECK(back.modes == 1);
  CHECK((back.rho - f.rho).norm() == 0.0);

  Json bad = to_json(f);
  bad["im"][1] = 0.5;  // not Hermitian
  CHECK_THROWS(fock_from_json(bad));
}

TEST_CASE("non-finite numbers") {
  CHECK(number(std::numeric_limits<double>::infinity()).is_null());
  CHECK(number(std::nan("")).is_null());
  CHECK(number(0.25) == 0.25);
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);

  const auto c = certify_capacity(0.0);
  const Json j = to_json(c);
  CHECK(j["q"].is_null());
  CHECK(j["unbounded"] == true);
}

TEST_CASE("schema versions") {
  CHECK(csv_schema_header("capacity") == "# thermocap-csv capacity schema_version=1");
  CHECK(kSchemaVersion == 1);
  QuadratureSpec q;
  const Json j = to_json(q);
  CHECK(j["radial"] == 24);
}

}
