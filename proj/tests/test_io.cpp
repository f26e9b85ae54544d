#include <doctest.h>

#include <limits>
#include <string>

#include "dss/experiment_report.hpp"
#include "dss/probability.hpp"

using namespace dss;

TEST_CASE("table json format") {
  ProbabilityTable t({2, 2}, {0.36, 0.04, 0.04, 0.56});
  nlohmann::ordered_json j = t.to_json();
  CHECK(j.dump() == R"({"shape":[2,2],"probs":[0.36,0.04,0.04,0.56]})");
  ProbabilityTable back = ProbabilityTable::from_json(j);
  CHECK(back.shape() == t.shape());
  CHECK(back.probs() == t.probs());
}

TEST_CASE("kernel json format") {
  ConditionalKernel k(2, 3, {0.2, 0.3, 0.5, 1.0, 0.0, 0.0});
  nlohmann::ordered_json j = k.to_json();
  CHECK(j.dump() == R"({"shape":[2,3],"probs":[0.2,0.3,0.5,1.0,0.0,0.0]})");
  ConditionalKernel back = ConditionalKernel::from_json(j);
  CHECK(back.in_size() == 2);
  CHECK(back.out_size() == 3);
  CHECK(back.at(1, 0) == 1.0);
}

TEST_CASE("json parse diagnostics") {
  nlohmann::json missing = nlohmann::json::object();
  CHECK_THROWS_WITH_AS(ProbabilityTable::from_json(missing),
                       doctest::Contains("shape"), std::invalid_argument);
  bool threw = false;
  try {
    auto bad = nlohmann::json::parse("{\"shape\": [2,, 2]}");
    (void)bad;
  } catch (const nlohmann::json::parse_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("parse error") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("report serialization is pinned") {
  ExperimentReport r;
  r.experiment = "soft-cover";
  r.seed = 42;
  r.add_param("instance", "demo.json");
  r.add_param("trials", 2);
  r.rows.push_back(ExperimentRow{2, 0.5, 0.5, 0.25, 0.75, 2});
  r.rows.push_back(ExperimentRow{4, 0.125, 0.125, 0.0625, 0.1875, 2});

  CHECK(r.to_csv() ==
        "n,mean_bits,median_bits,min_bits,max_bits,trials\n"
        "2,0.5,0.5,0.25,0.75,2\n"
        "4,0.125,0.125,0.0625,0.1875,2\n");

  nlohmann::ordered_json j = r.to_json();
  CHECK(j["schema_version"] == 1);
  CHECK(j["experiment"] == "soft-cover");
  CHECK(j["seed"] == 42);
  CHECK(j["params"]["instance"] == "demo.json");
  CHECK(j["params"]["trials"] == "2");
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][0]["n"] == 2);
  CHECK(j["rows"][0]["mean_bits"] == "0.5");
  CHECK(j["rows"][1]["max_bits"] == "0.1875");
  CHECK(j["rows"][1]["trials"] == 2);
}

TEST_CASE("double formatting round trips") {
  for (double v : {0.0, 1.0, 0.1, 0.052932501298081136, 1e-300, 123456789.123456789}) {
    double back = std::stod(format_double(v));
    CHECK(back == v);
  }
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}
