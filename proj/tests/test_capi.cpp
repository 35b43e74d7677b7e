#include "doctest.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "qclab.h"

namespace {

struct Session {
  qcl_session* s = qcl_session_new();
  ~Session() { qcl_session_free(s); }
};

struct Out {
  char* str = nullptr;
  ~Out() { qcl_string_free(str); }
};

}  // namespace

TEST_CASE("version and task names") {
  Session ses;
  CHECK(std::string(qcl_version()).rfind("qclab", 0) == 0);

  Out names;
  CHECK(qcl_task_names(ses.s, &names.str) == QCL_OK);
  auto arr = nlohmann::json::parse(names.str);
  CHECK(arr.is_array());
  CHECK(arr.size() >= 30);
}

TEST_CASE("eval runs a single operation") {
  Session ses;
  Out result;
  const char* request = R"({
    "op": "entropy",
    "args": {"state": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}
  })";
  CHECK(qcl_eval(ses.s, request, &result.str) == QCL_OK);
  auto j = nlohmann::json::parse(result.str);
  CHECK(j.at("value").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("status codes map parse/validation/assertion failures") {
  Session ses;

  CHECK(qcl_run_scenario_string(ses.s, "{ not json", nullptr, 1, nullptr, 0,
                                0, 0.0, nullptr) == QCL_PARSE_ERROR);
  CHECK(std::strlen(qcl_last_error(ses.s)) > 0);

  const char* bad_channel = R"({
    "channels": {"broken": {"kind": "kraus",
      "kraus": [[[[0.9,0],[0,0]],[[0,0],[0.9,0]]]]}},
    "tasks": []
  })";
  CHECK(qcl_run_scenario_string(ses.s, bad_channel, nullptr, 1, nullptr, 0, 0,
                                0.0, nullptr) == QCL_VALIDATION_ERROR);
  CHECK(std::string(qcl_last_error(ses.s)).find("broken") != std::string::npos);

  const char* failing = R"({
    "tasks": [{"op": "entropy",
               "args": {"state": [[[1,0],[0,0]],[[0,0],[0,0]]]},
               "require": [{"field": "value", "op": "approx",
                            "value": 1.0, "tol": 1e-9}]}]
  })";
  Out summary;
  CHECK(qcl_run_scenario_string(ses.s, failing, nullptr, 1, nullptr, 0, 0,
                                0.0, &summary.str) == QCL_ASSERTION_FAILED);
  auto j = nlohmann::json::parse(summary.str);
  CHECK_FALSE(j.at("all_passed").get<bool>());

  CHECK(qcl_run_scenario_file(nullptr, "x", nullptr, 1, nullptr, 0, 0, 0.0,
                              nullptr) == QCL_INVALID_HANDLE);
}

TEST_CASE("scenario string round trip with reports disabled") {
  Session ses;
  const char* scenario = R"({
    "seed": "5",
    "tasks": [
      {"op": "holevo_quantity",
       "args": {"channel": {"kind": "identity", "params": {"dim": 2}},
                "ensemble": {"items": [
                  {"p": 0.5, "state": [[[1,0],[0,0]],[[0,0],[0,0]]]},
                  {"p": 0.5, "state": [[[0,0],[0,0]],[[0,0],[1,0]]]}]}},
       "require": [{"field": "value", "op": "approx", "value": 1.0,
                    "tol": 1e-9}]}
    ]
  })";
  Out summary;
  CHECK(qcl_run_scenario_string(ses.s, scenario, "/tmp/qclab_capi_out", 1,
                                nullptr, 0, 0, 0.0, &summary.str) == QCL_OK);
  auto j = nlohmann::json::parse(summary.str);
  CHECK(j.at("all_passed").get<bool>());
  CHECK(j.at("tasks").size() == 1);
}
