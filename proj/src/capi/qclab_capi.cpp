#include "qclab.h"

#include <cstring>
#include <iostream>
#include <string>

#include "core/scenario.hpp"

namespace {

using qclab::Error;
using qclab::ErrorKind;
using qclab::Json;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

qcl_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse:
      return QCL_PARSE_ERROR;
    case ErrorKind::validation:
    case ErrorKind::invalid_argument:
      return QCL_VALIDATION_ERROR;
    case ErrorKind::assertion:
      return QCL_ASSERTION_FAILED;
    case ErrorKind::numerical:
      return QCL_RUNTIME_ERROR;
  }
  return QCL_RUNTIME_ERROR;
}

}  // namespace

struct qcl_session {
  std::string last_error;
};

namespace {

template <typename Fn>
qcl_status guarded(qcl_session* s, Fn&& fn) {
  if (s == nullptr) return QCL_INVALID_HANDLE;
  s->last_error.clear();
  try {
    return fn();
  } catch (const Error& e) {
    s->last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    s->last_error = e.what();
    return QCL_RUNTIME_ERROR;
  } catch (...) {
    s->last_error = "unknown error";
    return QCL_RUNTIME_ERROR;
  }
}

qclab::RunOptions make_run_options(const char* out_dir, int jobs,
                                   const char* seed_decimal, int restarts,
                                   int max_iters, double tol) {
  qclab::RunOptions opts;
  opts.out_dir = (out_dir != nullptr && *out_dir) ? out_dir : ".";
  opts.jobs = jobs > 1 ? jobs : 1;
  if (seed_decimal != nullptr && *seed_decimal)
    opts.seed_override = qclab::parse_seed(Json(std::string(seed_decimal)));
  if (restarts > 0) opts.restarts_override = restarts;
  if (max_iters > 0) opts.max_iters_override = max_iters;
  if (tol > 0) opts.tol_override = tol;
  return opts;
}

qcl_status finish_run(const qclab::RunSummary& summary, char** summary_json) {
  if (summary_json != nullptr)
    *summary_json = dup_string(summary.to_json().dump(2));
  return summary.all_passed ? QCL_OK : QCL_ASSERTION_FAILED;
}

}  // namespace

extern "C" {

qcl_session* qcl_session_new(void) { return new (std::nothrow) qcl_session; }

void qcl_session_free(qcl_session* s) { delete s; }

const char* qcl_last_error(const qcl_session* s) {
  return s != nullptr ? s->last_error.c_str() : "invalid session";
}

const char* qcl_version(void) { return "qclab 1.0.0"; }

void qcl_string_free(char* str) { std::free(str); }

qcl_status qcl_run_scenario_file(qcl_session* s, const char* path,
                                 const char* out_dir, int jobs,
                                 const char* seed_decimal, int restarts,
                                 int max_iters, double tol,
                                 char** summary_json) {
  return guarded(s, [&] {
    if (path == nullptr) qclab::fail(ErrorKind::parse, "path is null");
    auto summary = qclab::run_scenario_file(
        path, make_run_options(out_dir, jobs, seed_decimal, restarts,
                               max_iters, tol));
    return finish_run(summary, summary_json);
  });
}

qcl_status qcl_run_scenario_string(qcl_session* s, const char* scenario_json,
                                   const char* out_dir, int jobs,
                                   const char* seed_decimal, int restarts,
                                   int max_iters, double tol,
                                   char** summary_json) {
  return guarded(s, [&] {
    if (scenario_json == nullptr)
      qclab::fail(ErrorKind::parse, "scenario is null");
    Json doc;
    try {
      doc = Json::parse(scenario_json);
    } catch (const nlohmann::json::exception& e) {
      qclab::fail(ErrorKind::parse, std::string("scenario parse error: ") +
                                        e.what());
    }
    auto summary = qclab::run_scenario(
        doc, make_run_options(out_dir, jobs, seed_decimal, restarts,
                              max_iters, tol));
    return finish_run(summary, summary_json);
  });
}

qcl_status qcl_selftest(qcl_session* s, const char* level, int jobs,
                        int verbose, char** report_json) {
  return guarded(s, [&] {
    auto items = qclab::selftest(level != nullptr ? level : "quick",
                                 jobs > 1 ? jobs : 1,
                                 verbose ? &std::cout : nullptr);
    if (report_json != nullptr) {
      Json arr = Json::array();
      for (const auto& it : items)
        arr.push_back({{"name", it.name},
                       {"passed", it.passed},
                       {"detail", it.detail}});
      Json doc{{"all_passed", qclab::selftest_passed(items)},
               {"checks", std::move(arr)}};
      *report_json = dup_string(doc.dump(2));
    }
    if (!qclab::selftest_passed(items)) {
      for (const auto& it : items)
        if (!it.passed) {
          s->last_error = "selftest failed at " + it.name +
                          (it.detail.empty() ? "" : ": " + it.detail);
          break;
        }
      return QCL_ASSERTION_FAILED;
    }
    return QCL_OK;
  });
}

qcl_status qcl_eval(qcl_session* s, const char* request_json,
                    char** result_json) {
  return guarded(s, [&] {
    if (request_json == nullptr)
      qclab::fail(ErrorKind::parse, "request is null");
    Json request;
    try {
      request = Json::parse(request_json);
    } catch (const nlohmann::json::exception& e) {
      qclab::fail(ErrorKind::parse, std::string("request parse error: ") +
                                        e.what());
    }
    // A single-task scenario with no report files.
    Json scenario{{"seed", request.value("seed", "1")},
                  {"tasks", Json::array({Json{{"op", request.at("op")},
                                              {"args", request.value(
                                                           "args",
                                                           Json::object())}}})}};
    if (request.contains("channels")) scenario["channels"] = request.at("channels");
    if (request.contains("constraints"))
      scenario["constraints"] = request.at("constraints");
    qclab::RunOptions opts;
    opts.write_reports = false;
    auto summary = qclab::run_scenario(scenario, opts);
    if (result_json != nullptr)
      *result_json = dup_string(summary.tasks.front().result.dump(2));
    return QCL_OK;
  });
}

qcl_status qcl_task_names(qcl_session* s, char** names_json) {
  return guarded(s, [&] {
    Json arr = Json::array();
    for (const auto& name : qclab::task_names()) arr.push_back(name);
    if (names_json != nullptr) *names_json = dup_string(arr.dump());
    return QCL_OK;
  });
}

}  // extern "C"
