// Command-line front end; talks to the shared library through the C API only.
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "qclab.h"

namespace {

struct SessionDeleter {
  void operator()(qcl_session* s) const { qcl_session_free(s); }
};

int report(qcl_session* session, qcl_status status, char* payload,
           bool print_payload) {
  if (payload != nullptr) {
    if (print_payload) std::fputs(payload, stdout);
    qcl_string_free(payload);
  }
  if (status != QCL_OK && status != QCL_ASSERTION_FAILED)
    std::fprintf(stderr, "error: %s\n", qcl_last_error(session));
  else if (status == QCL_ASSERTION_FAILED)
    std::fprintf(stderr, "assertions failed: %s\n", qcl_last_error(session));
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qclab: constrained quantum-channel capacity laboratory"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "qclab-out", seed, level = "quick";
  std::string request;
  int jobs = 1, restarts = 0, max_iters = 0;
  double tol = 0.0;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "execute a scenario file");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out-dir", out_dir, "directory for report files");
  run->add_option("--seed", seed, "64-bit unsigned decimal seed override");
  run->add_option("--restarts", restarts, "solver restarts override");
  run->add_option("--max-iters", max_iters, "solver iteration cap override");
  run->add_option("--tol", tol, "solver relative tolerance override");
  run->add_option("--jobs", jobs, "task-level parallelism");
  run->add_flag("--quiet", quiet, "suppress the summary on stdout");

  auto* self = app.add_subcommand("selftest", "run the bundled checks");
  self->add_option("level", level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));
  self->add_option("--jobs", jobs, "restart-level parallelism");

  auto* ops = app.add_subcommand("ops", "list scenario task operations");
  auto* version = app.add_subcommand("version", "print the library version");

  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<qcl_session, SessionDeleter> session(qcl_session_new());
  if (!session) {
    std::fprintf(stderr, "error: could not create session\n");
    return QCL_RUNTIME_ERROR;
  }

  if (version->parsed()) {
    std::printf("%s\n", qcl_version());
    return 0;
  }
  if (ops->parsed()) {
    char* names = nullptr;
    const qcl_status st = qcl_task_names(session.get(), &names);
    return report(session.get(), st, names, true);
  }
  if (self->parsed()) {
    char* out = nullptr;
    const qcl_status st =
        qcl_selftest(session.get(), level.c_str(), jobs, /*verbose=*/1, &out);
    return report(session.get(), st, out, false);
  }

  char* summary = nullptr;
  const qcl_status st = qcl_run_scenario_file(
      session.get(), scenario_path.c_str(), out_dir.c_str(), jobs,
      seed.empty() ? nullptr : seed.c_str(), restarts, max_iters, tol,
      &summary);
  return report(session.get(), st, summary, !quiet);
}
