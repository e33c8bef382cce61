// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "commands.hpp"
#include "promptalign/error.hpp"
#include "promptalign/records.hpp"

int main(int argc, char** argv) {
  using namespace promptalign;
  CLI::App app{"promptalign: prompt rewriting, reward alignment and keypoint benchmarking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "promptalign 0.1.0");
  cli::Globals g;
  app.add_option("--config", g.config_path, "JSON config file")->option_text("PATH");
  app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|critical|off");

  cli::Action run;
  cli::RegisterTaxonomy(app, g, run);
  cli::RegisterCorpus(app, g, run);
  cli::RegisterCurate(app, g, run);
  cli::RegisterAnnotate(app, g, run);
  cli::RegisterGrpo(app, g, run);
  cli::RegisterAlign(app, g, run);
  cli::RegisterBench(app, g, run);
  cli::RegisterConfig(app, g, run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return run ? run() : 2;
  } catch (const Error& e) {
    std::cerr << "error[" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return e.code() == ErrorCode::kInvalidConfig ? 2 : 1;
  } catch (const SchemaError& e) {
    std::cerr << "error[SchemaViolation]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[Internal]: " << e.what() << "\n";
    return 1;
  }
}
