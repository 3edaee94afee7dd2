// Command-line driver: oatlas <stage> [--config FILE] [flags].

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "oatlas/config.h"
#include "oatlas/errors.h"
#include "oatlas/pipeline.h"

namespace {

constexpr int kExitUnexpected = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitModel = 4;

int ExitCodeFor(oatlas::ErrorKind kind) {
  switch (kind) {
    case oatlas::ErrorKind::kConfig: return kExitConfig;
    case oatlas::ErrorKind::kData: return kExitData;
    case oatlas::ErrorKind::kModel: return kExitModel;
  }
  return kExitUnexpected;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Orphan article atlas: link graphs, orphan statistics, "
               "difference-in-differences and link candidates"};
  app.require_subcommand(1);

  std::optional<std::string> config_path, languages, months, out, data_root;
  std::optional<std::string> treatment_month;
  std::optional<uint64_t> seed;
  std::optional<unsigned> threads;
  bool strict = false;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--languages", languages, "comma-separated wiki codes, or *");
  app.add_option("--months", months, "YYYY-MM or YYYY-MM..YYYY-MM");
  app.add_flag("--strict", strict, "abort on the first malformed row");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out, "output directory");
  app.add_option("--data-root", data_root, "input tree (overrides OATLAS_DATA)");
  app.add_option("--treatment-month", treatment_month, "restrict pairs to one month");
  app.add_option("--threads", threads, "worker threads (0 = all cores)");

  oatlas::Stage stage = oatlas::Stage::kAll;
  const std::pair<oatlas::Stage, const char *> stages[] = {
      {oatlas::Stage::kIngest, "parse dumps into snapshots"},
      {oatlas::Stage::kOrphans, "orphan and dead-end statistics"},
      {oatlas::Stage::kCharacterize, "feature representation among orphans"},
      {oatlas::Stage::kPanel, "treated/control pairs and pageview panel"},
      {oatlas::Stage::kDid, "difference-in-differences estimates"},
      {oatlas::Stage::kCandidates, "de-orphanization link candidates"},
      {oatlas::Stage::kAll, "every stage in order"},
  };
  for (const auto &[s, help] : stages) {
    auto *sub = app.add_subcommand(std::string(oatlas::StageName(s)), help);
    sub->fallthrough();
    sub->callback([&stage, s = s] { stage = s; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    oatlas::RunConfig config;
    if (config_path) oatlas::ApplyConfigFile(config, *config_path);
    if (const char *env = std::getenv("OATLAS_DATA"); env && *env) {
      oatlas::ApplyConfigValue(config, "data_root", env);
    }
    if (data_root) oatlas::ApplyConfigValue(config, "data_root", *data_root);
    if (languages) oatlas::ApplyConfigValue(config, "languages", *languages);
    if (months) oatlas::ApplyConfigValue(config, "months", *months);
    if (treatment_month) {
      oatlas::ApplyConfigValue(config, "treatment_month", *treatment_month);
    }
    if (strict) config.parse_mode = oatlas::ParseMode::kStrict;
    if (seed) config.seed = *seed;
    if (out) oatlas::ApplyConfigValue(config, "out", *out);
    if (threads) config.threads = *threads;
    oatlas::ValidateConfig(config);

    oatlas::RunStage(stage, config, std::cerr);
    return 0;
  } catch (const oatlas::Error &e) {
    std::cerr << "oatlas: error: " << e.what() << '\n';
    return ExitCodeFor(e.kind());
  } catch (const std::exception &e) {
    std::cerr << "oatlas: unexpected error: " << e.what() << '\n';
    return kExitUnexpected;
  }
}
