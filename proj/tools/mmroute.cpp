#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "mmroute/commands.hpp"

namespace {

// Flags shared by every subcommand; they may appear before or after it.
void add_global_flags(CLI::App& app, mmroute::CliOptions& opt) {
  app.add_option_function<std::string>(
         "--config", [&opt](const std::string& p) { opt.config = p; }, "INI run configuration")
      ->check(CLI::ExistingFile);
  app.add_option_function<std::string>("--out", [&opt](const std::string& p) { opt.out = p; },
                                       "output directory");
  app.add_option_function<std::uint64_t>("--seed", [&opt](std::uint64_t s) { opt.seed = s; },
                                         "split seed and first router seed (workload seed for gen)");
  app.add_flag_function(
      "--log-x,!--no-log-x", [&opt](std::int64_t n) { opt.log_x = n > 0; },
      "log-scale the cost axis of plots (default on)");
  app.add_flag("--allow-oracle", opt.allow_oracle, "permit the analysis-only oracle router");
}

void add_data_flags(CLI::App& cmd, mmroute::CliOptions& opt) {
  cmd.add_option_function<std::string>(
      "--outcomes", [&opt](const std::string& p) { opt.outcomes = p; }, "outcome table (csv)");
  cmd.add_option_function<std::string>(
      "--embeddings", [&opt](const std::string& p) { opt.embeddings = p; }, "embedding file");
  cmd.add_option_function<std::string>("--pool", [&opt](const std::string& p) { opt.pool = p; },
                                       "model pool (csv); default is the built-in pool");
  cmd.add_flag_function(
      "--normalize-costs,!--raw-costs", [&opt](std::int64_t n) { opt.normalize_costs = n > 0; },
      "rescale costs so the most expensive model has mean cost 1");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmroute: offline budget-aware multimodal model routing and evaluation"};
  app.require_subcommand(1);
  mmroute::CliOptions opt;
  add_global_flags(app, opt);

  auto* ingest = app.add_subcommand("ingest", "validate an outcome table and embeddings");
  auto* gen = app.add_subcommand("gen", "generate a synthetic workload");
  auto* run = app.add_subcommand("run", "fit routers, sweep lambda, write metrics and plots");
  auto* transfer = app.add_subcommand("transfer", "evaluate a saved router with a masked modality");
  auto* report = app.add_subcommand("report", "print the metrics of a run directory");
  for (auto* cmd : {ingest, run, transfer}) add_data_flags(*cmd, opt);
  for (auto* cmd : {ingest, gen, run, transfer, report}) cmd->fallthrough();

  run->add_option_function<std::string>(
      "--fusion", [&opt](const std::string& m) { opt.fusion_override = m; },
      "feature mode for every router: equal, adaptive, text, image");
  transfer->add_option_function<std::string>(
      "--router", [&opt](const std::string& p) { opt.router = p; }, "saved router (.mmrr)")
      ->required()
      ->check(CLI::ExistingFile);
  transfer->add_option("--mask", opt.mask, "modality to mask: image, text, none")
      ->check(CLI::IsMember({"image", "text", "none"}));
  report->add_option_function<std::string>(
      "run_dir", [&opt](const std::string& p) { opt.run_dir = p; }, "run output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(mmroute::ExitCode::config);
  }

  if (ingest->parsed()) return mmroute::cmd_ingest(opt, std::cout, std::cerr);
  if (gen->parsed()) return mmroute::cmd_gen(opt, std::cout, std::cerr);
  if (run->parsed()) return mmroute::cmd_run(opt, std::cout, std::cerr);
  if (transfer->parsed()) return mmroute::cmd_transfer(opt, std::cout, std::cerr);
  return mmroute::cmd_report(opt, std::cout, std::cerr);
}
