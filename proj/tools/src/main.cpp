#include "bforge_cli/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  bforge::cli::PipelineConfig cfg;
  CLI::App app{"bforge: exact tree-system and splitting pipelines"};
  app.add_option("command", cfg.command, "validate|shrink|glue|complete|kettlebell|combine|decompose")
      ->required()
      ->check(CLI::IsMember(bforge::cli::commands()));
  app.add_option("--instance", cfg.instance, "instance JSON file")->required()->check(CLI::ExistingFile);
  app.add_option("--depth", cfg.depth, "truncation depth k (tree depth D for combine)");
  app.add_option("--radius", cfg.radius, "ball radius R for combine");
  app.add_option("--eps", cfg.eps, "net radius for complete, as P/Q");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--format", cfg.format, "report format")->check(CLI::IsMember({"json", "dot", "text"}));
  app.add_option("--threads", cfg.threads, "worker threads, 0 = all cores");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return bforge::cli::run(cfg, std::cout, std::cerr);
}
