#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bforge::cli {

struct PipelineConfig {
  std::string command;   // validate|shrink|glue|complete|kettlebell|combine|decompose
  std::string instance;
  int depth = 3;
  int radius = 3;
  std::string eps;       // "p/q", required by `complete`
  std::string out_dir = ".";
  std::string format = "json";  // json|dot|text
  unsigned threads = 0;          // 0: hardware concurrency
};

const std::vector<std::string>& commands();

// 0: report has no failures; 1: failed invariants; 2: refused (bad input,
// infeasible depth/eps/radius, unknown command).
int run(const PipelineConfig& config, std::ostream& out, std::ostream& err);

}  // namespace bforge::cli
