#include "bforge/serialize.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace bforge;

namespace {

std::string data(const std::string& name) { return std::string(BFORGE_DATA_DIR) + "/" + name; }

FiniteMetricSpace random_space(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> num(1, 12), den(1, 4);
  std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Rational w(num(rng), den(rng));
      w.canonicalize();
      d[i][j] = d[j][i] = w;
    }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  std::vector<std::string> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back("x" + std::to_string(i));
  return make_space(pts, d);
}

void BM_Halver(benchmark::State& st) {
  auto n = static_cast<std::size_t>(st.range(0));
  auto m = random_space(n, 7);
  PairCollection c;
  for (std::size_t i = 0; i + 1 < n; i += 2) c.push_back({i, i + 1});
  for (auto _ : st) benchmark::DoNotOptimize(halver_rescale(m, c, c.front(), Rational(1)));
}
BENCHMARK(BM_Halver)->Arg(6)->Arg(10)->Arg(20);

void BM_Glue(benchmark::State& st) {
  auto s = std::get<TreeSystem>(parse_instance(data("k4_template.json")));
  auto sys = system_at_depth(s, static_cast<int>(st.range(0)));
  auto m = assign_shrinking(sys);
  for (auto _ : st) benchmark::DoNotOptimize(glue(sys, m));
  st.counters["V"] = static_cast<double>(sys.tree.v_nodes.size());
}
BENCHMARK(BM_Glue)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Circuits(benchmark::State& st) {
  auto spec = std::get<SplittingSpec>(parse_instance(data("abc_splitting.json")));
  auto b = build_barK(spec, 4, 3);
  auto j = b.junction.at("A[]");
  int n = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(circuits_through_edge(b.ball, j[0], j[1], n));
}
BENCHMARK(BM_Circuits)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_BuildBarK(benchmark::State& st) {
  auto spec = std::get<SplittingSpec>(parse_instance(data("abc_splitting.json")));
  int D = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(build_barK(spec, D, D - 1));
}
BENCHMARK(BM_BuildBarK)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
