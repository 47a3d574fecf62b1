#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "herdscope/herding.hpp"
#include "herdscope/ledger.hpp"
#include "herdscope/metrics.hpp"
#include "herdscope/network.hpp"
#include "herdscope/regression.hpp"
#include "herdscope/simulator.hpp"

using namespace herdscope;

namespace {

std::vector<double> amounts(std::size_t n) {
  std::mt19937_64 rng(1);
  std::lognormal_distribution<double> d(8.5, 1.0);
  std::vector<double> a(n);
  for (auto& v : a) v = std::round(d(rng));
  return a;
}

void BM_coh(benchmark::State& state, CohVariant variant) {
  const auto a = amounts(static_cast<std::size_t>(state.range(0)));
  MetricsConfig c;
  c.coh_variant = variant;
  for (auto _ : state) benchmark::DoNotOptimize(coefficient_of_herding(std::span<const double>(a), c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_coh, lag_mean, CohVariant::lag_mean)->RangeMultiplier(8)->Range(64, 32768);
BENCHMARK_CAPTURE(BM_coh, m_point, CohVariant::m_point)->RangeMultiplier(8)->Range(64, 32768);

void BM_network(benchmark::State& state) {
  const auto a = amounts(static_cast<std::size_t>(state.range(0)));
  std::vector<Contribution> c;
  const ListingId id("P");
  for (std::size_t i = 0; i < a.size(); ++i) {
    c.push_back({id, LenderId("L" + std::to_string(i % 97)), Instant(Seconds(i)),
                 static_cast<std::int64_t>(a[i]) % 20 * 500, i});
  }
  const LenderLedger ledger;
  for (auto _ : state) benchmark::DoNotOptimize(build_herding_network(id, c, ledger, 5));
}
BENCHMARK(BM_network)->Range(64, 8192);

void BM_logistic_fit(benchmark::State& state) {
  const auto n = state.range(0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd X(n, 12);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    double eta = 0.2;
    for (Eigen::Index j = 1; j < 12; ++j) {
      X(i, j) = z(rng);
      eta += 0.1 * X(i, j);
    }
    y(i) = u(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_logistic(X, y));
}
BENCHMARK(BM_logistic_fit)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_simulate_and_metrics(benchmark::State& state) {
  SimConfig c;
  c.n_listings = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto sim = simulate(c);
    const auto ledger = LenderLedger::build(sim.listings, sim.contributions);
    benchmark::DoNotOptimize(compute_metrics(sim.listings, sim.contributions, ledger, MetricsConfig{}));
  }
}
BENCHMARK(BM_simulate_and_metrics)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
