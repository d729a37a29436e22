#include "ko/entire_solutions.hpp"
#include "ko/matrixops.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

std::vector<ko::SymMatrix> random_matrices(std::size_t count, std::size_t n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::vector<ko::SymMatrix> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        auto m = ko::SymMatrix::zeros(n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = r; c < n; ++c) m.set(r, c, u(rng));
        out.push_back(m);
    }
    return out;
}

const std::vector<ko::SymMatrix>& matrices() {
    static const auto m = random_matrices(4096, 5);
    return m;
}

const ko::EntireCandidate& candidate() {
    static const ko::EntireCandidate c = [] {
        const auto spec = ko::NonlinearitySpec::affine(1.0, 1.0);
        ko::ShootConfig cfg;
        cfg.c = 2.0;
        return ko::EntireCandidate{ko::shoot(spec, cfg), spec, 3, ko::PPlusK{2}};
    }();
    return c;
}

const std::vector<ko::Point>& cloud() {
    static const auto p = ko::random_ball_points(3, 4096, 10.0, 11);
    return p;
}

void BM_EvaluateBatch(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(ko::evaluate_batch(ko::PPlusK{2}, matrices()));
}
void BM_EvaluateBatchSerial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(ko::evaluate_batch_serial(ko::PPlusK{2}, matrices()));
}
void BM_Residual(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(ko::residual(candidate(), cloud()));
}
void BM_ResidualSerial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(ko::residual_serial(candidate(), cloud()));
}

BENCHMARK(BM_EvaluateBatch)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateBatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Residual)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidualSerial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
