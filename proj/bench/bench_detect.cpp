// Serial reference vs OpenMP kernels on synthetic images.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include "lsdp/descriptor.hpp"
#include "lsdp/dither.hpp"
#include "lsdp/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <vector>

namespace {

const lsdp::ImageBuffer& sample_image(int side) {
    static std::map<int, lsdp::ImageBuffer> cache;
    auto it = cache.find(side);
    if (it == cache.end()) it = cache.emplace(side, lsdp::render_synthetic(0, 0, lsdp::SyntheticStyle{side})).first;
    return it->second;
}

std::vector<lsdp::ImageBuffer> sample_batch() {
    std::vector<lsdp::ImageBuffer> out;
    for (int i = 0; i < 16; ++i) out.push_back(lsdp::render_synthetic(i % lsdp::kSyntheticCategories, i));
    return out;
}

void BM_Detect(benchmark::State& state) {
    const auto& img = sample_image(static_cast<int>(state.range(0)));
    const lsdp::DetectorConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(lsdp::detect_features(img, cfg));
}

void BM_DetectSerial(benchmark::State& state) {
    const auto& img = sample_image(static_cast<int>(state.range(0)));
    const lsdp::DetectorConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(lsdp::detect_features_serial(img, cfg));
}

void BM_DescribeBatch(benchmark::State& state) {
    const auto images = sample_batch();
    const lsdp::DescriptorConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(lsdp::describe_images(images, cfg));
}

void BM_DescribeBatchSerial(benchmark::State& state) {
    const auto images = sample_batch();
    const lsdp::DescriptorConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(lsdp::describe_images_serial(images, cfg));
}

}  // namespace

BENCHMARK(BM_Detect)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DetectSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DescribeBatch)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DescribeBatchSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
