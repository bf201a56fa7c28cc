// Compares the serial reference and the OpenMP pattern enumeration on the
// same instances and reports wall times plus agreement of the results.

#include <chrono>
#include <cstdio>
#include <vector>

#include "obed/experiments.hpp"
#include "obed/robustness.hpp"
#include "obed/rng.hpp"

using namespace obed;

namespace {

InstanceData bench_instance(std::uint64_t seed, std::size_t states, std::size_t K) {
    SplitMixRng rng(seed);
    const std::size_t edges = 3;
    std::vector<std::vector<double>> slope(edges, std::vector<double>(states));
    std::vector<std::vector<double>> intercept(edges, std::vector<double>(states));
    for (std::size_t e = 0; e < edges; ++e)
        for (std::size_t w = 0; w < states; ++w) {
            slope[e][w] = rng.uniform(0.2, 1.0);
            intercept[e][w] = rng.uniform(0.4, 1.6);
        }
    GameInstance inst(edges, states, std::vector<double>(states, 1.0 / (double)states),
                      std::move(slope), std::move(intercept));

    std::vector<std::vector<double>> profiles;
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<double> x(edges);
        double sum = 0.0;
        for (double& v : x) sum += (v = rng.uniform(0.05, 1.0));
        for (double& v : x) v /= sum;
        profiles.push_back(x);
    }
    return {std::move(inst), RecommendationSet(std::move(profiles))};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

int main() {
    const NormChoice norm = NormChoice::l1();
    std::printf("%-8s %-10s %-12s %-10s %-10s %-8s\n", "states", "profiles",
                "patterns", "serial_s", "parallel_s", "speedup");
    for (const auto& [states, K] : std::vector<std::pair<std::size_t, std::size_t>>{
             {2, 5}, {3, 4}, {3, 5}, {2, 8}}) {
        const InstanceData data = bench_instance(42 + states * 10 + K, states, K);

        auto t0 = std::chrono::steady_clock::now();
        const PatternSearchResult serial = certified_radius_star(
            data.inst, data.profiles, norm, 200000, Exec::Serial);
        const double ts = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        const PatternSearchResult parallel = certified_radius_star(
            data.inst, data.profiles, norm, 200000, Exec::Parallel);
        const double tp = seconds_since(t0);

        const double diff = serial.rho - parallel.rho;
        std::printf("%-8zu %-10zu %-12llu %-10.3f %-10.3f %-8.2f%s\n", states, K,
                    (unsigned long long)serial.patterns_evaluated, ts, tp,
                    tp > 0.0 ? ts / tp : 0.0,
                    (diff > 1e-12 || diff < -1e-12) ? "  MISMATCH" : "");
    }
    return 0;
}
