#pragma once

#include "netinfer/simulate.hpp"
#include "netinfer/timeseries.hpp"

#include <random>
#include <string>
#include <vector>

namespace testutil {

inline netinfer::DiscretizedSeries make_discrete(const std::vector<std::vector<int>>& symbols, int r) {
    netinfer::DiscretizedSeries ds;
    ds.symbols = symbols;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        ds.names.push_back("s" + std::to_string(i));
        ds.alphabet_sizes.push_back(r);
        ds.bin_edges.emplace_back();
    }
    return ds;
}

inline netinfer::TimeSeriesSet make_series(const std::vector<std::vector<double>>& cols) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        names.push_back("x" + std::to_string(i));
    }
    return netinfer::TimeSeriesSet(names, cols);
}

inline std::vector<std::vector<double>> gaussian_columns(std::size_t m, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::vector<double>> out(m, std::vector<double>(n));
    for (auto& c : out) {
        for (auto& v : c) {
            v = g(rng);
        }
    }
    return out;
}

// Coupled logistic network with small noise; edges given as (parent, child).
inline netinfer::SimOutput logistic_network(std::size_t m, const std::vector<netinfer::Edge>& edges,
                                            std::uint64_t seed, std::size_t n = 10000, double eps = 0.4,
                                            double noise = 1e-3) {
    netinfer::GdsConfig cfg;
    cfg.graph = netinfer::Dag::from_edges(m, edges);
    cfg.names = netinfer::default_names(m);
    cfg.model = netinfer::CoupledLogistic{4.0, eps};
    cfg.process_noise_std = noise;
    cfg.obs_noise_std = noise;
    cfg.n = n;
    cfg.burn_in = 1000;
    cfg.seed = seed;
    return netinfer::simulate(cfg);
}

}  // namespace testutil
