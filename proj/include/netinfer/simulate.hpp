#pragma once

#include "netinfer/dag.hpp"
#include "netinfer/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace netinfer {

/// x^i_{n+1} = (1 - eps) g(x^i_n) + (eps / p^i) sum_j g(x^{ij}_n) + noise, g(z) = r z (1 - z).
struct CoupledLogistic {
    double r = 4.0;
    double epsilon = 0.4;
};

/// x^i_{n+1} = self x^i_n + sum_j w_ij x^j_n + noise. weights[i][j] couples j into i.
struct LinearGaussianModel {
    double self = 0.0;
    std::vector<std::vector<double>> weights;
};

struct GdsConfig {
    std::vector<std::string> names;
    Dag graph;
    std::variant<CoupledLogistic, LinearGaussianModel> model;
    double process_noise_std = 0.0;
    double obs_noise_std = 0.0;
    std::size_t n = 10000;
    std::size_t burn_in = 1000;
    std::uint64_t seed = 0;
    /// Optional fixed x_0; otherwise uniform(0,1) (logistic) or zeros (linear-Gaussian).
    std::optional<std::vector<double>> initial_state;

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

struct SimOutput {
    TimeSeriesSet observations;
    std::vector<std::vector<double>> states;  // [subsystem][sample], diagnostics only
    Dag truth;
    GdsConfig config_echo;
};

SimOutput simulate_coupled_logistic(const GdsConfig& cfg);
SimOutput simulate_linear_gaussian(const GdsConfig& cfg);
/// Dispatches on the model alternative.
SimOutput simulate(const GdsConfig& cfg);

/// Spectral radius of self * I + W.
double spectral_radius(const LinearGaussianModel& model, std::size_t m);

/// Default vertex names v1..vm.
std::vector<std::string> default_names(std::size_t m);

}  // namespace netinfer
