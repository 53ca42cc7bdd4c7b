#pragma once
// Sweep orchestration: power-law rate fitting, task configuration, and the
// report files the command-line driver emits.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "torusgpe/potentials.hpp"

namespace torusgpe {

struct NonPositiveValue : std::domain_error {
    explicit NonPositiveValue(const std::string& what) : std::domain_error(what) {}
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;  // of log(value) against log(omega)
    double residual = 0.0;   // rms log-misfit
};

// Least squares on (log omega, log value). Needs at least three entries,
// all positive. Throws NonPositiveValue.
RateFit fitRate(const std::vector<double>& omegas, const std::vector<double>& values);

struct ConvergenceReport {
    std::vector<double> omega_list;
    std::string metric_name;
    std::vector<double> values;
    double fitted_rate = 0.0;
    double fit_residual = 0.0;
    bool pass = false;  // against the target declared by the producing task
};

enum class TaskKind { Spectrum, Ground3D, Reduce, GN, Coercivity };

struct SweepConfig {
    TaskKind task = TaskKind::Spectrum;
    std::vector<double> omega_list;  // ascending, distinct, >= 3 for rate fits
    double m = 30.0;
    int kappa = -1;
    double delta = 0.05;
    PotentialVariant potential = PotentialVariant::Quadratic;
    double m_param = 1.0;  // GaussianRing shape parameter, ignored otherwise
    // 0 leaves the per-task default in charge
    std::size_t n_s = 0, n_z = 0, n_theta = 0;
    double s_max = 0.0, z_max = 8.0;
    double dt = 0.0;  // evolve tasks; 0 picks 1e-2/omega
    double T = 1.0;
    std::uint64_t seed = 1;
    std::string output_dir = ".";
};

// Runs the task per omega, writes one JSON record per omega, a combined CSV,
// and a ConvergenceReport JSON into output_dir. Returns the process exit
// code: 0 pass, 2 metric failure (files still written), 1 execution error.
int runTask(const SweepConfig& cfg);

// Worker budget for the per-omega parallel loop: TORUSGPE_THREADS when set,
// else the hardware thread count. Throws std::invalid_argument on a value
// that is not a positive integer.
std::size_t effectiveThreads();

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A config document plus which keys it actually set, so the caller can
// resolve flag/file precedence.
struct ParsedConfig {
    SweepConfig cfg;
    std::vector<std::string> keys;  // dotted paths, e.g. "grid.N_theta"
    bool has(const std::string& key) const;
};

// JSON object with top-level keys {task, omegas, mass, kappa, delta,
// potential{variant, m_param}, grid{N_s, N_z, N_theta, s_max, z_max},
// evolve{dt, T}, seed, output_dir}. Unknown keys are rejected; parse and
// type errors carry line/key context. Throws ConfigError.
ParsedConfig parseConfigText(const std::string& text);
ParsedConfig parseConfigFile(const std::string& path);

}  // namespace torusgpe
