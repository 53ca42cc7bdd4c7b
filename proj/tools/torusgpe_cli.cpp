// torusgpe: command-line driver for the toroidal condensate toolkit.
// Subcommands either run one computation (elliptic, ground1d, spectrum1d,
// evolve1d, ground3d, evolve3d) or orchestrate an omega sweep with a fitted
// convergence report (sweep, reduce-sweep, gn-check, coercivity).
//
// Exit codes: 0 pass, 1 execution/config error, 2 metric failure.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"
#include "torusgpe/dft.hpp"
#include "torusgpe/dynamics3d.hpp"
#include "torusgpe/minimizer3d.hpp"
#include "torusgpe/sweep.hpp"

namespace {

using torusgpe::ConfigError;
using torusgpe::SweepConfig;
using torusgpe::TaskKind;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Flags {
    std::string task;
    std::vector<double> omegas;
    double mass = 30.0;
    int kappa = -1;
    double delta = 0.05;
    std::string variant = "quadratic";
    double m_param = 1.0;
    std::size_t N_s = 0, N_z = 0, N_theta = 0;  // 0 leaves the task default in charge
    double s_max = 0.0, z_max = 8.0;
    double dt = 0.0;  // 0 picks the task default
    double T = 1.0;
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    std::string config_path;
    bool strict = false;
    std::map<std::string, CLI::Option*> opt;  // config key -> option, for conflict checks

    bool given(const std::string& key) const {
        const auto it = opt.find(key);
        return it != opt.end() && it->second->count() > 0;
    }
};

void addCommonFlags(CLI::App* sub, Flags& f, bool with_task) {
    if (with_task)
        f.opt["task"] = sub->add_option(
            "--task", f.task, "one of spectrum, ground3d, reduce, gn, coercivity");
    f.opt["omegas"] = sub->add_option("--omegas", f.omegas, "trap strengths, ascending")
                          ->delimiter(',');
    f.opt["mass"] = sub->add_option("--mass", f.mass, "constraint mass")->capture_default_str();
    f.opt["kappa"] =
        sub->add_option("--kappa", f.kappa, "+1 defocusing, -1 focusing")->capture_default_str();
    f.opt["delta"] = sub->add_option("--delta", f.delta, "kinetic tube level, fraction of sqrt(omega)")
                         ->capture_default_str();
    f.opt["potential.variant"] =
        sub->add_option("--variant", f.variant, "trap shape: quadratic or gaussian_ring")
            ->capture_default_str();
    f.opt["potential.m_param"] =
        sub->add_option("--m_param", f.m_param, "gaussian_ring shape parameter")
            ->capture_default_str();
    f.opt["grid.N_s"] = sub->add_option("--N_s", f.N_s, "radial nodes (0 = task default)");
    f.opt["grid.N_z"] = sub->add_option("--N_z", f.N_z, "axial nodes (0 = task default)");
    f.opt["grid.N_theta"] =
        sub->add_option("--N_theta", f.N_theta, "angular nodes, power of two (0 = task default)");
    f.opt["grid.s_max"] =
        sub->add_option("--s_max", f.s_max, "radial window edge (0 = automatic)");
    f.opt["grid.z_max"] = sub->add_option("--z_max", f.z_max, "axial half width")->capture_default_str();
    f.opt["evolve.dt"] = sub->add_option(
        "--dt", f.dt,
        "time step; evolve3d defaults to 1e-2/omega, reduce scales it as dt/omega per entry");
    f.opt["evolve.T"] = sub->add_option("--T", f.T, "time horizon")->capture_default_str();
    f.opt["seed"] = sub->add_option("--seed", f.seed, "ensemble seed")->capture_default_str();
    f.opt["output_dir"] =
        sub->add_option("--output_dir", f.output_dir, "report directory")->capture_default_str();
    sub->add_option("--config", f.config_path,
                    "JSON config; its keys win over flags unless --strict");
    sub->add_flag("--strict", f.strict,
                  "error when a flag and the config set the same key to different values");
}

TaskKind parseTask(const std::string& s) {
    if (s == "spectrum") return TaskKind::Spectrum;
    if (s == "ground3d") return TaskKind::Ground3D;
    if (s == "reduce") return TaskKind::Reduce;
    if (s == "gn") return TaskKind::GN;
    if (s == "coercivity") return TaskKind::Coercivity;
    throw ConfigError("unknown task '" + s + "'");
}

torusgpe::PotentialVariant parseVariant(const std::string& s) {
    if (s == "quadratic") return torusgpe::PotentialVariant::Quadratic;
    if (s == "gaussian_ring") return torusgpe::PotentialVariant::GaussianRing;
    throw ConfigError("unknown potential variant '" + s + "'");
}

// Flags first, then config-file keys on top (the file wins); --strict turns a
// disagreement between an explicit flag and the file into an error.
SweepConfig assemble(const Flags& f, std::optional<TaskKind> forced_task) {
    SweepConfig cfg;
    bool task_set = false;
    if (f.given("task")) {
        cfg.task = parseTask(f.task);
        task_set = true;
    }
    cfg.omega_list = f.omegas;
    cfg.m = f.mass;
    cfg.kappa = f.kappa;
    cfg.delta = f.delta;
    cfg.potential = parseVariant(f.variant);
    cfg.m_param = f.m_param;
    cfg.n_s = f.N_s;
    cfg.n_z = f.N_z;
    cfg.n_theta = f.N_theta;
    cfg.s_max = f.s_max;
    cfg.z_max = f.z_max;
    cfg.dt = f.dt;
    cfg.T = f.T;
    cfg.seed = f.seed;
    cfg.output_dir = f.output_dir;

    if (!f.config_path.empty()) {
        const torusgpe::ParsedConfig pc = torusgpe::parseConfigFile(f.config_path);
        auto conflict = [&](const std::string& key, bool differs) {
            if (f.strict && f.given(key) && differs)
                throw ConfigError("--strict: key '" + key +
                                  "' is set to different values by a flag and the config file");
        };
        if (pc.has("task")) {
            conflict("task", task_set && pc.cfg.task != cfg.task);
            cfg.task = pc.cfg.task;
            task_set = true;
        }
        if (pc.has("omegas")) {
            conflict("omegas", pc.cfg.omega_list != cfg.omega_list);
            cfg.omega_list = pc.cfg.omega_list;
        }
        if (pc.has("mass")) {
            conflict("mass", pc.cfg.m != cfg.m);
            cfg.m = pc.cfg.m;
        }
        if (pc.has("kappa")) {
            conflict("kappa", pc.cfg.kappa != cfg.kappa);
            cfg.kappa = pc.cfg.kappa;
        }
        if (pc.has("delta")) {
            conflict("delta", pc.cfg.delta != cfg.delta);
            cfg.delta = pc.cfg.delta;
        }
        if (pc.has("potential.variant")) {
            conflict("potential.variant", pc.cfg.potential != cfg.potential);
            cfg.potential = pc.cfg.potential;
        }
        if (pc.has("potential.m_param")) {
            conflict("potential.m_param", pc.cfg.m_param != cfg.m_param);
            cfg.m_param = pc.cfg.m_param;
        }
        if (pc.has("grid.N_s")) {
            conflict("grid.N_s", pc.cfg.n_s != cfg.n_s);
            cfg.n_s = pc.cfg.n_s;
        }
        if (pc.has("grid.N_z")) {
            conflict("grid.N_z", pc.cfg.n_z != cfg.n_z);
            cfg.n_z = pc.cfg.n_z;
        }
        if (pc.has("grid.N_theta")) {
            conflict("grid.N_theta", pc.cfg.n_theta != cfg.n_theta);
            cfg.n_theta = pc.cfg.n_theta;
        }
        if (pc.has("grid.s_max")) {
            conflict("grid.s_max", pc.cfg.s_max != cfg.s_max);
            cfg.s_max = pc.cfg.s_max;
        }
        if (pc.has("grid.z_max")) {
            conflict("grid.z_max", pc.cfg.z_max != cfg.z_max);
            cfg.z_max = pc.cfg.z_max;
        }
        if (pc.has("evolve.dt")) {
            conflict("evolve.dt", pc.cfg.dt != cfg.dt);
            cfg.dt = pc.cfg.dt;
        }
        if (pc.has("evolve.T")) {
            conflict("evolve.T", pc.cfg.T != cfg.T);
            cfg.T = pc.cfg.T;
        }
        if (pc.has("seed")) {
            conflict("seed", pc.cfg.seed != cfg.seed);
            cfg.seed = pc.cfg.seed;
        }
        if (pc.has("output_dir")) {
            conflict("output_dir", pc.cfg.output_dir != cfg.output_dir);
            cfg.output_dir = pc.cfg.output_dir;
        }
    }

    if (forced_task) {
        if (task_set && cfg.task != *forced_task)
            throw ConfigError("this subcommand fixes the task; drop the conflicting 'task' setting");
        cfg.task = *forced_task;
    }
    return cfg;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string omegaTag(double omega) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", omega);
    return buf;
}

void writeJsonFile(const fs::path& p, const ordered_json& j) {
    fs::create_directories(p.parent_path().empty() ? "." : p.parent_path());
    std::ofstream f(p, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
    f << j.dump(2) << '\n';
}

void writeProfileCsv(const fs::path& p, const torusgpe::CircleField& w) {
    std::ofstream f(p, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
    f << "theta,re,im\n";
    const int n = w.size();
    for (int i = 0; i < n; ++i)
        f << fmt17(2.0 * M_PI * i / n) << ',' << fmt17(w.values[i].real()) << ','
          << fmt17(w.values[i].imag()) << '\n';
}

double requireOneOmega(const SweepConfig& cfg) {
    if (cfg.omega_list.size() != 1)
        throw ConfigError("this subcommand takes exactly one omega (got " +
                          std::to_string(cfg.omega_list.size()) + ")");
    return cfg.omega_list[0];
}

std::shared_ptr<const torusgpe::Grid3D> makeGrid(const SweepConfig& cfg, double omega) {
    using namespace torusgpe;
    const PotentialSpec spec = cfg.potential == PotentialVariant::Quadratic
                                   ? PotentialSpec::quadratic(omega)
                                   : PotentialSpec::gaussianRing(omega, cfg.m_param);
    return Grid3D::make(RadialGrid::make(omega, cfg.n_s ? cfg.n_s : 256, cfg.s_max), spec,
                        cfg.z_max, cfg.n_z ? cfg.n_z : 129, cfg.n_theta ? cfg.n_theta : 32);
}

int runEllipticCmd(const SweepConfig& cfg, std::optional<double> modulus) {
    using namespace torusgpe;
    ordered_json j;
    int rc = 0;
    if (modulus) {
        const EllipticModulus k(*modulus);
        const CompleteKE ke = completeKE(k);
        j["k"] = *modulus;
        j["K"] = ke.K;
        j["E"] = ke.E;
        j["mass"] = 8.0 * ke.E * ke.K;
        std::cout << "elliptic: k=" << fmt17(*modulus) << " K=" << fmt17(ke.K)
                  << " E=" << fmt17(ke.E) << " mass=" << fmt17(8.0 * ke.E * ke.K) << '\n';
    } else {
        const EllipticModulus k = invertMass(cfg.m);
        const CompleteKE ke = completeKE(k);
        const double roundtrip = 8.0 * ke.E * ke.K;
        const double kk = k.value();
        const double mu = (2.0 - kk * kk) * ke.K * ke.K / (M_PI * M_PI);
        j["mass"] = cfg.m;
        j["k"] = kk;
        j["K"] = ke.K;
        j["E"] = ke.E;
        j["mass_roundtrip"] = roundtrip;
        j["roundtrip_err"] = std::abs(roundtrip - cfg.m);
        j["mu_inf"] = mu;
        rc = std::abs(roundtrip - cfg.m) <= 1e-12 * cfg.m ? 0 : 2;
        std::cout << "elliptic: m=" << fmt17(cfg.m) << " k=" << fmt17(kk)
                  << " mu_inf=" << fmt17(mu) << (rc == 0 ? " (round trip ok)\n" : " (ROUND TRIP FAILED)\n");
    }
    writeJsonFile(fs::path(cfg.output_dir) / "elliptic.json", j);
    return rc;
}

int runGround1dCmd(const SweepConfig& cfg) {
    using namespace torusgpe;
    const int n = static_cast<int>(cfg.n_theta ? cfg.n_theta : 1024);
    const DnoidalGroundState gs = groundState1d(cfg.m, cfg.kappa);
    const CircleField w = sampleGroundState(gs, n);

    // stationarity residual -w'' + (kappa/2pi)|w|^2 w + mu w, max over nodes
    std::vector<std::complex<double>> hat(w.values);
    dft::forward(hat.data(), n);
    for (int s = 0; s < n; ++s) {
        const double l = dft::frequency(s, n);
        hat[s] *= l * l;
    }
    dft::inverse(hat.data(), n);  // now +w'' with the sign folded in below
    double res_max = 0.0;
    for (int i = 0; i < n; ++i) {
        const double q = w.values[i].real();
        const double r = hat[i].real() + cfg.kappa / (2.0 * M_PI) * q * q * q + gs.mu_inf * q;
        res_max = std::max(res_max, std::abs(r));
    }

    ordered_json j;
    j["mass"] = cfg.m;
    j["kappa"] = cfg.kappa;
    j["branch"] = gs.branch == Branch::Dnoidal ? "dnoidal" : "constant";
    j["k"] = gs.k;
    j["mu_inf"] = gs.mu_inf;
    j["n_theta"] = n;
    j["sampled_mass"] = mass1d(w);
    j["energy"] = energy1d(w, cfg.kappa);
    j["residual_max"] = res_max;
    writeJsonFile(fs::path(cfg.output_dir) / "ground1d.json", j);
    writeProfileCsv(fs::path(cfg.output_dir) / "ground1d_profile.csv", w);
    const int rc = res_max < 1e-6 ? 0 : 2;
    std::cout << "ground1d: branch=" << j["branch"].get<std::string>()
              << " mu_inf=" << fmt17(gs.mu_inf) << " residual_max=" << fmt17(res_max)
              << (rc == 0 ? " (stationary)\n" : " (RESIDUAL TOO LARGE)\n");
    return rc;
}

int runSpectrum1dCmd(const SweepConfig& cfg) {
    using namespace torusgpe;
    const int n = static_cast<int>(cfg.n_theta ? cfg.n_theta : 1024);
    const DnoidalGroundState gs = groundState1d(cfg.m, cfg.kappa);
    const auto eigs = linearizedSpectrum1d(gs, 3, n);
    const double c = coercivityConstant1d(gs, n);

    ordered_json j;
    j["mass"] = cfg.m;
    j["kappa"] = cfg.kappa;
    j["n_theta"] = n;
    std::vector<double> vals;
    for (const auto& e : eigs) vals.push_back(e.value);
    j["eigenvalues"] = vals;
    j["coercivity_constant"] = c;
    writeJsonFile(fs::path(cfg.output_dir) / "spectrum1d.json", j);
    const int rc = c > 0.0 ? 0 : 2;
    std::cout << "spectrum1d: lowest eigenvalues";
    for (const double v : vals) std::cout << ' ' << fmt17(v);
    std::cout << " coercivity=" << fmt17(c) << (rc == 0 ? "\n" : " (NOT COERCIVE)\n");
    return rc;
}

int runEvolve1dCmd(const SweepConfig& cfg) {
    using namespace torusgpe;
    const int n = static_cast<int>(cfg.n_theta ? cfg.n_theta : 256);
    const double dt = cfg.dt > 0.0 ? cfg.dt : 1e-3;
    const long steps = std::max(1L, std::lround(cfg.T / dt));
    if (static_cast<double>(steps + 1) * n > 3.2e7)
        throw ConfigError("evolve1d: trajectory of " + std::to_string(steps) +
                          " steps would not fit in memory; increase --dt");
    const DnoidalGroundState gs = groundState1d(cfg.m, cfg.kappa);
    const CircleField w0 = sampleGroundState(gs, n);
    const auto traj = evolve1d(w0, cfg.kappa, dt, cfg.T);

    const double m0 = mass1d(w0);
    double drift = 0.0;
    for (const auto& w : traj) drift = std::max(drift, std::abs(mass1d(w) - m0) / m0);
    const double e0 = energy1d(w0, cfg.kappa);
    const double e_drift =
        std::abs(energy1d(traj.back(), cfg.kappa) - e0) / std::max(1.0, std::abs(e0));

    ordered_json j;
    j["mass"] = cfg.m;
    j["kappa"] = cfg.kappa;
    j["n_theta"] = n;
    j["n_steps"] = static_cast<std::int64_t>(traj.size()) - 1;
    j["dt"] = cfg.T / static_cast<double>(steps);
    j["T"] = cfg.T;
    j["mass_drift_rel"] = drift;
    j["energy_drift_rel"] = e_drift;
    writeJsonFile(fs::path(cfg.output_dir) / "evolve1d.json", j);
    writeProfileCsv(fs::path(cfg.output_dir) / "evolve1d_final.csv", traj.back());
    const int rc = drift < 1e-8 ? 0 : 2;
    std::cout << "evolve1d: " << traj.size() - 1 << " steps, mass drift " << fmt17(drift)
              << ", energy drift " << fmt17(e_drift) << (rc == 0 ? "\n" : " (MASS DRIFTED)\n");
    return rc;
}

int runGround3dCmd(const SweepConfig& cfg) {
    using namespace torusgpe;
    const double omega = requireOneOmega(cfg);
    MinimizeConfig mc;
    mc.omega = omega;
    mc.m = cfg.m;
    mc.kappa = cfg.kappa;
    mc.delta = cfg.delta;
    mc.tol_grad = 1e-6;
    const PotentialSpec spec = cfg.potential == PotentialVariant::Quadratic
                                   ? PotentialSpec::quadratic(omega)
                                   : PotentialSpec::gaussianRing(omega, cfg.m_param);
    const MinimizerResult res = minimize(mc, spec, makeGrid(cfg, omega));

    const DnoidalGroundState gs = groundState1d(cfg.m, cfg.kappa);
    const CircleField limit = sampleGroundState(gs, static_cast<int>(res.Q.grid->nTheta()));
    const double h1 = h1Distance(res.diagnostics.Q_par, limit);
    const ReductionReport red = dimensionReductionReport(res, gs);

    ordered_json j;
    j["omega"] = omega;
    j["mass"] = cfg.m;
    j["kappa"] = cfg.kappa;
    j["energy"] = res.energy;
    j["mu"] = res.mu;
    j["mu_err"] = std::abs(res.mu - gs.mu_inf);
    j["el_residual"] = res.el_residual;
    j["iterations"] = res.iterations;
    j["h1_dist"] = h1;
    j["sigma_distance"] = red.sigma_distance;
    j["energy_gap"] = red.energy_gap;
    j["adprop"] = red.adprop;
    j["constraint_margin"] = res.diagnostics.constraint_margin;
    j["perp_mass"] = res.diagnostics.perp_mass;
    const std::string tag = omegaTag(omega);
    writeJsonFile(fs::path(cfg.output_dir) / ("ground3d_omega_" + tag + ".json"), j);
    writeProfileCsv(fs::path(cfg.output_dir) / ("ground3d_profile_omega_" + tag + ".csv"),
                    res.diagnostics.Q_par);
    const int rc = res.diagnostics.constraint_margin > 0.0 ? 0 : 2;
    std::cout << "ground3d: omega=" << tag << " energy=" << fmt17(res.energy)
              << " mu=" << fmt17(res.mu) << " h1_dist=" << fmt17(h1) << " ("
              << res.iterations << " iterations)\n";
    return rc;
}

int runEvolve3dCmd(const SweepConfig& cfg) {
    using namespace torusgpe;
    const double omega = requireOneOmega(cfg);
    const auto grid = makeGrid(cfg, omega);
    const ProjectionBasis basis = buildProjectionBasis(grid);
    const DnoidalGroundState gs = groundState1d(cfg.m, cfg.kappa);
    const CircleField w0 = sampleGroundState(gs, static_cast<int>(grid->nTheta()));
    const Field3D v0 = threadCircleField(w0, basis);
    const H3Check h3 = checkH3(v0, cfg.delta, basis.Lambda);

    EvolveConfig ec;
    ec.dt = cfg.dt > 0.0 ? cfg.dt : 1e-2 / omega;
    ec.T = cfg.T;
    ec.omega = omega;
    ec.kappa = cfg.kappa;
    ec.Lambda = basis.Lambda;
    const long steps = std::max(1L, std::lround(cfg.T / ec.dt));
    ec.record_every = static_cast<std::size_t>(std::max(1L, steps / 100));
    const EvolutionTrace tr = evolve3d(v0, ec);

    const double m0 = tr.mass_series.front();
    double drift = 0.0, sup_rem = 0.0;
    for (const double m : tr.mass_series) drift = std::max(drift, std::abs(m - m0) / m0);
    for (const double r : tr.remainder_series) sup_rem = std::max(sup_rem, r);
    const double e0 = tr.energy_series.front();
    const double e_drift =
        std::abs(tr.energy_series.back() - e0) / std::max(1.0, std::abs(e0));

    const std::string tag = omegaTag(omega);
    {
        const fs::path p = fs::path(cfg.output_dir) / ("evolve3d_trace_omega_" + tag + ".csv");
        fs::create_directories(cfg.output_dir);
        std::ofstream f(p, std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
        f << "t,mass,energy,remainder\n";
        for (std::size_t i = 0; i < tr.times.size(); ++i)
            f << fmt17(tr.times[i]) << ',' << fmt17(tr.mass_series[i]) << ','
              << fmt17(tr.energy_series[i]) << ',' << fmt17(tr.remainder_series[i]) << '\n';
    }
    ordered_json j;
    j["omega"] = omega;
    j["mass"] = cfg.m;
    j["kappa"] = cfg.kappa;
    j["dt"] = ec.dt;
    j["T"] = cfg.T;
    j["n_steps"] = static_cast<std::int64_t>(steps);
    j["h3_value"] = h3.value;
    j["h3_pass"] = h3.pass;
    j["mass_drift_rel"] = drift;
    j["energy_drift_rel"] = e_drift;
    j["sup_remainder"] = sup_rem;
    writeJsonFile(fs::path(cfg.output_dir) / ("evolve3d_omega_" + tag + ".json"), j);
    const int rc = drift < 1e-8 ? 0 : 2;
    std::cout << "evolve3d: omega=" << tag << " " << steps << " steps, mass drift "
              << fmt17(drift) << ", sup remainder " << fmt17(sup_rem)
              << (rc == 0 ? "\n" : " (MASS DRIFTED)\n");
    return rc;
}

int runSweepCmd(const SweepConfig& cfg) {
    const int rc = torusgpe::runTask(cfg);
    if (rc != 1) {
        const char* names[] = {"spectrum", "ground3d", "reduce", "gn", "coercivity"};
        std::cout << "sweep: wrote " << cfg.output_dir << "/"
                  << names[static_cast<int>(cfg.task)] << "_report.json ("
                  << (rc == 0 ? "pass" : "metric failure") << ")\n";
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toroidal Gross-Pitaevskii toolkit: ground states, spectra, dynamics, and omega-sweep reports"};
    app.require_subcommand(1);
    app.footer("Exit codes: 0 pass, 1 error, 2 metric failure.\n"
               "TORUSGPE_THREADS caps the sweep's per-omega parallelism.");

    Flags f_ell, f_g1, f_s1, f_e1, f_g3, f_e3, f_sw, f_rs, f_gn, f_co;
    double modulus = 0.0;

    auto* sc_ell = app.add_subcommand("elliptic", "complete elliptic integrals and the dnoidal mass relation");
    addCommonFlags(sc_ell, f_ell, false);
    auto* modopt = sc_ell->add_option("--modulus", modulus, "evaluate K, E at this modulus instead of inverting --mass");

    auto* sc_g1 = app.add_subcommand("ground1d", "circle ground state profile and multiplier");
    addCommonFlags(sc_g1, f_g1, false);
    auto* sc_s1 = app.add_subcommand("spectrum1d", "linearized spectrum and coercivity on the circle");
    addCommonFlags(sc_s1, f_s1, false);
    auto* sc_e1 = app.add_subcommand("evolve1d", "split-step evolution on the circle");
    addCommonFlags(sc_e1, f_e1, false);
    auto* sc_g3 = app.add_subcommand("ground3d", "constrained 3D minimizer at one omega");
    addCommonFlags(sc_g3, f_g3, false);
    auto* sc_e3 = app.add_subcommand("evolve3d", "3D split-step evolution at one omega");
    addCommonFlags(sc_e3, f_e3, false);
    auto* sc_sw = app.add_subcommand("sweep", "run a task over the omega list and fit rates");
    addCommonFlags(sc_sw, f_sw, true);
    auto* sc_rs = app.add_subcommand("reduce-sweep", "remainder decay of the 3D flow toward the circle flow");
    addCommonFlags(sc_rs, f_rs, false);
    auto* sc_gn = app.add_subcommand("gn-check", "uniformity of the quartic interpolation constant");
    addCommonFlags(sc_gn, f_gn, false);
    auto* sc_co = app.add_subcommand("coercivity", "linearized coercivity of the 3D minimizer");
    addCommonFlags(sc_co, f_co, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        torusgpe::effectiveThreads();  // validate TORUSGPE_THREADS up front
        if (sc_ell->parsed()) {
            std::optional<double> mod;
            if (modopt->count() > 0) mod = modulus;
            return runEllipticCmd(assemble(f_ell, {}), mod);
        }
        if (sc_g1->parsed()) return runGround1dCmd(assemble(f_g1, {}));
        if (sc_s1->parsed()) return runSpectrum1dCmd(assemble(f_s1, {}));
        if (sc_e1->parsed()) return runEvolve1dCmd(assemble(f_e1, {}));
        if (sc_g3->parsed()) return runGround3dCmd(assemble(f_g3, {}));
        if (sc_e3->parsed()) return runEvolve3dCmd(assemble(f_e3, {}));
        if (sc_sw->parsed()) return runSweepCmd(assemble(f_sw, {}));
        if (sc_rs->parsed()) return runSweepCmd(assemble(f_rs, TaskKind::Reduce));
        if (sc_gn->parsed()) return runSweepCmd(assemble(f_gn, TaskKind::GN));
        if (sc_co->parsed()) return runSweepCmd(assemble(f_co, TaskKind::Coercivity));
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
