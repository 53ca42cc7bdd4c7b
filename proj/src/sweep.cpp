#include "torusgpe/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <thread>

#include "nlohmann/json.hpp"
#include "torusgpe/dft.hpp"
#include "torusgpe/dynamics3d.hpp"
#include "torusgpe/minimizer3d.hpp"
#include "torusgpe/transverse.hpp"

namespace torusgpe {

RateFit fitRate(const std::vector<double>& omegas, const std::vector<double>& values) {
    const std::size_t n = omegas.size();
    if (n != values.size()) throw std::invalid_argument("fitRate: length mismatch");
    if (n < 3) throw std::invalid_argument("fitRate: need at least three points");
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(omegas[i]) || !(omegas[i] > 0.0))
            throw NonPositiveValue("fitRate: omegas must be positive and finite");
        if (!std::isfinite(values[i]) || !(values[i] > 0.0))
            throw NonPositiveValue("fitRate: values must be positive and finite");
        lx[i] = std::log(omegas[i]);
        ly[i] = std::log(values[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fitRate: omegas must be distinct");
    RateFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ly[i] - (f.intercept + f.slope * lx[i]);
        r2 += e * e;
    }
    f.residual = std::sqrt(r2 / static_cast<double>(n));
    return f;
}

std::size_t effectiveThreads() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const char* env = std::getenv("TORUSGPE_THREADS");
    if (env == nullptr || *env == '\0') return hw;
    if (!std::isdigit(static_cast<unsigned char>(env[0])))
        throw std::invalid_argument("TORUSGPE_THREADS must be a positive integer");
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0)
        throw std::invalid_argument("TORUSGPE_THREADS must be a positive integer");
    return static_cast<std::size_t>(v);
}

namespace {

using ordered_json = nlohmann::ordered_json;

// Work-stealing loop over [0, n); results land in index-addressed slots so
// the output never depends on scheduling. The first failure by index wins.
void parallelFor(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t nt = std::min(effectiveThreads(), n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errs(n);
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nt - 1);
    for (std::size_t t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);
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

bool strictlyDecreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

// "bounded across the sweep": max/min <= 3, with monotone decay accepted as
// well since super-convergent metrics can spread beyond the ratio gate while
// growth, the actual failure mode, still trips it
bool boundedAcross(const std::vector<double>& v) {
    if (v.empty()) return false;
    double lo = v[0], hi = v[0];
    for (const double x : v) {
        if (!std::isfinite(x)) return false;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (!(lo > 0.0)) return false;
    return hi / lo <= 3.0 || strictlyDecreasing(v);
}

// rate fit is advisory for tasks whose gate is boundedness; never let a
// non-fittable series turn into an execution error
void fitInto(ConvergenceReport& rep) {
    if (rep.omega_list.size() < 3) return;
    try {
        const RateFit f = fitRate(rep.omega_list, rep.values);
        rep.fitted_rate = f.slope;
        rep.fit_residual = f.residual;
    } catch (const NonPositiveValue&) {
        rep.fitted_rate = 0.0;
        rep.fit_residual = std::numeric_limits<double>::infinity();
    }
}

PotentialSpec makePotential(const SweepConfig& cfg, double omega) {
    switch (cfg.potential) {
        case PotentialVariant::Quadratic: return PotentialSpec::quadratic(omega);
        case PotentialVariant::GaussianRing: return PotentialSpec::gaussianRing(omega, cfg.m_param);
        default: throw std::invalid_argument("sweep: tabulated potentials have no config form");
    }
}

struct TaskOutput {
    std::vector<ordered_json> records;  // one per omega, ascending
    std::vector<std::string> csv_columns;
    std::vector<std::vector<double>> csv_rows;
    ConvergenceReport report;
    std::optional<ConvergenceReport> secondary;  // reduce: the 1D-trajectory metric
};

const char* taskName(TaskKind t) {
    switch (t) {
        case TaskKind::Spectrum: return "spectrum";
        case TaskKind::Ground3D: return "ground3d";
        case TaskKind::Reduce: return "reduce";
        case TaskKind::GN: return "gn";
        case TaskKind::Coercivity: return "coercivity";
    }
    return "unknown";
}

std::shared_ptr<const Grid3D> makeGrid3d(const SweepConfig& cfg, double omega) {
    const std::size_t n_s = cfg.n_s ? cfg.n_s : 256;
    const std::size_t n_z = cfg.n_z ? cfg.n_z : 129;
    const std::size_t n_theta = cfg.n_theta ? cfg.n_theta : 32;
    return Grid3D::make(RadialGrid::make(omega, n_s, cfg.s_max), makePotential(cfg, omega),
                        cfg.z_max, n_z, n_theta);
}

MinimizerResult minimizeAt(const SweepConfig& cfg, double omega) {
    MinimizeConfig mc;
    mc.omega = omega;
    mc.m = cfg.m;
    mc.kappa = cfg.kappa;
    mc.delta = cfg.delta;
    mc.tol_grad = 1e-6;
    return minimize(mc, makePotential(cfg, omega), makeGrid3d(cfg, omega));
}

ordered_json reportJson(const ConvergenceReport& rep) {
    ordered_json j;
    j["metric_name"] = rep.metric_name;
    j["omega_list"] = rep.omega_list;
    j["values"] = rep.values;
    j["fitted_rate"] = rep.fitted_rate;
    j["fit_residual"] = rep.fit_residual;
    j["pass"] = rep.pass;
    return j;
}

void writeOutputs(const SweepConfig& cfg, const TaskOutput& out) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    const std::string task = taskName(cfg.task);

    for (std::size_t i = 0; i < out.records.size(); ++i) {
        const fs::path p = dir / (task + "_omega_" + omegaTag(cfg.omega_list[i]) + ".json");
        std::ofstream f(p, std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
        f << out.records[i].dump(2) << '\n';
    }

    {
        const fs::path p = dir / (task + "_sweep.csv");
        std::ofstream f(p, std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
        for (std::size_t c = 0; c < out.csv_columns.size(); ++c)
            f << (c ? "," : "") << out.csv_columns[c];
        f << '\n';
        for (const auto& row : out.csv_rows) {
            for (std::size_t c = 0; c < row.size(); ++c) f << (c ? "," : "") << fmt17(row[c]);
            f << '\n';
        }
    }

    {
        const fs::path p = dir / (task + "_report.json");
        std::ofstream f(p, std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
        ordered_json j;
        j["task"] = task;
        j["pass"] = out.report.pass && (!out.secondary || out.secondary->pass);
        j["report"] = reportJson(out.report);
        if (out.secondary) j["secondary"] = reportJson(*out.secondary);
        f << j.dump(2) << '\n';
    }
}

TaskOutput runSpectrum(const SweepConfig& cfg) {
    const std::size_t n = cfg.omega_list.size();
    TaskOutput out;
    out.csv_columns = {"omega",   "lambda", "lambda_prime", "abs_lambda_err",
                       "gap_err", "l2_err", "l4_err"};
    out.records.resize(n);
    out.csv_rows.resize(n);
    out.report.values.resize(n);
    std::vector<double> lam_n(n), gap_n(n), l2_n(n), l4_n(n);

    parallelFor(n, [&](std::size_t i) {
        const double omega = cfg.omega_list[i];
        const std::size_t n_s = cfg.n_s ? cfg.n_s : 16384;
        const RadialGrid grid = RadialGrid::make(omega, n_s, cfg.s_max);
        const PotentialSpec spec = makePotential(cfg, omega);
        const TransverseEigenResult r = solveTransverse(grid, spec, 2);
        const ConvergenceMetrics m = groundStateConvergence(grid, r);
        const double rt = std::sqrt(omega);
        const double lam_err = std::abs(r.lambda - 1.0);
        const double gap_err = std::abs(r.lambda_prime - r.lambda - 2.0);

        ordered_json j;
        j["omega"] = omega;
        j["lambda"] = r.lambda;
        j["lambda_prime"] = r.lambda_prime;
        j["residual"] = r.residual;
        j["abs_lambda_err"] = lam_err;
        j["gap_err"] = gap_err;
        j["abs_lambda_err_normalized"] = lam_err * rt;
        j["gap_err_normalized"] = gap_err * rt;
        j["l2_err"] = m.l2_err;
        j["grad_err"] = m.grad_err;
        j["weighted_err"] = m.weighted_err;
        j["l4_err"] = m.l4_err;
        j["l2_err_normalized"] = m.l2_err * omega;
        j["l4_err_normalized"] = m.l4_err * omega * omega;
        out.records[i] = std::move(j);
        out.csv_rows[i] = {omega, r.lambda, r.lambda_prime, lam_err, gap_err, m.l2_err, m.l4_err};

        out.report.values[i] = lam_err;
        lam_n[i] = lam_err * rt;
        gap_n[i] = gap_err * rt;
        l2_n[i] = m.l2_err * omega;
        l4_n[i] = m.l4_err * omega * omega;
    });

    out.report.omega_list = cfg.omega_list;
    out.report.metric_name = "abs_lambda_err";
    fitInto(out.report);
    out.report.pass = boundedAcross(lam_n) && boundedAcross(gap_n) && boundedAcross(l2_n) &&
                      boundedAcross(l4_n);
    return out;
}

TaskOutput runGround3d(const SweepConfig& cfg) {
    const std::size_t n = cfg.omega_list.size();
    TaskOutput out;
    out.csv_columns = {"omega",  "energy", "mu",     "h1_dist",
                       "mu_err", "adprop", "margin", "el_residual"};
    out.records.resize(n);
    out.csv_rows.resize(n);
    out.report.values.resize(n);
    const DnoidalGroundState gs = groundState1d(cfg.m, cfg.kappa);
    std::vector<double> mu_errs(n), margins(n), gap_n(n), adprop_n(n);

    parallelFor(n, [&](std::size_t i) {
        const double omega = cfg.omega_list[i];
        const MinimizerResult res = minimizeAt(cfg, omega);
        const CircleField limit = sampleGroundState(gs, static_cast<int>(res.Q.grid->nTheta()));
        const double h1 = h1Distance(res.diagnostics.Q_par, limit);
        const double mu_err = std::abs(res.mu - gs.mu_inf);
        const ReductionReport red = dimensionReductionReport(res, gs);
        const double rt = std::sqrt(omega);

        ordered_json j;
        j["omega"] = omega;
        j["energy"] = res.energy;
        j["mu"] = res.mu;
        j["mu_err"] = mu_err;
        j["el_residual"] = res.el_residual;
        j["iterations"] = res.iterations;
        j["h1_dist"] = h1;
        j["sigma_distance"] = red.sigma_distance;
        j["energy_gap"] = red.energy_gap;
        j["energy_gap_normalized"] = red.energy_gap * rt;
        j["adprop"] = red.adprop;
        j["adprop_normalized"] = red.adprop * rt;
        j["constraint_margin"] = res.diagnostics.constraint_margin;
        j["perp_mass"] = res.diagnostics.perp_mass;
        out.records[i] = std::move(j);
        out.csv_rows[i] = {omega,  res.energy, res.mu,
                           h1,     mu_err,     red.adprop,
                           res.diagnostics.constraint_margin, res.el_residual};

        out.report.values[i] = h1;
        mu_errs[i] = mu_err;
        margins[i] = res.diagnostics.constraint_margin;
        gap_n[i] = red.energy_gap * rt;
        adprop_n[i] = red.adprop * rt;
    });

    out.report.omega_list = cfg.omega_list;
    out.report.metric_name = "h1_dist_to_circle_limit";
    fitInto(out.report);
    const bool margins_pos =
        std::all_of(margins.begin(), margins.end(), [](double x) { return x > 0.0; });
    out.report.pass = strictlyDecreasing(out.report.values) && strictlyDecreasing(mu_errs) &&
                      margins_pos && boundedAcross(gap_n) && boundedAcross(adprop_n);
    return out;
}

TaskOutput runReduce(const SweepConfig& cfg) {
    TaskOutput out;
    out.csv_columns = {"omega", "sup_remainder", "trajectory_distance"};
    const DnoidalGroundState gs = groundState1d(cfg.m, cfg.kappa);
    HarnessConfig hc;
    hc.T = cfg.T;
    hc.kappa = cfg.kappa;
    if (cfg.dt > 0.0) hc.dt_scale = cfg.dt;  // per-omega step is dt_scale / omega
    hc.delta = cfg.delta;
    if (cfg.n_z) hc.n_z = cfg.n_z;
    if (cfg.n_theta) hc.n_theta = cfg.n_theta;
    hc.z_max = cfg.z_max;
    const CircleField w0 = sampleGroundState(gs, static_cast<int>(hc.n_theta));
    const HarnessReport rep = reductionHarness(w0, cfg.omega_list, hc);

    for (std::size_t i = 0; i < cfg.omega_list.size(); ++i) {
        ordered_json j;
        j["omega"] = cfg.omega_list[i];
        j["sup_remainder"] = rep.remainder.values[i];
        j["trajectory_distance"] = rep.trajectory.values[i];
        out.records.push_back(std::move(j));
        out.csv_rows.push_back(
            {cfg.omega_list[i], rep.remainder.values[i], rep.trajectory.values[i]});
    }
    out.report = rep.remainder;
    out.secondary = rep.trajectory;
    return out;
}

TaskOutput runGN(const SweepConfig& cfg) {
    const std::size_t n = cfg.omega_list.size();
    TaskOutput out;
    out.csv_columns = {"omega", "c_gn"};
    out.records.resize(n);
    out.csv_rows.resize(n);
    out.report.values.resize(n);
    constexpr std::size_t kEnsemble = 200;

    parallelFor(n, [&](std::size_t i) {
        const double omega = cfg.omega_list[i];
        const auto grid = makeGrid3d(cfg, omega);
        const ProjectionBasis basis = buildProjectionBasis(grid);
        const double c = gnCheck(kEnsemble, grid, basis.Lambda, cfg.seed);

        ordered_json j;
        j["omega"] = omega;
        j["c_gn"] = c;
        j["ensemble_size"] = kEnsemble;
        j["seed"] = cfg.seed;
        out.records[i] = std::move(j);
        out.csv_rows[i] = {omega, c};
        out.report.values[i] = c;
    });

    out.report.omega_list = cfg.omega_list;
    out.report.metric_name = "c_gn";
    fitInto(out.report);
    // the interpolation constant must stay uniform in omega: plain ratio gate,
    // no monotone escape
    double lo = out.report.values[0], hi = out.report.values[0];
    for (const double v : out.report.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    out.report.pass = lo > 0.0 && hi / lo <= 3.0;
    return out;
}

TaskOutput runCoercivity(const SweepConfig& cfg) {
    if (cfg.kappa != -1)
        throw std::invalid_argument("coercivity task: linearization is focusing-only (kappa=-1)");
    const std::size_t n = cfg.omega_list.size();
    TaskOutput out;
    out.csv_columns = {"omega", "eigenvalue", "kernel_residual", "q_quadratic_form"};
    out.records.resize(n);
    out.csv_rows.resize(n);
    out.report.values.resize(n);
    std::vector<char> ok(n, 0);

    parallelFor(n, [&](std::size_t i) {
        const double omega = cfg.omega_list[i];
        const MinimizerResult res = minimizeAt(cfg, omega);
        const CoercivityReport cr = coercivityCheck(res);

        ordered_json j;
        j["omega"] = omega;
        j["eigenvalue"] = cr.eigenvalue;
        j["kernel_residual"] = cr.kernel_residual;
        j["q_quadratic_form"] = cr.q_quadratic_form;
        j["borderline_mass"] = cr.borderline_mass;
        j["mu"] = res.mu;
        j["energy"] = res.energy;
        out.records[i] = std::move(j);
        out.csv_rows[i] = {omega, cr.eigenvalue, cr.kernel_residual, cr.q_quadratic_form};
        out.report.values[i] = cr.eigenvalue;
        ok[i] = cr.eigenvalue > 0.0 && cr.kernel_residual < 1e-6 && cr.q_quadratic_form < 0.0;
    });

    out.report.omega_list = cfg.omega_list;
    out.report.metric_name = "deflated_min_eig";
    fitInto(out.report);
    out.report.pass = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
    return out;
}

void validate(const SweepConfig& cfg) {
    if (cfg.omega_list.empty()) throw std::invalid_argument("config: omegas must be nonempty");
    for (std::size_t i = 0; i < cfg.omega_list.size(); ++i) {
        if (!std::isfinite(cfg.omega_list[i]) || cfg.omega_list[i] <= 0.0)
            throw std::invalid_argument("config: omegas must be positive");
        if (i && !(cfg.omega_list[i] > cfg.omega_list[i - 1]))
            throw std::invalid_argument("config: omegas must be ascending and distinct");
    }
    if (!(cfg.m > 0.0)) throw std::invalid_argument("config: mass must be positive");
    if (cfg.kappa != 1 && cfg.kappa != -1) throw std::invalid_argument("config: kappa must be +-1");
    if (!(cfg.delta > 0.0)) throw std::invalid_argument("config: delta must be positive");
    if (cfg.dt < 0.0 || !std::isfinite(cfg.dt))
        throw std::invalid_argument("config: dt must be nonnegative");
    if (!(cfg.T > 0.0)) throw std::invalid_argument("config: T must be positive");
}

}  // namespace

int runTask(const SweepConfig& cfg) {
    try {
        validate(cfg);
        TaskOutput out;
        switch (cfg.task) {
            case TaskKind::Spectrum: out = runSpectrum(cfg); break;
            case TaskKind::Ground3D: out = runGround3d(cfg); break;
            case TaskKind::Reduce: out = runReduce(cfg); break;
            case TaskKind::GN: out = runGN(cfg); break;
            case TaskKind::Coercivity: out = runCoercivity(cfg); break;
        }
        writeOutputs(cfg, out);
        return (out.report.pass && (!out.secondary || out.secondary->pass)) ? 0 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

namespace {

// byte offset -> "line L, column C" for parse diagnostics
std::string lineColumn(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

double numberAt(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError("config: key '" + path + "': expected a number");
    return j.get<double>();
}

std::size_t indexAt(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number_unsigned())
        throw ConfigError("config: key '" + path + "': expected a nonnegative integer");
    return j.get<std::size_t>();
}

void rejectUnknown(const nlohmann::json& obj, const std::string& prefix,
                   std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || item.key() == a;
        if (!known) throw ConfigError("config: unknown key '" + prefix + item.key() + "'");
    }
}

}  // namespace

bool ParsedConfig::has(const std::string& key) const {
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

ParsedConfig parseConfigText(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte counts processed bytes, one past the offending offset
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        throw ConfigError("config: parse error at " + lineColumn(text, at) + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
    rejectUnknown(doc, "",
                  {"task", "omegas", "mass", "kappa", "delta", "potential", "grid", "evolve",
                   "seed", "output_dir"});

    ParsedConfig pc;
    SweepConfig& cfg = pc.cfg;

    if (doc.contains("task")) {
        const auto& t = doc["task"];
        if (!t.is_string()) throw ConfigError("config: key 'task': expected a string");
        const std::string s = t.get<std::string>();
        if (s == "spectrum")
            cfg.task = TaskKind::Spectrum;
        else if (s == "ground3d")
            cfg.task = TaskKind::Ground3D;
        else if (s == "reduce")
            cfg.task = TaskKind::Reduce;
        else if (s == "gn")
            cfg.task = TaskKind::GN;
        else if (s == "coercivity")
            cfg.task = TaskKind::Coercivity;
        else
            throw ConfigError("config: key 'task': unknown task '" + s + "'");
        pc.keys.push_back("task");
    }
    if (doc.contains("omegas")) {
        const auto& a = doc["omegas"];
        if (!a.is_array()) throw ConfigError("config: key 'omegas': expected an array of numbers");
        cfg.omega_list.clear();
        for (const auto& x : a) cfg.omega_list.push_back(numberAt(x, "omegas"));
        pc.keys.push_back("omegas");
    }
    if (doc.contains("mass")) {
        cfg.m = numberAt(doc["mass"], "mass");
        pc.keys.push_back("mass");
    }
    if (doc.contains("kappa")) {
        const auto& k = doc["kappa"];
        if (!k.is_number_integer()) throw ConfigError("config: key 'kappa': expected an integer");
        cfg.kappa = k.get<int>();
        pc.keys.push_back("kappa");
    }
    if (doc.contains("delta")) {
        cfg.delta = numberAt(doc["delta"], "delta");
        pc.keys.push_back("delta");
    }
    if (doc.contains("potential")) {
        const auto& p = doc["potential"];
        if (!p.is_object()) throw ConfigError("config: key 'potential': expected an object");
        rejectUnknown(p, "potential.", {"variant", "m_param"});
        if (p.contains("variant")) {
            const auto& v = p["variant"];
            if (!v.is_string())
                throw ConfigError("config: key 'potential.variant': expected a string");
            const std::string s = v.get<std::string>();
            if (s == "quadratic")
                cfg.potential = PotentialVariant::Quadratic;
            else if (s == "gaussian_ring")
                cfg.potential = PotentialVariant::GaussianRing;
            else
                throw ConfigError("config: key 'potential.variant': unknown variant '" + s + "'");
            pc.keys.push_back("potential.variant");
        }
        if (p.contains("m_param")) {
            cfg.m_param = numberAt(p["m_param"], "potential.m_param");
            pc.keys.push_back("potential.m_param");
        }
    }
    if (doc.contains("grid")) {
        const auto& g = doc["grid"];
        if (!g.is_object()) throw ConfigError("config: key 'grid': expected an object");
        rejectUnknown(g, "grid.", {"N_s", "N_z", "N_theta", "s_max", "z_max"});
        if (g.contains("N_s")) {
            cfg.n_s = indexAt(g["N_s"], "grid.N_s");
            pc.keys.push_back("grid.N_s");
        }
        if (g.contains("N_z")) {
            cfg.n_z = indexAt(g["N_z"], "grid.N_z");
            pc.keys.push_back("grid.N_z");
        }
        if (g.contains("N_theta")) {
            cfg.n_theta = indexAt(g["N_theta"], "grid.N_theta");
            pc.keys.push_back("grid.N_theta");
        }
        if (g.contains("s_max")) {
            cfg.s_max = numberAt(g["s_max"], "grid.s_max");
            pc.keys.push_back("grid.s_max");
        }
        if (g.contains("z_max")) {
            cfg.z_max = numberAt(g["z_max"], "grid.z_max");
            pc.keys.push_back("grid.z_max");
        }
    }
    if (doc.contains("evolve")) {
        const auto& e = doc["evolve"];
        if (!e.is_object()) throw ConfigError("config: key 'evolve': expected an object");
        rejectUnknown(e, "evolve.", {"dt", "T"});
        if (e.contains("dt")) {
            cfg.dt = numberAt(e["dt"], "evolve.dt");
            pc.keys.push_back("evolve.dt");
        }
        if (e.contains("T")) {
            cfg.T = numberAt(e["T"], "evolve.T");
            pc.keys.push_back("evolve.T");
        }
    }
    if (doc.contains("seed")) {
        const auto& s = doc["seed"];
        if (!s.is_number_unsigned())
            throw ConfigError("config: key 'seed': expected a nonnegative integer");
        cfg.seed = s.get<std::uint64_t>();
        pc.keys.push_back("seed");
    }
    if (doc.contains("output_dir")) {
        const auto& o = doc["output_dir"];
        if (!o.is_string()) throw ConfigError("config: key 'output_dir': expected a string");
        cfg.output_dir = o.get<std::string>();
        pc.keys.push_back("output_dir");
    }
    return pc;
}

ParsedConfig parseConfigFile(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parseConfigText(text);
}

}  // namespace torusgpe
