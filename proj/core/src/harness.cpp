#include "spulse/harness.hpp"

#include "spulse/appendix.hpp"
#include "spulse/errors.hpp"
#include "spulse/io.hpp"
#include "spulse/lp.hpp"
#include "spulse/monitors.hpp"
#include "spulse/spectral.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <ostream>

namespace spulse {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr double kTimeMatch = 1e-9;

bool same_time(double a, double b) { return std::abs(a - b) <= kTimeMatch * std::max(1.0, std::abs(b)); }

const Snapshot* find_snapshot(const std::vector<Snapshot>& snaps, double t) {
    for (const auto& s : snaps)
        if (same_time(s.t, t)) return &s;
    return nullptr;
}

std::string time_label(double t) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", t);
    return buf;
}

// Least squares y = a + b x; nullopt with fewer than 8 points.
std::optional<double> linear_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 8) return std::nullopt;
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

std::optional<double> try_decay_fit(const std::vector<double>& t, const std::vector<double>& y, const FitWindow& w) {
    try {
        return decay_fit(t, y, w.first, w.second).slope;
    } catch (const Error&) {
        return std::nullopt;
    }
}

bool inside(double t, const FitWindow& w) { return t >= w.first && t <= w.second; }

VelocityFit fit_velocity(double v, const std::vector<const ProbeRecord*>& rows, const ExperimentConfig& cfg) {
    VelocityFit f;
    f.v = v;
    const FitWindow& w = cfg.fits.ode;
    const Pairing pairing = cfg.probe.pairing;

    std::vector<double> rt, ry;
    for (const auto* r : rows)
        if (r->ode_residual) {
            rt.push_back(r->t);
            ry.push_back(std::abs(*r->ode_residual));
        }
    f.ode_slope = try_decay_fit(rt, ry, w);

    std::vector<double> logt, arg, logmod, log10t;
    double previous = 0.0, unwrapped = 0.0;
    bool first = true;
    double pred = 0.0;
    std::size_t pred_count = 0;
    for (const auto* r : rows) {
        const cplx g = r->estimator(pairing);
        cplx z = g;
        if (r->gamma_linear) {
            if (std::abs(*r->gamma_linear) == 0.0) continue;
            z = g / *r->gamma_linear;
        }
        if (std::abs(z) == 0.0) continue;
        const double a = std::arg(z);
        if (first) {
            unwrapped = a;
            first = false;
        } else {
            double d = a - previous;
            d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
            unwrapped += d;
        }
        previous = a;
        if (!inside(r->t, w)) continue;
        logt.push_back(std::log(r->t));
        arg.push_back(unwrapped);
        logmod.push_back(std::log(std::abs(g)));
        log10t.push_back(std::log10(r->t));
        pred += 3.0 / std::sqrt(-v) * std::norm(g);
        ++pred_count;
    }
    f.phase_slope = linear_slope(logt, arg);
    if (pred_count > 0) f.phase_prediction = pred / static_cast<double>(pred_count);
    if (f.phase_slope && f.phase_prediction && *f.phase_prediction > 0.0)
        f.phase_relerr = std::abs(*f.phase_slope - *f.phase_prediction) / *f.phase_prediction;
    if (const auto m = linear_slope(log10t, logmod)) f.modulus_drift = std::abs(*m);
    return f;
}

template <class T>
void worst(std::optional<double>& acc, const std::optional<T>& value) {
    if (!value) return;
    acc = acc ? std::max(*acc, *value) : *value;
}

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

fs::path resolve_out(const ExperimentConfig& cfg, const RunOptions& opts) {
    return fs::path(opts.out_dir.empty() ? cfg.output.dir : opts.out_dir);
}

std::string code_version() {
#ifdef SPULSE_VERSION
    return SPULSE_VERSION;
#else
    return "0.0.0";
#endif
}

} // namespace

std::vector<double> required_probe_times(const ExperimentConfig& cfg) {
    std::vector<double> out;
    for (double t : snapshot_times(cfg.solver))
        if (t >= 1.0 && t < cfg.solver.t_final * (1.0 - kTimeMatch)) out.push_back(t);
    return out;
}

ScatterResult scatter_analysis(const std::vector<Snapshot>& snaps, const ExperimentConfig& cfg, unsigned jobs) {
    ScatterResult res;

    std::vector<double> nt, ny;
    for (const auto& s : snaps)
        if (s.t > 0.0) {
            nt.push_back(s.t);
            ny.push_back(s.norms.linf + s.norms.ux_linf);
        }
    res.metrics.linf_slope = try_decay_fit(nt, ny, cfg.fits.linf);

    const std::vector<double> times = required_probe_times(cfg);
    std::vector<const Snapshot*> chosen;
    for (double t : times) {
        const Snapshot* s = find_snapshot(snaps, t);
        if (!s) throw MissingSnapshots("trajectory has no snapshot at t = " + time_label(t), t);
        chosen.push_back(s);
    }
    const Snapshot* origin = nullptr;
    if (cfg.phase_reference == PhaseReference::linear) {
        origin = find_snapshot(snaps, 0.0);
        if (!origin) throw MissingSnapshots("trajectory has no snapshot at t = 0 (phase reference)", 0.0);
    }

    for (const Snapshot* s : chosen) {
        std::optional<Field> linear;
        if (origin) linear = free_propagate(origin->u, s->t, cfg.solver.mean_tol);
        auto rows = probe_snapshot(*s, cfg.probe, cfg.delta, linear ? &*linear : nullptr, jobs);
        res.records.insert(res.records.end(), rows.begin(), rows.end());
    }
    std::sort(res.records.begin(), res.records.end(), [](const ProbeRecord& a, const ProbeRecord& b) {
        return a.v != b.v ? a.v < b.v : a.t < b.t;
    });
    finalize_records(res.records, cfg.probe);

    std::map<double, std::vector<const ProbeRecord*>> by_v;
    for (const auto& r : res.records) by_v[r.v].push_back(&r);

    for (double v : cfg.fits.ode_velocities) {
        const auto it = std::find_if(by_v.begin(), by_v.end(),
                                     [v](const auto& kv) { return std::abs(kv.first - v) <= 1e-12 * std::abs(v); });
        if (it == by_v.end()) continue;
        VelocityFit f = fit_velocity(it->first, it->second, cfg);
        worst(res.metrics.ode_residual_slope, f.ode_slope);
        worst(res.metrics.phase_drift_relerr, f.phase_relerr);
        worst(res.metrics.modulus_drift_per_decade, f.modulus_drift);
        res.metrics.velocities.push_back(f);
    }

    // W(t) against W(2t) on the rays in the window at both times.
    const FitWindow& ow = cfg.fits.ode;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!inside(times[i], ow)) continue;
        std::size_t j = i + 1;
        while (j < times.size() && !same_time(times[j], 2.0 * times[i]) && times[j] < 2.0 * times[i]) ++j;
        if (j >= times.size() || !same_time(times[j], 2.0 * times[i]) || !inside(times[j], ow)) continue;
        double sup = 0.0;
        bool any = false;
        for (const auto& [v, rows] : by_v) {
            const ProbeRecord* a = rows[i];
            const ProbeRecord* b = rows[j];
            if (!a->in_window || !b->in_window) continue;
            sup = std::max(sup, std::abs(a->W - b->W));
            any = true;
        }
        if (any) res.W_stability.emplace_back(times[i], sup);
    }
    {
        std::vector<double> t, y;
        for (const auto& [ti, d] : res.W_stability) {
            t.push_back(ti);
            y.push_back(d);
        }
        res.metrics.W_stability_slope = try_decay_fit(t, y, ow);
    }

    // Asymptotic profile built from the final-state table at the last probe time.
    if (!times.empty()) {
        res.W_time = times.back();
        std::vector<double> vs;
        std::vector<cplx> Ws;
        for (const auto& [v, rows] : by_v) {
            vs.push_back(v);
            Ws.push_back(rows.back()->W);
        }
        const WSampler sampler(vs, Ws);
        const FitWindow& pw = cfg.fits.profile;
        std::vector<double> t, y;
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!inside(times[i], pw)) continue;
            const Snapshot& s = *chosen[i];
            const SpectralField uhat = strip_periodic_images(forward_transform(s.u), s.t);
            double sup = 0.0;
            for (double v : vs) {
                if (!in_window(s.t, v, cfg.probe.alpha)) continue;
                const double x = v * s.t;
                const double u = interpolate(uhat, x).real();
                sup = std::max(sup, std::abs(u - asymptotic_profile(s.t, x, sampler).value));
            }
            res.profile_remainder.emplace_back(s.t, sup * std::sqrt(s.t));
            t.push_back(s.t);
            y.push_back(sup * std::sqrt(s.t));
        }
        res.metrics.profile_remainder_slope = try_decay_fit(t, y, pw);
    }
    return res;
}

int cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err) {
    const fs::path dir = resolve_out(cfg, opts);
    fs::create_directories(dir / "snapshots");
    const std::string hash = config_hash(cfg);
    const Field u0 = initial_data(cfg);
    const CutoffSpec spec = build_cutoff(cfg.delta);

    std::optional<CsvWriter> norms;
    if (cfg.wants("csv"))
        norms.emplace((dir / "norms.csv").string(), hash,
                      std::vector<std::string>{"t", "l2", "hs", "hm1", "jdx_l2", "xs", "linf", "ux_linf", "su_l2",
                                               "wrapfrac", "mean_ratio", "h1_fd_rate", "h1_quadrature_rate",
                                               "h1_rel_error", "mon_hyp", "mon_hyp_x", "mon_ell", "mon_ell_x",
                                               "mon_weighted"});

    ordered_json index = ordered_json::array();
    double l2_first = 0.0, l2_drift = 0.0, mean_max = 0.0, h1_max = 0.0;
    std::size_t count = 0;

    const SnapshotMonitor writer = [&](const Snapshot& s) {
        const NormRecord& r = s.norms;
        double mean = 0.0;
        for (std::size_t j = 0; j < s.u.size(); ++j) mean += s.u[j].real();
        mean = std::abs(mean) * s.u.grid().dx() / std::sqrt(2.0 * std::numbers::pi);
        const double mean_ratio = r.l2 > 0.0 ? mean / r.l2 : 0.0;
        if (count == 0) l2_first = r.l2;
        if (l2_first > 0.0) l2_drift = std::max(l2_drift, std::abs(r.l2 - l2_first) / l2_first);
        mean_max = std::max(mean_max, mean_ratio);
        if (s.h1) h1_max = std::max(h1_max, s.h1->rel_error);

        std::optional<DecayMonitors> mon;
        if (cfg.decay_monitors && s.t >= 1.0) mon = decay_monitors(s, spec, opts.jobs);

        if (cfg.output.snapshots) {
            char name[32];
            std::snprintf(name, sizeof name, "u_%04zu.spfld", count);
            write_field((dir / "snapshots" / name).string(), s.u, s.t);
            index.push_back({{"t", s.t}, {"file", std::string("snapshots/") + name}});
        }
        if (norms) {
            const auto h = [&](double H1RateCheck::*m) { return s.h1 ? format_number((*s.h1).*m) : std::string(); };
            const auto mv = [&](double DecayMonitors::*m) { return mon ? format_number((*mon).*m) : std::string(); };
            norms->row({format_number(r.t), format_number(r.l2), format_number(r.hs), format_number(r.hm1),
                        format_number(r.jdx_l2), format_number(r.xs), format_number(r.linf), format_number(r.ux_linf),
                        format_number(r.su_l2), format_number(r.wrapfrac), format_number(mean_ratio),
                        h(&H1RateCheck::fd_rate), h(&H1RateCheck::quadrature_rate), h(&H1RateCheck::rel_error),
                        mv(&DecayMonitors::hyp), mv(&DecayMonitors::hyp_x), mv(&DecayMonitors::ell),
                        mv(&DecayMonitors::ell_x), mv(&DecayMonitors::weighted)});
        }
        ++count;
    };

    std::string status = "ok";
    std::optional<double> violation_time;
    int code = kExitOk;
    try {
        (void)evolve(u0, cfg.solver, {writer}, false);
    } catch (const MonitorViolation& e) {
        err << "simulate: " << e.what() << "\n";
        status = e.what();
        violation_time = e.time();
        code = kExitMonitor;
    } catch (const StepRejected& e) {
        err << "simulate: " << e.what() << "\n";
        status = e.what();
        code = kExitMonitor;
    }
    if (norms) norms->close();

    ordered_json manifest;
    manifest["format"] = "spulse-trajectory";
    manifest["config_hash"] = hash;
    manifest["code_version"] = code_version();
    manifest["n"] = cfg.solver.n;
    manifest["L"] = cfg.solver.length;
    manifest["status"] = status;
    manifest["config"] = canonical_config(cfg);
    manifest["snapshots"] = index;
    write_text((dir / "manifest.json").string(), manifest.dump(2) + "\n");

    ordered_json summary;
    summary["command"] = "simulate";
    summary["status"] = status;
    summary["exit_code"] = code;
    summary["config_hash"] = hash;
    summary["snapshots"] = count;
    summary["l2_relative_drift"] = l2_drift;
    summary["max_mean_ratio"] = mean_max;
    summary["max_h1_rel_error"] = h1_max;
    summary["violation_time"] = opt(violation_time);
    if (cfg.wants("json")) write_text((dir / "simulate_summary.json").string(), summary.dump(2) + "\n");
    out << summary.dump() << "\n";
    return code;
}

int cmd_scatter(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err) {
    const fs::path dir = resolve_out(cfg, opts);
    const fs::path traj = opts.trajectory_dir.empty() ? dir : fs::path(opts.trajectory_dir);
    const std::string hash = config_hash(cfg);

    const ordered_json manifest = ordered_json::parse(read_text((traj / "manifest.json").string()));
    const std::string stored = manifest.at("config_hash").get<std::string>();
    if (stored != hash) {
        if (!opts.force) {
            err << "scatter: trajectory config hash " << stored << " does not match " << hash
                << " (pass --force to override)\n";
            return kExitUsage;
        }
        err << "scatter: warning: config hash mismatch overridden by --force\n";
    }

    std::vector<Snapshot> snaps;
    const Grid g = cfg.solver.grid();
    for (const auto& entry : manifest.at("snapshots")) {
        const StoredField f = read_field((traj / entry.at("file").get<std::string>()).string());
        if (f.values.size() != g.n()) {
            err << "scatter: snapshot length " << f.values.size() << " does not match solver.n = " << g.n() << "\n";
            return kExitUsage;
        }
        CVec v(g.n());
        for (std::size_t j = 0; j < g.n(); ++j) v[j] = f.values[j];
        snaps.push_back(make_snapshot(Field(g, std::move(v), Kind::real), f.t, cfg.solver.sobolev_s, cfg.solver.p,
                                      cfg.solver.mean_tol));
    }

    ScatterResult res;
    try {
        res = scatter_analysis(snaps, cfg, opts.jobs);
    } catch (const MissingSnapshots& e) {
        err << "scatter: " << e.what() << "\n";
        return kExitUsage;
    }
    fs::create_directories(dir);

    if (cfg.wants("csv")) {
        CsvWriter probe((dir / "probe.csv").string(), hash,
                        {"t", "v", "xi_v", "N_v", "gamma_re", "gamma_im", "gamma_plus_re", "gamma_plus_im",
                         "gamma_lin_re", "gamma_lin_im", "W_re", "W_im", "ode_residual_abs", "err_u", "err_ux",
                         "in_window"});
        for (const auto& r : res.records) {
            const std::string lin_re = r.gamma_linear ? format_number(r.gamma_linear->real()) : "";
            const std::string lin_im = r.gamma_linear ? format_number(r.gamma_linear->imag()) : "";
            const std::string ode = r.ode_residual ? format_number(std::abs(*r.ode_residual)) : "";
            probe.row({format_number(r.t), format_number(r.v), format_number(r.xi_v), format_number(r.N_v),
                       format_number(r.gamma.real()), format_number(r.gamma.imag()),
                       format_number(r.gamma_plus.real()), format_number(r.gamma_plus.imag()), lin_re, lin_im, format_number(r.W.real()), format_number(r.W.imag()), ode,
                       format_number(r.err_u), format_number(r.err_ux), r.in_window ? "1" : "0"});
        }
        probe.close();

        CsvWriter wt((dir / "W_table.csv").string(), hash, {"v", "t", "W_re", "W_im", "W_abs", "in_window"});
        for (const auto& r : res.records)
            if (same_time(r.t, res.W_time))
                wt.row({format_number(r.v), format_number(r.t), format_number(r.W.real()), format_number(r.W.imag()),
                        format_number(std::abs(r.W)), r.in_window ? "1" : "0"});
        wt.close();
    }

    const ScatterMetrics& m = res.metrics;
    ordered_json summary;
    summary["command"] = "scatter";
    summary["config_hash"] = hash;
    summary["linf_slope"] = opt(m.linf_slope);
    summary["ode_residual_slope"] = opt(m.ode_residual_slope);
    summary["W_stability_slope"] = opt(m.W_stability_slope);
    summary["phase_drift_relerr"] = opt(m.phase_drift_relerr);
    summary["profile_remainder_slope"] = opt(m.profile_remainder_slope);
    summary["modulus_drift_per_decade"] = opt(m.modulus_drift_per_decade);
    ordered_json degenerate;
    degenerate["linf_slope"] = !m.linf_slope;
    degenerate["ode_residual_slope"] = !m.ode_residual_slope;
    degenerate["W_stability_slope"] = !m.W_stability_slope;
    degenerate["phase_drift_relerr"] = !m.phase_drift_relerr;
    degenerate["profile_remainder_slope"] = !m.profile_remainder_slope;
    summary["degenerate"] = degenerate;
    ordered_json per_v = ordered_json::array();
    for (const auto& f : m.velocities)
        per_v.push_back({{"v", f.v},
                         {"ode_slope", opt(f.ode_slope)},
                         {"phase_slope", opt(f.phase_slope)},
                         {"phase_prediction", opt(f.phase_prediction)},
                         {"phase_relerr", opt(f.phase_relerr)},
                         {"modulus_drift_per_decade", opt(f.modulus_drift)}});
    summary["velocities"] = per_v;
    summary["W_time"] = res.W_time;
    if (cfg.wants("json")) write_text((dir / "scatter_summary.json").string(), summary.dump(2) + "\n");
    out << summary.dump() << "\n";
    return kExitOk;
}

int cmd_appendix(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err) {
    const AppendixConfig& a = cfg.appendix;
    if (!(a.rho > 0.0 && a.rho < 0.5)) {
        err << "appendix: rho = " << a.rho << " outside (0, 1/2)\n";
        return kExitUsage;
    }
    ScanResult scan;
    try {
        scan = failure_scan(a.rho, a.N_min, a.N_max, a.quad_points, opts.jobs);
    } catch (const InvalidArgument& e) {
        err << "appendix: " << e.what() << "\n";
        return kExitUsage;
    }
    const fs::path dir = resolve_out(cfg, opts);
    fs::create_directories(dir);
    const std::string hash = config_hash(cfg);
    if (cfg.wants("csv")) {
        CsvWriter csv((dir / "appendix_scan.csv").string(), hash,
                      {"N", "rho", "t", "lhs", "rhs_orig", "rhs_corr", "ratio_orig", "ratio_corr"});
        for (const auto& r : scan.rows)
            csv.row({format_number(r.N), format_number(r.rho), format_number(r.t), format_number(r.lhs),
                     format_number(r.rhs_orig), format_number(r.rhs_corr), format_number(r.ratio_orig),
                     format_number(r.ratio_corr)});
        csv.close();
    }
    ordered_json verdict;
    verdict["command"] = "appendix";
    verdict["config_hash"] = hash;
    verdict["rho"] = a.rho;
    verdict["original_exponent"] = scan.original_exponent;
    verdict["corrected_exponent"] = scan.corrected_exponent;
    verdict["predicted_exponent"] = scan.predicted_exponent;
    verdict["original_unbounded"] = scan.original_unbounded;
    verdict["near_degenerate"] = scan.near_degenerate;
    verdict["crossing_N"] = opt(scan.crossing_N);
    if (cfg.wants("json")) write_text((dir / "appendix_verdict.json").string(), verdict.dump(2) + "\n");
    out << verdict.dump() << "\n";
    return kExitOk;
}

} // namespace spulse
