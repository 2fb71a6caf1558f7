#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>

#include "gkpmod/analytics.hpp"
#include "gkpmod/circuit.hpp"
#include "gkpmod/drive.hpp"
#include "gkpmod/modular_measure.hpp"
#include "gkpmod/noise.hpp"
#include "gkpmod/release.hpp"
#include "gkpmod/stats.hpp"

namespace gkpmod::cli {

void RunContext::write_file(const std::string& name, const std::string& contents) {
    std::filesystem::create_directories(out_dir);
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out_dir / name).string());
    f << contents;
    outputs.push_back(name);
}

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

struct Csv {
    std::string text;
    explicit Csv(const std::string& header) : text(header + "\n") {}
    template <typename... T>
    void row(const T&... cells) {
        std::string line;
        ((line += (line.empty() ? "" : ",") + cell(cells)), ...);
        text += line + "\n";
    }
    static std::string cell(double x) { return num(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(bool x) { return x ? "1" : "0"; }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
};

PhaseGrid grid_from(const Json& cfg, const std::string& path) {
    return PhaseGrid::uniform(get_double(cfg, path + ".qmin"), get_double(cfg, path + ".qmax"), get_int(cfg, path + ".nq"),
                              get_double(cfg, path + ".pmin"), get_double(cfg, path + ".pmax"), get_int(cfg, path + ".np"));
}

std::string field_csv(const RMat& field, const PhaseGrid& grid) {
    Csv c("q,p,value");
    for (size_t i = 0; i < grid.q.size(); ++i)
        for (size_t j = 0; j < grid.p.size(); ++j) c.row(grid.q[i], grid.p[j], field(i, j));
    return c.text;
}

AncillaPrep prep_for(const Json& cfg, double nbar) {
    return make_prep(std::sqrt(nbar), get_bool(cfg, "counter_displacement"), get_int(cfg, "ancilla_cutoff"));
}

std::string tag_of(double x) {
    std::string s = num(x);
    for (char& ch : s)
        if (ch == '.') ch = 'p';
    return s;
}

void report_row(Csv& c, const std::string& input, const std::string& stage, cplx beta, const SqueezingReport& r) {
    c.row(input, stage, beta.real(), beta.imag(), r.delta_q, r.delta_p, r.mean_photons, r.degenerate_q, r.degenerate_p);
}

void cmd_fig_wigner(RunContext& ctx) {
    const Json& cfg = ctx.config;
    FockSpace space(get_int(cfg, "target_dim"));
    AncillaPrep prep = prep_for(cfg, get_double(cfg, "fig_wigner.nbar"));
    auto qb = QuadratureBasis::get(space.dim);
    PhaseGrid grid = grid_from(cfg, "fig_wigner.grid");
    const double extent = std::abs(prep.alpha) + get_double(cfg, "fig_wigner.beta_extent");
    const int nb = get_int(cfg, "fig_wigner.beta_points");
    if (nb < 2) throw ConfigError("fig_wigner.beta_points must be at least 2");

    std::vector<std::pair<std::string, StateVector>> inputs{
        {"vacuum", make_vacuum(space)},
        {"squeezed", make_squeezed_vacuum(get_double(cfg, "fig_wigner.squeezed_delta"), space)}};
    Csv reports("input,stage,re_beta,im_beta,delta_q,delta_p,mean_photons,degenerate_q,degenerate_p");
    for (const auto& [name, psi] : inputs) {
        RVec pop = q_populations(psi);
        cplx beta = max_likelihood_beta(pop, prep, *qb, get_double(cfg, "fig_wigner.ml_spacing"));
        auto [post, prob] = post_measurement_state(psi, prep, beta);
        report_row(reports, name, "input", cplx{}, effective_squeezing(psi));
        report_row(reports, name, "post", beta, effective_squeezing(post));
        ctx.write_file("wigner_" + name + "_input.csv", field_csv(phase_space(psi, grid, PhaseSpaceKind::wigner), grid));
        ctx.write_file("wigner_" + name + "_post.csv", field_csv(phase_space(post, grid, PhaseSpaceKind::wigner), grid));
        Csv dens("re_beta,im_beta,density");
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) {
                cplx b(-extent + 2 * extent * i / (nb - 1), -extent + 2 * extent * j / (nb - 1));
                dens.row(b.real(), b.imag(), density_from_populations(pop, prep, *qb, b));
            }
        ctx.write_file("outcome_density_" + name + ".csv", dens.text);
        Csv marker("re_beta,im_beta,density");
        marker.row(beta.real(), beta.imag(), prob);
        ctx.write_file("ml_marker_" + name + ".csv", marker.text);
    }
    ctx.write_file("reports.csv", reports.text);
}

std::string shots_csv(const std::vector<ShotResult>& shots) {
    Csv c("shot,re_beta,im_beta,phi,K,delta_q,delta_p,mean_photons");
    for (size_t s = 0; s < shots.size(); ++s) {
        const auto& rec = shots[s].records.back();
        const auto& r = shots[s].report;
        c.row(int(s), rec.beta.real(), rec.beta.imag(), rec.phi, rec.concentration, r.delta_q, r.delta_p, r.mean_photons);
    }
    return c.text;
}

std::vector<ShotResult> vacuum_shots(const RunContext& ctx, double nbar, int shots, int dim, const std::string& tag) {
    ProtocolConfig pc;
    pc.ancilla = prep_for(ctx.config, nbar);
    pc.target_dim = dim;
    pc.shots = shots;
    pc.seed = ctx.seed;
    pc.threads = ctx.threads;
    pc.stream_tag = tag;
    return run_protocol(pc);
}

void cmd_fig_scaling(RunContext& ctx) {
    const Json& cfg = ctx.config;
    const int shots = get_int(cfg, "fig_scaling.shots");
    if (shots < 2) throw ConfigError("fig_scaling.shots must be at least 2");
    Csv c("nbar,mc_mean,mc_std,mc_se,villain,estimate,lower_bound");
    for (double nbar : get_doubles(cfg, "fig_scaling.nbar")) {
        if (!(nbar > 0.0)) throw ConfigError("fig_scaling.nbar entries must be positive");
        auto res = vacuum_shots(ctx, nbar, shots, get_int(cfg, "target_dim"), "fig-scaling/" + num(nbar));
        std::vector<double> dq;
        for (const auto& r : res) dq.push_back(r.report.delta_q);
        ctx.write_file("shots_nbar" + tag_of(nbar) + ".csv", shots_csv(res));
        double alpha = std::sqrt(nbar);
        auto est = expected_squeezing(alpha);
        c.row(nbar, mean(dq), sample_stddev(dq), standard_error(dq), delta_from_sharpness(villain_mean_sharpness(alpha)),
              est.estimate, est.lower_bound);
    }
    ctx.write_file("scaling.csv", c.text);
}

void noise_sweep(RunContext& ctx) {
    const Json& cfg = ctx.config;
    const int shots = get_int(cfg, "fig_cubic.noise_shots");
    const double nbar = get_double(cfg, "fig_cubic.noise_nbar");
    FockSpace space(get_int(cfg, "target_dim"));
    auto qb = QuadratureBasis::get(space.dim);
    AncillaPrep prep = prep_for(cfg, nbar);
    CVec vac_q = qb->to_q(make_vacuum(space).amp);
    CMat rho_q = vac_q * vac_q.adjoint();
    RVec pop = vac_q.cwiseAbs2();
    std::vector<SweepRow> rows;
    auto summarize = [&](const std::string& param, double value, const std::vector<SqueezingReport>& reps) {
        double sq = 0.0, sp = 0.0;
        for (const auto& r : reps) {
            sq += std::abs(r.s_q_expectation);
            sp += std::abs(r.s_p_expectation);
        }
        rows.push_back({param, value, delta_from_sharpness(sq / reps.size()), delta_from_sharpness(sp / reps.size())});
    };
    for (double w : get_doubles(cfg, "fig_cubic.loss_strengths")) {
        LossParams loss;
        loss.gamma = w / nbar;
        std::vector<SqueezingReport> reps(shots);
        parallel_for(shots, ctx.threads, [&](int s) {
            Rng rng = Rng::substream(ctx.seed, "fig-cubic/loss/" + num(w), s);
            MeasurementRecord rec = sample_lossy_outcome(pop, *qb, prep, loss, rng);
            reps[s] = squeezing_q(lossy_post_q(rho_q, *qb, prep, rec.beta, loss).rho_q, *qb);
        });
        summarize("loss_alpha_sq_gamma", w, reps);
    }
    for (double eta : get_doubles(cfg, "fig_cubic.readout_etas")) {
        AncillaPrep lossy = readout_loss(prep, eta);
        std::vector<SqueezingReport> reps(shots);
        parallel_for(shots, ctx.threads, [&](int s) {
            Rng rng = Rng::substream(ctx.seed, "fig-cubic/readout/" + num(eta), s);
            MeasurementRecord rec = sample_from_populations(pop, lossy, *qb, rng);
            CMat post = apply_diagonal_q(rho_q, kraus_diagonal(rec.beta, lossy, *qb));
            apply_env_dephasing_q(post, lossy.env_amplitude, lossy.coupling_scale, *qb);
            reps[s] = squeezing_q(post, *qb);
        });
        summarize("readout_eta", eta, reps);
    }
    ctx.write_file("noise_sweep.csv", sweep_csv(rows));
}

void cmd_fig_cubic(RunContext& ctx) {
    const Json& cfg = ctx.config;
    FockSpace space(get_int(cfg, "target_dim"));
    AncillaPrep prep = prep_for(cfg, get_double(cfg, "fig_cubic.nbar"));
    StateVector psi = make_squeezed_vacuum(get_double(cfg, "fig_cubic.squeezed_delta"), space);
    PhaseGrid grid = grid_from(cfg, "fig_cubic.grid");
    Csv table("mode,re_beta,im_beta,delta_q,delta_p,mean_photons,edge_weight");
    for (bool corrected : {false, true}) {
        CubicParams cp;
        cp.strength_ratio = get_double(cfg, "fig_cubic.strength_ratio");
        cp.corrected_drive = corrected;
        auto us = cubic_unitary(prep, cp, space, prep.fock_cutoff);
        CubicMeasurement m(psi, prep, us);
        cplx beta = m.max_likelihood(get_double(cfg, "fig_cubic.ml_spacing"));
        StateVector post = m.post(beta);
        auto r = effective_squeezing(post);
        std::string mode = corrected ? "corrected" : "uncorrected";
        table.row(mode, beta.real(), beta.imag(), r.delta_q, r.delta_p, r.mean_photons, m.edge_weight(beta));
        ctx.write_file("wigner_cubic_" + mode + ".csv", field_csv(phase_space(post, grid, PhaseSpaceKind::wigner), grid));
    }
    ctx.write_file("cubic_table.csv", table.text);
    noise_sweep(ctx);
}

void cmd_drive(RunContext& ctx) {
    const Json& cfg = ctx.config;
    const double omega = 2.0 * kPi * get_double(cfg, "drive.omega_T_hz");
    const int nh = get_int(cfg, "drive.n_harmonics");
    const int samples = get_int(cfg, "drive.samples");
    const double rate = get_double(cfg, "drive.sample_rate");
    if (nh < 1) throw ConfigError("drive.n_harmonics must be positive");
    if (samples < 2) throw ConfigError("drive.samples must be at least 2");
    Csv synth("delta,n_harmonics,sample_rate,waveform_error,synthesis_error,coupling_error");
    for (double delta : get_doubles(cfg, "drive.deltas")) {
        DriveSpec spec;
        spec.delta = delta;
        spec.omega_T = omega;
        spec.branch = get_int(cfg, "drive.branch");
        std::vector<double> t(samples);
        for (int j = 0; j < samples; ++j) t[j] = 2.0 * drive_period(spec) * j / (samples - 1);
        Waveform w = exact_waveform(spec, t);
        Waveform h = harmonic_waveform(spec, nh, t);
        auto flux = flux_noise_prefactor(spec, get_double(cfg, "drive.epsilon"), t);
        Csv wave("t,x_ext,x_harmonic,flux_prefactor");
        for (int j = 0; j < samples; ++j) wave.row(t[j], w.values[j], h.values[j], flux.values[j]);
        ctx.write_file("waveform_delta" + tag_of(delta) + ".csv", wave.text);
        Csv coeffs("n,omega_n,b_n");
        for (const auto& c : fourier_coeffs(spec, nh)) coeffs.row(c.n, c.omega_n, c.b_n);
        ctx.write_file("coeffs_delta" + tag_of(delta) + ".csv", coeffs.text);
        for (int n = 1; n <= nh; ++n)
            synth.row(delta, n, rate, synthesis_error(spec, n, INFINITY), synthesis_error(spec, n, rate),
                      coupling_error(spec, n, rate));
    }
    ctx.write_file("synthesis.csv", synth.text);
}

void cmd_params(RunContext& ctx) {
    const Json& cfg = ctx.config;
    CircuitSpec spec = circuit_from_physical(get_double(cfg, "params.E_J_hz"), get_double(cfg, "params.L_A"),
                                             get_double(cfg, "params.f_A_hz"), get_double(cfg, "params.L_T"),
                                             get_double(cfg, "params.f_T_hz"), get_double(cfg, "params.C_J_ratio"),
                                             get_double(cfg, "params.delta"));
    TableReport rep = validate_table(spec);
    Csv c("quantity,value,unit,band_lo,band_hi,pass,informational");
    for (const auto& r : rep.rows) c.row(r.quantity, r.value, r.unit, r.band_lo, r.band_hi, r.pass, r.informational);
    ctx.write_file("table_report.csv", c.text);
    auto pm = potential_minimum(spec, kPi / 2);
    Csv m("x_ext,x_A,x_T,bound,within_bound,opposite_signs,iterations");
    m.row(kPi / 2, pm.x_A, pm.x_T, spec.E_J / spec.E_L_T, pm.within_bound, pm.opposite_signs, pm.iterations);
    ctx.write_file("potential_minimum.csv", m.text);
}

void cmd_release(RunContext& ctx) {
    const Json& cfg = ctx.config;
    const double nbar = get_double(cfg, "release.nbar");
    const int shots = get_int(cfg, "release.shots");
    if (shots < 2) throw ConfigError("release.shots must be at least 2");
    FockSpace space(get_int(cfg, "release.target_dim"));
    AncillaPrep prep = prep_for(cfg, nbar);
    ReleaseConfig rc;
    rc.kappa_open = 1.0;
    rc.t_meas = get_double(cfg, "release.kappa_t");
    rc.steps = get_int(cfg, "release.steps");
    StateVector vac = make_vacuum(space);

    std::vector<IntegratedOutcome> outs(shots);
    std::vector<SqueezingReport> reps(shots);
    parallel_for(shots, ctx.threads, [&](int s) {
        Rng rng = Rng::substream(ctx.seed, "release/indirect", s);
        auto [o, post] = release_shot(vac, prep, rc, rng);
        outs[s] = o;
        reps[s] = effective_squeezing(post);
    });
    Csv c("shot,I_out,Q_out,phi_out,K_eff,delta_q,delta_p");
    std::vector<double> k2, dq_rel;
    for (int s = 0; s < shots; ++s) {
        c.row(s, outs[s].I_out, outs[s].Q_out, outs[s].phi_out, outs[s].K_eff, reps[s].delta_q, reps[s].delta_p);
        k2.push_back(outs[s].K_eff * outs[s].K_eff);
        dq_rel.push_back(reps[s].delta_q);
    }
    ctx.write_file("release_shots.csv", c.text);
    auto direct = vacuum_shots(ctx, nbar, shots, space.dim, "release/direct");
    ctx.write_file("direct_shots.csv", shots_csv(direct));
    std::vector<double> dq_dir;
    for (const auto& r : direct) dq_dir.push_back(r.report.delta_q);
    auto ks = ks_two_sample(dq_rel, dq_dir);
    auto mom = release_moments(prep, rc);
    Csv sum("quantity,value");
    sum.row("completeness", release_completeness(prep.alpha, rc));
    sum.row("completeness_target", nbar * (1.0 - std::exp(-rc.kappa_open * rc.t_meas)));
    sum.row("mean_K_sq_mc", mean(k2));
    sum.row("mean_K_sq_se", standard_error(k2));
    sum.row("mean_K_sq_closed_form", mom.mean_K_sq);
    sum.row("bound_delta_q", mom.bound_delta_q);
    sum.row("mean_delta_q_release", mean(dq_rel));
    sum.row("mean_delta_q_direct", mean(dq_dir));
    sum.row("ks_statistic", ks.statistic);
    sum.row("ks_p_value", ks.p_value);
    ctx.write_file("release_summary.csv", sum.text);
}

void cmd_appd(RunContext& ctx) {
    const Json& cfg = ctx.config;
    const int shots = get_int(cfg, "appd.shots");
    const double thr = get_double(cfg, "appd.threshold");
    if (shots < 2) throw ConfigError("appd.shots must be at least 2");
    Csv per("nbar,shot,delta_p,rel_error,mean_photons");
    Csv sum("nbar,fraction_below_threshold,max_rel_error,median_rel_error,p5_photons,p25_photons,median_photons,p75_photons,p95_photons");
    for (double nbar : get_doubles(cfg, "appd.nbar")) {
        auto res = vacuum_shots(ctx, nbar, shots, get_int(cfg, "target_dim"), "appd/" + num(nbar));
        std::vector<double> err, ph;
        int below = 0;
        for (size_t s = 0; s < res.size(); ++s) {
            double e = std::abs(res[s].report.delta_p - 1.0);
            err.push_back(e);
            ph.push_back(res[s].report.mean_photons);
            below += e < thr;
            per.row(nbar, int(s), res[s].report.delta_p, e, res[s].report.mean_photons);
        }
        sum.row(nbar, double(below) / shots, *std::max_element(err.begin(), err.end()), quantile(err, 0.5),
                quantile(ph, 0.05), quantile(ph, 0.25), quantile(ph, 0.5), quantile(ph, 0.75), quantile(ph, 0.95));
    }
    ctx.write_file("appd_shots.csv", per.text);
    ctx.write_file("appd_summary.csv", sum.text);
}

const std::map<std::string, std::function<void(RunContext&)>>& registry() {
    static const std::map<std::string, std::function<void(RunContext&)>> r{
        {"fig-wigner", cmd_fig_wigner}, {"fig-scaling", cmd_fig_scaling}, {"fig-cubic", cmd_fig_cubic},
        {"drive", cmd_drive},           {"params", cmd_params},           {"release", cmd_release},
        {"appd", cmd_appd}};
    return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"fig-wigner", "fig-scaling", "fig-cubic", "drive",
                                                "params",     "release",     "appd"};
    return names;
}

void run_command(RunContext& ctx) {
    auto it = registry().find(ctx.command);
    if (it == registry().end()) throw ConfigError("unknown command '" + ctx.command + "'");
    if (ctx.threads < 1) throw ConfigError("thread count must be positive");
    ctx.config["seed"] = ctx.seed;
    ctx.config["threads"] = ctx.threads;
    auto start = std::chrono::steady_clock::now();
    it->second(ctx);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json manifest{{"schema_version", kManifestSchema},
                  {"command", ctx.command},
                  {"version", kVersion},
                  {"seed", ctx.seed},
                  {"config", ctx.config},
                  {"outputs", ctx.outputs},
                  {"wall_clock_seconds", secs}};
    ctx.write_file("manifest.json", manifest.dump(2) + "\n");
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e) ||
        dynamic_cast<const nlohmann::json::exception*>(&e))
        return 2;
    if (dynamic_cast<const GkpError*>(&e)) return 3;
    return 1;
}

}  // namespace gkpmod::cli
