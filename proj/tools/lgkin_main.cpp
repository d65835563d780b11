// Command-line entry point: one subcommand per toolkit capability.
//   kernels     dump kernel tables (CSV debug dump + binary fields)
//   evolve      march the transport equation, write norm series + report
//   modes       evolve Fourier modes for a list of wave vectors
//   phi         memory-kernel decay scan and contraction-constant scan
//   phi-k       oscillatory memory kernel for one wave vector
//   mc          Monte Carlo renewal flight histograms
//   r2-pairing  Schwartz-pairing bound for the R^2 weak decay
//   check       acceptance suite (smoke or full), manifest + exit code
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "CLI11.hpp"
#include "lgkin/acceptance.hpp"
#include "lgkin/iterated.hpp"
#include "lgkin/modes.hpp"
#include "lgkin/montecarlo.hpp"
#include "lgkin/quadrature.hpp"
#include "lgkin/varphi.hpp"

using namespace lgkin;

namespace {

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    return cfg.out_dir + "/" + name;
}

InitialData select_datum(const ExperimentConfig& cfg) {
    if (cfg.init == "equilibrium") return equilibrium_datum();
    if (cfg.init == "cosine") return cosine_datum();
    return file_datum(cfg.init_file);
}

ComplexInitialData to_complex(const InitialData& d) {
    ComplexInitialData c;
    c.name = d.name;
    auto eval = d.eval;
    c.eval = [eval](double th, double s, double h) {
        return std::complex<double>(eval(th, s, h), 0.0);
    };
    c.total_mass = d.total_mass;
    c.mass_upto = d.mass_upto;
    c.tail_beyond = d.tail_beyond;
    return c;
}

std::vector<double> sample_times(double T) {
    std::vector<double> ts;
    for (double t = 1.0; t < T * 0.999; t *= 1.26) ts.push_back(t);
    ts.push_back(T);
    return ts;
}

void append_csv(std::string& csv, std::initializer_list<double> row) {
    char buf[64];
    bool first = true;
    for (double v : row) {
        std::snprintf(buf, sizeof buf, first ? "%.17g" : ",%.17g", v);
        csv += buf;
        first = false;
    }
    csv += "\n";
}

int cmd_kernels(const ExperimentConfig& cfg, int order) {
    // CSV debug dump of the closed-form kernels
    std::string csv = "s,h,hp,Q,Pi,E\n";
    const GaussRule& g = gauss_rule(12);
    for (int is = 0; is <= 40; ++is) {
        double s = 4.0 * is / 40.0;
        for (int a = 0; a < 12; ++a)
            for (int b = 0; b < 12; ++b)
                append_csv(csv, {s, g.x[a], g.x[b], collision_kernel(s, g.x[a], g.x[b]),
                                 impact_transition(g.x[a], g.x[b]), equilibrium(s, g.x[a])});
    }
    atomic_write_text(out_path(cfg, "kernels.csv"), csv);
    if (order >= 2) {
        KernelTable q1 = base_kernel_table(cfg.n_h * 2, cfg.dt, std::min(cfg.T, 24.0));
        RenewalWeights W = build_renewal_weights(q1.h, q1.dt, q1.nt, HInterp::Lagrange);
        KernelTable q = pair_kernel_table(q1);
        for (int n = 3; n <= order; ++n) q = convolve_next(q, W);
        std::string tcsv = "t,h,hp,Qn\n";
        for (std::size_t n = 0; n <= q.nt; n += 8)
            for (std::size_t a = 0; a < q.h.size(); a += 3)
                for (std::size_t b = 0; b < q.h.size(); b += 3)
                    append_csv(tcsv, {n * q.dt, q.h.nodes[a], q.h.nodes[b], q.at(n, a, b)});
        atomic_write_text(out_path(cfg, "kernels_order" + std::to_string(order) + ".csv"), tcsv);
        // binary dump in the field format, axes (t, h, h')
        PhaseGrid tg;
        tg.theta.nodes.resize(q.nt + 1);
        tg.theta.weights.assign(q.nt + 1, q.dt);
        for (std::size_t n = 0; n <= q.nt; ++n) tg.theta.nodes[n] = n * q.dt;
        tg.s = q.h;
        tg.h = q.h;
        RealField tf(tg);
        tf.values = q.vals;
        write_field_bin(out_path(cfg, "kernels_order" + std::to_string(order) + ".bin"), tf);
    }
    std::printf("kernel dump written to %s\n", cfg.out_dir.c_str());
    return 0;
}

int cmd_evolve(const ExperimentConfig& cfg) {
    SolverSetup S = SolverSetup::make(cfg.n_theta, cfg.n_s, cfg.s_max, cfg.n_h, cfg.T, cfg.dt);
    InitialData mu0 = select_datum(cfg);
    CollisionTrace tr = solve_trace(S, mu0);
    std::vector<double> ts = sample_times(cfg.T);
    std::string csv = "t,l1,l2,linf,tail_norm,tail_mass,mass\n";
    std::vector<double> l1s;
    for (double t : ts) {
        RealField f = reconstruct(S, mu0, tr, t, 2);
        double tail = reconstruct_tail_norm(S, mu0, tr, t, mu0.total_mass);
        double l1 = equilibrium_distance(S, f, mu0.total_mass, 1) + tail;
        l1s.push_back(l1);
        append_csv(csv, {t, l1, equilibrium_distance(S, f, mu0.total_mass, 2),
                         equilibrium_distance(S, f, mu0.total_mass, 0), tail,
                         reconstruct_tail_mass(S, mu0, tr, t), reconstruct_mass(S, mu0, tr, t)});
    }
    atomic_write_text(out_path(cfg, "series.csv"), csv);
    RunManifest man;
    man.command = "evolve";
    man.config_echo = cfg.echo();
    if (ts.size() >= 4 && ts.back() > 4.0) {
        DecayReport rep;
        fit_decay(rep, ts, l1s, std::min(5.0, ts.back() / 4.0), ts.back());
        man.constants["fitted_L1_exponent"] = rep.fitted_exponent;
        man.constants["fitted_L1_constant"] = rep.fitted_constant;
        man.constants["fit_residual"] = rep.fit_residual;
    }
    man.constants["final_mass"] = reconstruct_mass(S, mu0, tr, cfg.T);
    write_manifest(out_path(cfg, "report.json"), man);
    std::printf("evolve series written to %s\n", cfg.out_dir.c_str());
    return 0;
}

int cmd_modes(const ExperimentConfig& cfg) {
    RunManifest man;
    man.command = "modes";
    man.config_echo = cfg.echo();
    ComplexInitialData mu0 = to_complex(select_datum(cfg));
    for (const Vec2& k : cfg.k_list) {
        double dt = std::min(cfg.dt, mode_dt_limit(k));
        std::size_t steps = static_cast<std::size_t>(std::ceil(cfg.T / dt));
        dt = cfg.T / steps;
        SolverSetup S =
            SolverSetup::make(cfg.mode_n_theta, cfg.n_s, cfg.s_max, cfg.n_h, cfg.T, dt);
        ModeState st = solve_mode_trace(S, k, mu0);
        std::vector<double> ts = sample_times(cfg.T);
        std::string csv = "t,l1,l2,linf\n";
        DecayReport rep =
            mode_norm_series(S, k, mu0, st, ts, 1, std::min(5.0, cfg.T / 4.0), cfg.T);
        for (std::size_t i = 0; i < ts.size(); ++i)
            append_csv(csv, {ts[i], rep.l1[i], rep.l2[i], rep.linf[i]});
        char name[64];
        std::snprintf(name, sizeof name, "mode_%g_%g.csv", k.x, k.y);
        atomic_write_text(out_path(cfg, name), csv);
        std::snprintf(name, sizeof name, "mode_%g_%g_exponent", k.x, k.y);
        man.constants[name] = rep.fitted_exponent;
    }
    write_manifest(out_path(cfg, "modes_summary.json"), man);
    std::printf("mode series written to %s\n", cfg.out_dir.c_str());
    return 0;
}

int cmd_phi(const ExperimentConfig& cfg, std::size_t hp_probes) {
    SolverSetup S = SolverSetup::make(cfg.n_theta, cfg.n_s, cfg.s_max, cfg.n_h, cfg.T, cfg.dt);
    const GaussRule& g = gauss_rule(static_cast<int>(hp_probes));
    std::string dec = "t,sup_phi,weighted_sup_phi\n";
    double supw = 0.0;
    for (std::size_t p = 0; p < hp_probes; ++p) {
        VarphiSlice sl = solve_varphi(S, g.x[p]);
        supw = std::max(supw, sup_weighted_decay(sl, cfg.T));
        if (p == 0) {
            for (std::size_t n = 0; n < sl.data.trace.size(); n += 8) {
                double sup = 0.0;
                for (double v : sl.data.trace[n]) sup = std::max(sup, std::abs(v));
                append_csv(dec, {n * cfg.dt, sup, (n * cfg.dt + 1.0) * sup});
            }
        }
    }
    atomic_write_text(out_path(cfg, "phi_decay.csv"), dec);
    // contraction scan
    KernelTable q1 = base_kernel_table(32, 0.025, 24.0);
    RenewalWeights W = build_renewal_weights(q1.h, q1.dt, q1.nt, HInterp::Lagrange);
    EnTable e1 = base_equilibrium_table(q1);
    EnTable e2 = next_equilibrium_table(e1, q1, &W);
    std::vector<double> cs;
    for (int i = 0; i <= 25; ++i) cs.push_back(0.02 * i);
    ContractionScan scan = scan_contraction(cs, e2, 12);
    std::string sc = "c,d\n";
    for (std::size_t i = 0; i < cs.size(); ++i) append_csv(sc, {cs[i], scan.d_values[i]});
    atomic_write_text(out_path(cfg, "phi_scan.csv"), sc);
    // equivalence of the four-term trace representation against the direct march
    double equiv = 0.0;
    {
        SolverSetup Se = SolverSetup::make(cfg.n_theta, cfg.n_s, cfg.s_max, cfg.n_h,
                                           std::min(cfg.T, 5.0), cfg.dt);
        std::vector<VarphiSlice> slices;
        for (double hp : Se.grid.h.nodes) slices.push_back(solve_varphi(Se, hp));
        InitialData mu0 = select_datum(cfg);
        CollisionTrace tr = solve_trace(Se, mu0);
        double t = std::min(cfg.T, 5.0);
        auto rep = varphi_trace_representation(Se, slices, mu0, t);
        std::size_t n = static_cast<std::size_t>(std::llround(t / Se.dt));
        for (std::size_t q = 0; q < rep.size(); ++q)
            equiv = std::max(equiv, std::abs(rep[q] - tr.data.trace[n][q]));
    }
    RunManifest man;
    man.command = "phi";
    man.config_echo = cfg.echo();
    man.constants["sup_weighted_phi"] = supw;
    man.constants["d0"] = scan.d0;
    man.constants["best_c"] = scan.best_c;
    man.constants["best_d"] = scan.best_d;
    man.constants["representation_Linf_diff"] = equiv;
    man.checks.push_back({"phi_representation_equivalence", equiv, 1e-3, "<", equiv < 1e-3, ""});
    write_manifest(out_path(cfg, "phi_equivalence.json"), man);
    write_manifest(out_path(cfg, "phi_report.json"), man);
    std::printf("phi outputs written to %s\n", cfg.out_dir.c_str());
    return 0;
}

int cmd_phi_k(const ExperimentConfig& cfg) {
    Vec2 k = cfg.k_list.front();
    double dt = std::min(cfg.dt, mode_dt_limit(k));
    std::size_t steps = static_cast<std::size_t>(std::ceil(cfg.T / dt));
    dt = cfg.T / steps;
    SolverSetup S = SolverSetup::make(cfg.n_theta, cfg.n_s, cfg.s_max, cfg.n_h, cfg.T, dt);
    std::string csv = "theta_p,hp,sup_weighted_phik\n";
    double worst = 0.0;
    for (double thp : {0.0, kPi / 2.0}) {
        for (double hp : {-0.7, 0.0, 0.5}) {
            VarphiKSlice sl = solve_varphi_k(S, k, thp, hp);
            double v = sup_weighted_decay(sl, cfg.T);
            worst = std::max(worst, v);
            append_csv(csv, {thp, hp, v});
        }
    }
    atomic_write_text(out_path(cfg, "phik_decay.csv"), csv);
    RunManifest man;
    man.command = "phi-k";
    man.config_echo = cfg.echo();
    man.constants["sup_weighted_phik"] = worst;
    write_manifest(out_path(cfg, "phik_report.json"), man);
    std::printf("phi-k outputs written to %s (sup (t+1)|phi^k| = %.6g)\n", cfg.out_dir.c_str(),
                worst);
    return 0;
}

int cmd_mc(const ExperimentConfig& cfg) {
    PhaseGrid grid = build_phase_grid(cfg.n_theta, cfg.n_s, cfg.s_max, cfg.n_h);
    std::vector<double> amp = cfg.init == "cosine" ? std::vector<double>{1.0}
                                                   : std::vector<double>{};
    Ensemble ens = make_ensemble(cfg.mc_particles, cfg.seed, amp, grid.h);
    double prev = 0.0;
    for (double t : cfg.snapshot_times) {
        step_ensemble(ens, t);
        RealField f = empirical_field(ens, grid);
        char name[64];
        std::snprintf(name, sizeof name, "mc_hist_t%g.csv", t);
        write_field_csv(out_path(cfg, name), f);
        prev = t;
    }
    (void)prev;
    RunManifest man;
    man.command = "mc";
    man.config_echo = cfg.echo();
    man.constants["rejection_caps_hit"] = static_cast<double>(ens.rejection_caps_hit);
    write_manifest(out_path(cfg, "mc_report.json"), man);
    std::printf("mc histograms written to %s\n", cfg.out_dir.c_str());
    return 0;
}

int cmd_r2(const ExperimentConfig& cfg) {
    std::map<std::string, double> cst;
    // reuse the acceptance pipeline, which implements the pairing experiment
    auto res = run_acceptance_group("r2", &cst);
    RunManifest man;
    man.command = "r2-pairing";
    man.config_echo = cfg.echo();
    man.checks = res;
    man.constants = cst;
    write_manifest(out_path(cfg, "r2_report.json"), man);
    std::printf("r2 pairing: value(2) = %.6g, value(20) = %.6g\n", cst["r2_pairing_t2"],
                cst["r2_pairing_t20"]);
    return man.all_pass() ? 0 : 1;
}

int cmd_check(const ExperimentConfig& cfg, const std::string& level,
              std::vector<std::string> groups) {
    if (groups.empty()) {
        if (level == "smoke")
            groups = {"kernels", "equilibrium", "iterated", "fmarginal", "evolution",
                      "contraction"};
        else
            groups = acceptance_groups();
    }
    RunManifest man;
    man.command = "check --level " + level;
    man.config_echo = cfg.echo();
    auto t0 = std::chrono::steady_clock::now();
    bool ok = run_acceptance(groups, man);
    man.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(out_path(cfg, "manifest.json"), man);
    std::printf("%zu checks, %s; manifest at %s\n", man.checks.size(),
                ok ? "all passed" : "FAILURES", out_path(cfg, "manifest.json").c_str());
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kinetic transport toolkit for the two-dimensional periodic Lorentz gas"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    if (const char* env = std::getenv("LGKIN_OUT_DIR")) cfg.out_dir = env;
    std::string config_path, grid_spec, k_spec, level = "full";
    int order = 2;
    std::size_t hp_probes = 4;
    std::vector<std::string> groups;

    app.fallthrough();

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value configuration file");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--T", cfg.T, "time horizon");
        sub->add_option("--dt", cfg.dt, "time step");
        sub->add_option("--grid", grid_spec, "n_theta,n_s,n_h");
        sub->add_option("--smax", cfg.s_max, "s-axis truncation");
        sub->add_option("--init", cfg.init, "equilibrium|cosine|custom-file");
        sub->add_option("--init-file", cfg.init_file, "harmonics CSV for custom-file");
        sub->add_option("--seed", cfg.seed, "random seed");
    };

    CLI::App* ck = app.add_subcommand("kernels", "dump kernel tables");
    ck->add_option("--order", order, "highest iterated order to dump");
    add_common(ck);
    CLI::App* ce = app.add_subcommand("evolve", "march the transport equation");
    ce->add_option("--norms", cfg.norms, "norms to report");
    add_common(ce);
    CLI::App* cm = app.add_subcommand("modes", "evolve Fourier modes");
    cm->add_option("--k-list", k_spec, "wave vectors, e.g. \"1,0;0,1;3,4\"");
    cm->add_option("--mode-n-theta", cfg.mode_n_theta, "theta resolution for modes");
    add_common(cm);
    CLI::App* cp = app.add_subcommand("phi", "memory kernel decay and contraction scan");
    cp->add_option("--hp-probes", hp_probes, "number of conditioning probes");
    add_common(cp);
    CLI::App* cpk = app.add_subcommand("phi-k", "oscillatory memory kernel");
    cpk->add_option("--k", k_spec, "wave vector kx,ky");
    add_common(cpk);
    CLI::App* cmc = app.add_subcommand("mc", "Monte Carlo renewal flight");
    cmc->add_option("--n-particles", cfg.mc_particles, "ensemble size");
    cmc->add_option("--snapshot-times", cfg.snapshot_times, "histogram snapshot times");
    add_common(cmc);
    CLI::App* cr = app.add_subcommand("r2-pairing", "Schwartz pairing bound");
    cr->add_option("--sigma", cfg.sigma, "Gaussian test-function width");
    add_common(cr);
    CLI::App* cc = app.add_subcommand("check", "acceptance suite");
    cc->add_option("--level", level, "smoke|full");
    cc->add_option("--group", groups, "explicit criterion groups");
    add_common(cc);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            std::string keep_out = cfg.out_dir;
            bool out_given = keep_out != ".";
            cfg = ExperimentConfig::from_file(config_path);
            if (out_given) cfg.out_dir = keep_out;
        }
        if (!grid_spec.empty()) {
            std::size_t c1 = grid_spec.find(','), c2 = grid_spec.rfind(',');
            if (c1 == std::string::npos || c2 == c1)
                throw std::runtime_error("--grid expects n_theta,n_s,n_h");
            cfg.n_theta = std::stoul(grid_spec.substr(0, c1));
            cfg.n_s = std::stoul(grid_spec.substr(c1 + 1, c2 - c1 - 1));
            cfg.n_h = std::stoul(grid_spec.substr(c2 + 1));
        }
        if (!k_spec.empty()) cfg.k_list = parse_k_list(k_spec);

        if (ck->parsed()) return cmd_kernels(cfg, order);
        if (ce->parsed()) return cmd_evolve(cfg);
        if (cm->parsed()) return cmd_modes(cfg);
        if (cp->parsed()) return cmd_phi(cfg, hp_probes);
        if (cpk->parsed()) return cmd_phi_k(cfg);
        if (cmc->parsed()) return cmd_mc(cfg);
        if (cr->parsed()) return cmd_r2(cfg);
        if (cc->parsed()) return cmd_check(cfg, level, groups);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
