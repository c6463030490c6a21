#include "sdc/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "sdc/linalg.hpp"
#include "sdc/simulation.hpp"

namespace sdc::cli {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string num(const Complex& z) {
    if (z.imag() == 0.0) return num(z.real());
    return num(z.real()) + (z.imag() < 0.0 ? "-" : "+") + num(std::abs(z.imag())) + "i";
}

std::string row_list(const CMatrix& m, Eigen::Index r) {
    std::string s;
    for (Eigen::Index c = 0; c < m.cols(); ++c) s += (c ? ", " : "") + num(m(r, c));
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::ConfigError, "cannot write '" + path.string() + "'");
    f << text;
}

int report(const Error& e, Streams io) {
    const int code = exit_code_for(e.kind());
    io.err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    spdlog::debug("exit {} after {}", code, to_string(e.kind()));
    return code;
}

// Truncation and Kalman checks shared by every stage; returns exit code.
int check_assumptions(const RunConfig& cfg, const SpectralSystem& sys, Streams io, bool verbose) {
    TruncationSpec spec;
    try {
        spec = check_truncation(sys, cfg.n0);
    } catch (const Error& e) {
        return report(e, io);
    }
    const bool kalman = check_kalman(sys, cfg.n0);
    if (verbose) {
        io.out << "eigenvalues =";
        for (Eigen::Index i = 0; i < sys.modes(); ++i) io.out << (i ? ", " : " ") << num(sys.eigenvalues(i));
        io.out << "\nN0 = " << spec.n0 << "\nalpha = " << num(spec.alpha)
               << "\nkalman = " << (kalman ? "true" : "false") << "\n";
    }
    if (!kalman) {
        io.err << "error (assumption-violated): Kalman condition fails for the retained modes\n";
        return kAssumptionFailure;
    }
    return kOk;
}

struct DesignStage {
    PredictorDesign design;
    bool hurwitz = false;
};

// Synthesis with the Hurwitz guard. Writes design.txt when `report_dir` is set.
std::optional<DesignStage> run_design_stage(const RunConfig& cfg, const SpectralSystem& sys, Streams io,
                                            const std::filesystem::path* report_dir, int& code) {
    DesignStage st;
    try {
        if (const TruncationSpec spec = check_truncation(sys, cfg.n0); spec.n0 < 1)
            throw Error(ErrorKind::AssumptionViolated, "no retained modes");
        st.design = synthesize_gain(sys, cfg.n0, cfg.control.delay, cfg.control.t0, cfg.control.poles,
                                    cfg.control.placement);
    } catch (const Error& e) {
        code = report(e, io);
        return std::nullopt;
    }
    st.hurwitz = linalg::is_hurwitz(st.design.a_cl);
    if (st.hurwitz) attach_lyapunov(st.design);
    if (report_dir)
        write_file(*report_dir / "design.txt", format_design_report(st.design, st.hurwitz, cfg.control.placement));
    if (!st.hurwitz) {
        io.err << "error (synthesis-failure): closed-loop matrix A_cl is not Hurwitz\n";
        code = kSynthesisFailure;
        return std::nullopt;
    }
    code = kOk;
    return st;
}

struct CertifyStage {
    CertificateBundle bundle;
    double margin = 0.0;
};

std::optional<CertifyStage> run_certify_stage(const RunConfig& cfg, const SpectralSystem& sys,
                                              const PredictorDesign& design, Streams io, int& code) {
    CertifyStage st;
    try {
        st.bundle = cfg.certificate.optimize
                        ? optimize_parameters(sys, design)
                        : compute_constants(sys, design, cfg.certificate.beta, cfg.certificate.gamma1,
                                            cfg.certificate.gamma2);
        st.margin = small_gain_margin(st.bundle, coupling_constants(cfg.coupling, sys.domain_length));
    } catch (const Error& e) {
        code = report(e, io);
        return std::nullopt;
    }
    code = kOk;
    return st;
}

Disturbance make_disturbance(const RunConfig& cfg, const RunOptions& opt) {
    if (opt.no_disturbance || cfg.disturbance == "none") return Disturbance::none();
    if (cfg.disturbance == "samples") return Disturbance::samples(cfg.disturbance_times, cfg.disturbance_values);
    return Disturbance::case_study();
}

std::string format_summary(const RunConfig& cfg, const RunOptions& opt, const Trajectory& traj,
                           const CertificateBundle& bundle) {
    std::ostringstream s;
    s << "mode = " << (opt.open_loop ? "open-loop" : "closed-loop") << "\n";
    s << "disturbance = " << (opt.no_disturbance ? "none" : cfg.disturbance) << "\n";
    s << "samples = " << traj.points.size() << "\n";
    if (traj.points.empty()) {
        s << "decay_rate = n/a\niss_envelope = n/a\nmax_norm_u = n/a\n";
        return s.str();
    }

    if (opt.open_loop) {
        // growth of the leading mode over the second half of the run
        std::vector<double> t, y;
        for (const auto& p : traj.points) {
            if (p.t < 0.5 * cfg.simulation.t_end) continue;
            t.push_back(p.t);
            y.push_back(std::abs(p.coeffs(0)));
        }
        try {
            s << "growth_rate_c1 = " << num(fit_exponential(t, y).slope) << "\n";
        } catch (const Error&) {
            s << "growth_rate_c1 = n/a\n";
        }
    }
    try {
        const DecayFit fit = decay_fit(traj, traj.settle_time);
        s << "decay_rate = " << num(fit.rate) << "\n";
    } catch (const Error&) {
        s << "decay_rate = n/a\n";
    }
    s << "kappa0 = " << num(bundle.kappa0) << "\n";
    try {
        const EnvelopeCheck env = iss_envelope_check(traj, bundle, max_disturbance_norm(traj));
        s << "iss_envelope = " << (env.ok ? "pass" : "fail") << "\n";
        s << "iss_worst_ratio = " << num(env.worst_ratio) << "\n";
    } catch (const Error&) {
        s << "iss_envelope = n/a\n";
    }
    double max_u = 0.0;
    for (const auto& p : traj.points) max_u = std::max(max_u, p.u.norm());
    s << "max_norm_u = " << num(max_u) << "\n";
    s << "max_norm_d = " << num(max_disturbance_norm(traj)) << "\n";
    s << "final_normX = " << num(traj.points.back().norm_x) << "\n";
    s << "final_x = " << num(traj.points.back().x) << "\n";
    return s.str();
}

}  // namespace

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::AssumptionViolated: return kAssumptionFailure;
        case ErrorKind::SynthesisFailure: return kSynthesisFailure;
        case ErrorKind::InvalidCertificateParameters:
        case ErrorKind::InfeasibleCertificate: return kCertificateFailure;
        case ErrorKind::SimulationDiverged: return kDiverged;
        default: return kConfigError;
    }
}

SpectralSystem build_plant(const RunConfig& cfg) {
    return build_heat_system(cfg.plant.a, cfg.plant.c, cfg.plant.length, cfg.plant.n_max);
}

std::string format_design_report(const PredictorDesign& design, bool hurwitz, Placement placement) {
    std::ostringstream s;
    s << "N0 = " << design.n0 << "\nD = " << num(design.delay) << "\n";
    s << "placement = " << (placement == Placement::Exact ? "exact" : "rank-one") << "\n";
    s << "poles =";
    for (std::size_t i = 0; i < design.desired_poles.size(); ++i) s << (i ? ", " : " ") << num(design.desired_poles[i]);
    s << "\n";
    for (Eigen::Index r = 0; r < design.k.rows(); ++r) s << "K" << r + 1 << " = " << row_list(design.k, r) << "\n";

    CVector spec = linalg::eigenvalues(design.a_cl);
    std::vector<Complex> sorted(spec.data(), spec.data() + spec.size());
    std::sort(sorted.begin(), sorted.end(), linalg::complex_less);
    s << "spectrum_Acl =";
    for (std::size_t i = 0; i < sorted.size(); ++i) s << (i ? ", " : " ") << num(sorted[i]);
    s << "\nhurwitz = " << (hurwitz ? "true" : "false") << "\n";
    if (design.has_lyapunov()) {
        for (Eigen::Index r = 0; r < design.p.rows(); ++r) s << "P" << r + 1 << " = " << row_list(design.p, r) << "\n";
        s << "lambda_min_P = " << num(design.lambda_min_p) << "\nlambda_max_P = " << num(design.lambda_max_p) << "\n";
        s << "lyapunov_residual = " << num(lyapunov_residual(design)) << "\n";
    }
    return s.str();
}

void configure_logging() {
    const char* env = std::getenv("SDC_LOG");
    const std::string level = env ? env : "error";
    if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else if (level == "info") spdlog::set_level(spdlog::level::info);
    else spdlog::set_level(spdlog::level::err);
}

int cmd_validate(const RunConfig& cfg, Streams io) {
    try {
        return cmd_validate(cfg, build_plant(cfg), io);
    } catch (const Error& e) {
        return report(e, io);
    }
}

int cmd_validate(const RunConfig& cfg, const SpectralSystem& sys, Streams io) {
    spdlog::info("validating {} modes, N0 = {}", sys.modes(), cfg.n0);
    return check_assumptions(cfg, sys, io, true);
}

int cmd_design(const RunConfig& cfg, const RunOptions& opt, Streams io) {
    try {
        return cmd_design(cfg, build_plant(cfg), opt, io);
    } catch (const Error& e) {
        return report(e, io);
    }
}

int cmd_design(const RunConfig& cfg, const SpectralSystem& sys, const RunOptions& opt, Streams io) {
    int code = kOk;
    const auto st = run_design_stage(cfg, sys, io, &opt.out_dir, code);
    if (st) {
        io.out << format_design_report(st->design, st->hurwitz, cfg.control.placement);
        spdlog::info("design report written to {}", (opt.out_dir / "design.txt").string());
    }
    return code;
}

int cmd_certify(const RunConfig& cfg, const RunOptions& opt, Streams io) {
    try {
        const SpectralSystem sys = build_plant(cfg);
        int code = kOk;
        const auto design = run_design_stage(cfg, sys, io, nullptr, code);
        if (!design) return code;
        const auto cert = run_certify_stage(cfg, sys, design->design, io, code);
        if (!cert) return code;

        const std::string doc = format_certificate(cert->bundle, cert->margin);
        write_file(opt.out_dir / "certificate.txt", doc);
        io.out << doc << "C7 = " << num(cert->bundle.C7) << "\nC8 = " << num(cert->bundle.C8) << "\n";
        if (!(cert->margin > 0.0)) {
            io.err << "warning: small-gain margin " << num(cert->margin)
                   << " <= 0; the interconnection is not certified (simulation is still permitted)\n";
            return kCertificateFailure;
        }
        return kOk;
    } catch (const Error& e) {
        return report(e, io);
    }
}

int cmd_simulate(const RunConfig& cfg, const RunOptions& opt, Streams io) {
    try {
        const SpectralSystem sys = build_plant(cfg);
        int code = kOk;
        const auto design = run_design_stage(cfg, sys, io, nullptr, code);
        if (!design) return code;
        const auto cert = run_certify_stage(cfg, sys, design->design, io, code);
        if (!cert) return code;
        if (!(cert->margin > 0.0))
            io.err << "warning: small-gain margin " << num(cert->margin) << " <= 0; simulating anyway\n";

        SimConfig sc;
        sc.dt = cfg.simulation.dt;
        sc.t_end = cfg.simulation.t_end;
        sc.n_modes = cfg.simulation.n_modes;
        sc.record_stride = cfg.simulation.record_stride;
        sc.disturbance = make_disturbance(cfg, opt);
        sc.open_loop = opt.open_loop;
        sc.validate(sys, design->design);

        const CouplingFields fields = CouplingFields::case_study(sys, cfg.coupling, sc.n_modes);
        const double length = sys.domain_length;
        const CVector c0 =
            cfg.simulation.initial_profile == "zero"
                ? CVector(CVector::Zero(sc.n_modes))
                : project_profile(sys, [length](double xi) { return case_study_initial_profile(xi, length); },
                                  sc.n_modes);

        spdlog::info("simulating {} s at dt = {}", sc.t_end, sc.dt);
        const Trajectory traj = simulate(sc, sys, design->design, cert->bundle, fields, cfg.simulation.x0, c0);

        std::ostringstream csv;
        write_trajectory_csv(csv, traj, sys.input_dim(), sc.n_modes);
        write_file(opt.out_dir / cfg.simulation.output, csv.str());
        const std::string summary = format_summary(cfg, opt, traj, cert->bundle);
        write_file(opt.out_dir / "summary.txt", summary);
        io.out << summary;
        return kOk;
    } catch (const Error& e) {
        return report(e, io);
    }
}

int cmd_case_study(const RunOptions& opt, Streams io) {
    const RunConfig cfg = case_study_config();
    io.out << "[validate]\n";
    if (int code = cmd_validate(cfg, io); code != kOk) return code;
    io.out << "[design]\n";
    if (int code = cmd_design(cfg, opt, io); code != kOk) return code;
    io.out << "[certify]\n";
    const int certify = cmd_certify(cfg, opt, io);
    // an uncertified interconnection still gets simulated; the exit code is kept
    if (certify != kOk && certify != kCertificateFailure) return certify;
    io.out << "[simulate]\n";
    const int simulate = cmd_simulate(cfg, opt, io);
    return simulate != kOk ? simulate : certify;
}

int run_with_config_file(const std::string& command, const std::string& path, const RunOptions& opt, Streams io) {
    RunConfig cfg;
    try {
        cfg = load_config(path);
    } catch (const Error& e) {
        return report(e, io);
    }
    if (command == "validate") return cmd_validate(cfg, io);
    if (command == "design") return cmd_design(cfg, opt, io);
    if (command == "certify") return cmd_certify(cfg, opt, io);
    if (command == "simulate") return cmd_simulate(cfg, opt, io);
    io.err << "error: unknown command '" << command << "'\n";
    return kConfigError;
}

}  // namespace sdc::cli
