// Command-line driver: verify | ground | ir-study | eps-study | gate.
// Exit codes: 0 all checks pass, 1 check failures, 2 config errors,
// 3 resource overflow.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "qedcut/kernel_archive.hpp"
#include "qedcut/verifier.hpp"

namespace {

using namespace qedcut;
using nlohmann::json;

void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
    out << s;
    if (!s.empty() && s.back() != '\n') out << '\n';
}

json observables_json(const Observables& o) {
    return json{{"nD", o.n_d}, {"nPh", o.n_ph}, {"overlap", o.overlap}};
}

int cmd_verify(const RunConfig& cfg) {
    BoundReport rep = run_full_verification(cfg);
    rep.print_table(std::cout);
    std::filesystem::create_directories(cfg.out_dir);
    write_text(cfg.out_dir / "verify_report.json", rep.to_json());
    return rep.all_pass() ? 0 : 1;
}

int cmd_gate(const RunConfig& cfg) {
    ModeTable modes = cfg.make_mode_table();
    KernelSet ks = cfg.make_kernels(modes);
    KernelConstants consts = compute_constants(ks, modes);
    const double e0 = modes.n_d() > 0 ? modes.min_discrete_energy() : modes.params.m0c2;
    Condition4Result c4 = check_condition4(consts, e0, cfg.physical.g1, cfg.physical.g2);
    json out;
    out["schema_version"] = 1;
    out["c_beta"] = {consts.c_beta[0], consts.c_beta[1], consts.c_beta[2]};
    out["E0"] = e0;
    out["f_norms"] = {{"f1", consts.f1},
                      {"f2a_plus", consts.f2a_plus},
                      {"f2a_minus", consts.f2a_minus},
                      {"f3a_pm", consts.f3a_pm},
                      {"f3a_mp", consts.f3a_mp},
                      {"f4", consts.f4},
                      {"f4aa", consts.f4aa},
                      {"f5_plus", consts.f5_plus},
                      {"f5_minus", consts.f5_minus},
                      {"f6_pm", consts.f6_pm},
                      {"f6_mp", consts.f6_mp}};
    out["condition4"] = {{"lhs", c4.lhs}, {"margin", c4.margin}, {"pass", c4.pass}};
    std::filesystem::create_directories(cfg.out_dir);
    write_text(cfg.out_dir / "gate.json", out.dump(2));
    std::printf("condition (4): lhs = %.12g, margin = %.12g -> %s\n", c4.lhs, c4.margin,
                c4.pass ? "PASS" : "FAIL");
    return c4.pass ? 0 : 1;
}

int cmd_ground(const RunConfig& cfg, const std::string& dump_path) {
    ModeTable modes = cfg.make_mode_table();
    KernelSet ks = cfg.make_kernels(modes);
    FockBasis basis = FockBasis::enumerate(modes, cfg.caps);
    SparseOperator h = build_total(basis, ks, cfg.physical, {});
    if (!dump_path.empty()) dump_matrix(dump_path, h);
    GroundStateResult gs = ground_state(h, cfg.solver);
    Observables obs = gs.cluster_vectors.cols() > 0
                          ? observables(gs.cluster_vectors, basis, cfg.lambda_threshold)
                          : observables(gs.vector, basis, cfg.lambda_threshold);
    json out;
    out["schema_version"] = 1;
    out["energy"] = gs.energy;
    out["residual"] = gs.residual;
    out["iterations"] = gs.iterations;
    out["dim"] = basis.size();
    out["cluster"] = gs.cluster;
    out["observables"] = observables_json(obs);
    std::filesystem::create_directories(cfg.out_dir);
    write_text(cfg.out_dir / "ground.json", out.dump(2));
    {
        std::ofstream dump(cfg.out_dir / "ground_state.txt");
        char buf[96];
        for (Eigen::Index i = 0; i < gs.vector.size(); ++i) {
            if (gs.vector[i] == cplx(0.0)) continue;
            std::snprintf(buf, sizeof buf, "%lld %.17g %.17g\n", static_cast<long long>(i),
                          gs.vector[i].real(), gs.vector[i].imag());
            dump << buf;
        }
    }
    std::printf("ground energy = %.12g (residual %.3g, dim %zu)\n", gs.energy, gs.residual,
                basis.size());
    return 0;
}

int cmd_ir_study(const RunConfig& cfg) {
    ModeTable modes = cfg.make_mode_table();
    KernelSet ks = cfg.make_kernels(modes);
    FockBasis basis = FockBasis::enumerate(modes, cfg.caps);
    ConvergenceSeries s = ir_convergence_study(basis, ks, cfg.physical, cfg.m_list,
                                               cfg.lambda_threshold, cfg.solver, cfg.tol_zero);
    std::filesystem::create_directories(cfg.out_dir);
    write_series_csv(cfg.out_dir / "ir_study.csv", s);
    bool ok = s.all_energies_nonpositive && std::isfinite(s.sup_abs_energy);
    for (const auto& e : s.entries) ok = ok && e.solver_ok;
    std::printf("ir study: %zu points, sup|E_m| = %.6g, E_m <= %.1g %s\n", s.entries.size(),
                s.sup_abs_energy, cfg.tol_zero, ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

int cmd_eps_study(const RunConfig& cfg) {
    ModeTable modes = cfg.make_mode_table();
    KernelSet ks = cfg.make_kernels(modes);
    FockBasis basis = FockBasis::enumerate(modes, cfg.caps);
    ConvergenceSeries s = eps_convergence_study(basis, ks, cfg.physical, cfg.eps_study_m,
                                                cfg.eps_list, cfg.lambda_threshold, cfg.solver);
    std::filesystem::create_directories(cfg.out_dir);
    write_series_csv(cfg.out_dir / "eps_study.csv", s);
    bool ok = true;
    for (const auto& e : s.entries) ok = ok && e.solver_ok;
    std::printf("eps study: %zu points, const_gamma = %.6g %s\n", s.entries.size(),
                s.const_gamma, ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truncated Fock-space toolkit for the cutoff bound-state QED Hamiltonian"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::string dump_path;
    long seed_override = -1;

    app.add_option("--config", config_path, "configuration file (JSON)")->required();
    app.add_option("--seed", seed_override, "override solver/verifier seed");
    app.add_option("--out", out_override, "override output directory");

    auto* sub_verify = app.add_subcommand("verify", "run the full inequality suite");
    auto* sub_ground = app.add_subcommand("ground", "compute one ground state");
    sub_ground->add_option("--dump-matrix", dump_path,
                           "write the assembled H in coordinate text form");
    auto* sub_ir = app.add_subcommand("ir-study", "infrared-cutoff convergence sweep");
    auto* sub_eps = app.add_subcommand("eps-study", "cube-averaging convergence sweep");
    auto* sub_gate = app.add_subcommand("gate", "evaluate the condition-(4) margin");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 2;
    }

    try {
        qedcut::RunConfig cfg = qedcut::load_config(config_path);
        if (seed_override >= 0) {
            cfg.solver.seed = static_cast<std::uint64_t>(seed_override);
            cfg.verify.seed = static_cast<std::uint64_t>(seed_override);
        }
        if (!out_override.empty()) cfg.out_dir = out_override;

        if (sub_verify->parsed()) return cmd_verify(cfg);
        if (sub_ground->parsed()) return cmd_ground(cfg, dump_path);
        if (sub_ir->parsed()) return cmd_ir_study(cfg);
        if (sub_eps->parsed()) return cmd_eps_study(cfg);
        if (sub_gate->parsed()) return cmd_gate(cfg);
        return 2;
    } catch (const qedcut::config_error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const qedcut::resource_error& e) {
        std::cerr << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
