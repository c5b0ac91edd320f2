// Acceptance suite: one test case per criterion, one pass/fail line each.
// Criteria 7-9 run on the default study configurations; every tolerance is
// pinned here.

#include "doctest.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "qedcut/verifier.hpp"

using namespace qedcut;

namespace {

struct CriterionTimer {
    const char* name;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    bool ok = true;
    explicit CriterionTimer(const char* n) : name(n) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    void note(bool pass) { ok = ok && pass; }
    ~CriterionTimer() {
        std::printf("[%s] %s (%.1fs)\n", name, ok ? "PASS" : "FAIL", seconds());
        std::fflush(stdout);
    }
};

#define CRIT_CHECK(timer, expr)      \
    do {                             \
        const bool _ok = (expr);     \
        (timer).note(_ok);           \
        CHECK_MESSAGE(_ok, #expr);   \
    } while (0)

// Study configuration shared by criteria 6-8 and 10 (probed margins in the
// comments refer to this exact setup).
RunConfig study_config() {
    RunConfig cfg = default_config();
    cfg.physical.z_alpha = 0.5;
    cfg.physical.g1 = 0.12;
    cfg.physical.g2 = 0.03;
    cfg.grid.sectors = {{1, 1}};
    cfg.grid.p_max = 1.0;
    cfg.grid.n_p = 1;
    cfg.grid.photon_spacing = 0.6;
    cfg.grid.photon_lambda = 1.5;
    cfg.caps.max_per_mode = 1;
    cfg.caps.max_photons_total = 1;
    cfg.m_list = {2.4, 1.2, 0.6, 0.3};
    cfg.lambda_threshold = 0.95;
    return cfg;
}

} // namespace

TEST_CASE("criterion-1: CAR/CCR exactness at <= 6 modes per species, 2 photon modes") {
    CriterionTimer timer("criterion 1");
    // 4+4+3 fermion modes, one k point (two polarization modes), dim 18432
    ModeTable modes = make_test_modes(4, 4, 3, 1);
    TruncationCaps caps;
    caps.max_fermions = -1;
    caps.max_per_mode = 2;
    caps.max_photons_total = 4;
    BoundReport rep = check_car_ccr(modes, caps);
    for (const auto& c : rep.checks) {
        INFO(c.id, " deviation ", c.lhs);
        CRIT_CHECK(timer, c.pass);
    }
    // fermionic identities are integer-sign exact, CCR to 1e-12
    CRIT_CHECK(timer, rep.find("car:{b,b*}=delta")->lhs == 0.0);
    CRIT_CHECK(timer, rep.find("car:{b,b}=0")->lhs == 0.0);
    CRIT_CHECK(timer, rep.find("car:cross-species")->lhs == 0.0);
    CRIT_CHECK(timer, rep.find("ccr:interior")->lhs <= 1e-12);
    CRIT_CHECK(timer, timer.seconds() < 60.0);
}

TEST_CASE("criterion-2: Lemma 3.2/3.3 norm identity on 100 random pairs") {
    CriterionTimer timer("criterion 2");
    BoundReport rep = check_fermion_norm_identity(100, 424242);
    REQUIRE(rep.checks.size() == 1);
    INFO("worst relative deviation ", rep.checks[0].lhs);
    CRIT_CHECK(timer, rep.checks[0].lhs <= 1e-12);
}

TEST_CASE("criterion-3: bound suite over 100 random kernel instances + tightness") {
    CriterionTimer timer("criterion 3");
    BoundReport rep = check_quartic_bounds(100, 4, 314159, 1e-8, 1e-12);
    rep.merge(check_tightness(271828));

    // NOTE: prop3.4(ii), prop3.7(24) and prop3.7(25) are expected to FAIL:
    // the unweighted Hilbert-Schmidt bounds are violated by coherent
    // multi-pair states (see the verifier unit tests for deterministic
    // counterexamples); their (N_D+1)^{-1/2}-weighted variants pass. The
    // criterion is asserted as stated and the failure is the honest outcome.
    for (const char* id :
         {"prop3.4(i)", "prop3.4(ii)", "prop3.4(iii)", "prop3.4(iv)", "prop3.7(22)",
          "prop3.7(23)", "prop3.7(24)", "prop3.7(25)", "prop3.14(i)", "prop3.14(ii)",
          "prop3.14(iii)", "prop3.14(iv)"}) {
        const CheckRecord* c = rep.find(id);
        REQUIRE(c != nullptr);
        INFO(id, ": lhs=", c->lhs, " rhs=", c->rhs, " [", c->dims, "]");
        std::printf("  %-16s lhs=%-12.6g rhs=%-12.6g %s\n", id, c->lhs, c->rhs,
                    c->pass ? "ok" : "VIOLATED");
        CRIT_CHECK(timer, c->pass);
    }
    for (const char* id : {"prop3.4(ii)+weight", "prop3.7(24)+weight", "prop3.7(25)+weight"}) {
        const CheckRecord* c = rep.find(id);
        REQUIRE(c != nullptr);
        std::printf("  %-16s lhs=%-12.6g rhs=%-12.6g %s (repaired variant)\n", id, c->lhs,
                    c->rhs, c->pass ? "ok" : "VIOLATED");
    }
    // tightness instances reach lhs/rhs >= 0.99 without crossing the bound
    for (const char* id : {"tightness:prop3.4(i)", "tightness:prop3.7(22)",
                           "tightness:prop3.4(i):no-violation",
                           "tightness:prop3.7(22):no-violation"}) {
        const CheckRecord* c = rep.find(id);
        REQUIRE(c != nullptr);
        INFO(id, ": lhs=", c->lhs, " rhs=", c->rhs);
        CRIT_CHECK(timer, c->pass);
    }
}

TEST_CASE("criterion-4: photon bounds (Lemma 3.1, (50)/(51), (33)/(34)) with eps sweep") {
    CriterionTimer timer("criterion 4");
    RunConfig cfg = study_config();
    ModeTable modes = cfg.make_mode_table();
    KernelSet ks = cfg.make_kernels(modes);
    FockBasis basis = FockBasis::enumerate(modes, cfg.caps);
    BoundReport rep = check_photon_bounds(basis, ks.vertex, 100, 606, 1e-8, 1e-12);
    for (const char* id : {"lemma3.1:a", "lemma3.1:a*", "appendix(50)", "appendix(51)",
                           "lemma3.12(33)", "lemma3.12(34)"}) {
        const CheckRecord* c = rep.find(id);
        REQUIRE(c != nullptr);
        INFO(id, ": lhs=", c->lhs, " rhs=", c->rhs, " [", c->dims, "]");
        CRIT_CHECK(timer, c->pass);
    }
    // single-mode saturating case achieves equality to 1e-10
    CRIT_CHECK(timer, rep.find("lemma3.1:saturation")->lhs <= 1e-10);
}

TEST_CASE("criterion-5: Lemma 4.5 commutator identity, exact per grid k point") {
    CriterionTimer timer("criterion 5");
    RunConfig cfg = study_config();
    ModeTable modes = cfg.make_mode_table();
    KernelSet ks = cfg.make_kernels(modes);
    FockBasis basis = FockBasis::enumerate(modes, cfg.caps);
    for (double m : {0.0, 0.7}) {
        BoundReport rep = check_commutator_identity(basis, ks.vertex, m, 25, 51, 1e-12);
        const CheckRecord* ident = rep.find("lemma4.5:identity");
        REQUIRE(ident != nullptr);
        INFO("m=", m, " identity deviation ", ident->lhs);
        CRIT_CHECK(timer, ident->lhs <= 1e-12);
        CRIT_CHECK(timer, rep.find("lemma4.5:bound")->pass);
    }
}

TEST_CASE("criterion-6: vacuum/spectral sanity and the E_m sweep") {
    CriterionTimer timer("criterion 6");
    RunConfig cfg = study_config();
    ModeTable modes = cfg.make_mode_table();
    FockBasis basis = FockBasis::enumerate(modes, cfg.caps);
    SolverOptions solver = cfg.solver;
    solver.dense_threshold = 4000; // exact dense path at this dim

    // g1 = g2 = 0: ground energy 0, eigenvector Omega
    PhysicalParams free_params = cfg.physical;
    free_params.g1 = 0.0;
    free_params.g2 = 0.0;
    KernelSet ks = cfg.make_kernels(modes);
    SparseOperator h0 = build_total(basis, ks, free_params, {});
    GroundStateResult gs = ground_state(h0, solver);
    CRIT_CHECK(timer, std::abs(gs.energy) <= 1e-12);
    CRIT_CHECK(timer, std::norm(gs.vector[0]) >= 1.0 - 1e-12); // vacuum is index 0

    // E_m <= 1e-10 across the sweep; sup |E_m| finite and within the
    // interaction-norm bound
    ConvergenceSeries s = ir_convergence_study(basis, ks, cfg.physical, cfg.m_list,
                                               cfg.lambda_threshold, solver, 1e-10);
    for (const auto& e : s.entries) {
        INFO("m=", e.param, " E=", e.energy);
        CRIT_CHECK(timer, e.solver_ok);
        CRIT_CHECK(timer, e.energy <= 1e-10);
    }
    CRIT_CHECK(timer, std::isfinite(s.sup_abs_energy));
    SparseOperator hi1 = build_HI1(basis, ks.vertex);
    SparseOperator hi2 = build_HI2(basis, ks.coulomb);
    SparseOperator inter =
        operator_sum(hi1, hi2, cfg.physical.g1, cfg.physical.g2, "interaction");
    const double vnorm = operator_norm(inter, 1e-8, solver);
    CRIT_CHECK(timer, s.sup_abs_energy <= vnorm * (1.0 + 1e-8) + 1e-12);
}

TEST_CASE("criterion-7: infrared study monotone to an exact zero with Cauchy gaps") {
    CriterionTimer timer("criterion 7");
    RunConfig cfg = study_config();
    ModeTable modes = cfg.make_mode_table();
    KernelSet ks = cfg.make_kernels(modes);
    FockBasis basis = FockBasis::enumerate(modes, cfg.caps);

    // small couplings satisfying condition (4)
    KernelConstants consts = compute_constants(ks, modes);
    Condition4Result c4 =
        check_condition4(consts, modes.min_discrete_energy(), cfg.physical.g1, cfg.physical.g2);
    CRIT_CHECK(timer, c4.pass);

    ConvergenceSeries s = ir_convergence_study(basis, ks, cfg.physical, cfg.m_list,
                                               cfg.lambda_threshold, cfg.solver, 1e-10);
    REQUIRE(s.entries.size() == 4);
    for (const auto& e : s.entries) CRIT_CHECK(timer, e.solver_ok);

    // ||(H - H_m) Phi_m|| decreases monotonically along the descending list
    for (std::size_t i = 1; i < s.entries.size(); ++i) {
        INFO("pert ", s.entries[i - 1].pert_norm, " -> ", s.entries[i].pert_norm);
        CRIT_CHECK(timer,
                   s.entries[i].pert_norm <= s.entries[i - 1].pert_norm * (1.0 + 1e-12));
    }
    // exactly zero once m is below the smallest nonzero grid frequency
    const double floor = modes.min_nonzero_photon_energy();
    for (const auto& e : s.entries)
        if (e.param < floor) CRIT_CHECK(timer, e.pert_norm == 0.0);

    // ground energies form a Cauchy sequence with gaps shrinking >= 2x per
    // halving of m above that floor (probed ratio ~0.12 on this config)
    const double g1 = std::abs(s.entries[1].energy - s.entries[0].energy);
    const double g2 = std::abs(s.entries[2].energy - s.entries[1].energy);
    const double g3 = std::abs(s.entries[3].energy - s.entries[2].energy);
    INFO("gaps ", g1, " ", g2, " ", g3);
    CRIT_CHECK(timer, g2 <= 0.5 * g1 * (1.0 + 1e-9));
    CRIT_CHECK(timer, g3 <= 0.5 * g2 * (1.0 + 1e-9) + 1e-13);
}

TEST_CASE("criterion-8: photon-number bound and overlap trend over a coupling sweep") {
    CriterionTimer timer("criterion 8");
    RunConfig cfg = study_config();
    ModeTable modes = cfg.make_mode_table();
    KernelSet ks = cfg.make_kernels(modes);
    FockBasis basis = FockBasis::enumerate(modes, cfg.caps);
    KernelConstants consts = compute_constants(ks, modes);
    SolverOptions solver = cfg.solver;
    solver.dense_threshold = 4000;

    // S = sum_k W_k G(k)^2 / omega(k)^2 (Lemma 4.6 integral on the grid)
    double S = 0.0;
    for (std::size_t ik = 0; ik < modes.photons.num_k(); ++ik) {
        const double om = modes.photons.energies[2 * ik];
        if (om > 0.0)
            S += modes.photons.points[2 * ik].weight * consts.g_of_k_sq[ik] / (om * om);
    }
    CRIT_CHECK(timer, S > 0.0);

    const double ts[] = {1.0, 0.5, 0.25, 0.125};
    double c_emp = 0.0;
    double prev_overlap = -1.0;
    std::vector<double> overlaps;
    for (double t : ts) {
        PhysicalParams p = cfg.physical;
        p.g1 = 0.25 * t;
        p.g2 = 0.08 * t;
        SparseOperator h = build_total(basis, ks, p, {});
        GroundStateResult gs = ground_state(h, solver);
        Observables o = observables(gs.vector, basis, cfg.lambda_threshold);
        if (t == 1.0) {
            c_emp = o.n_ph / (p.g1 * p.g1 * S); // fitted at the largest coupling
            CRIT_CHECK(timer, std::isfinite(c_emp));
        } else {
            INFO("t=", t, " nPh=", o.n_ph, " bound=", c_emp * p.g1 * p.g1 * S);
            CRIT_CHECK(timer, o.n_ph <= c_emp * p.g1 * p.g1 * S * (1.0 + 1e-9));
        }
        overlaps.push_back(o.overlap);
    }
    // Eq. (37) surrogate: overlap >= 0.9 at the smallest coupling and
    // monotonically increasing as the couplings decrease
    CRIT_CHECK(timer, overlaps.back() >= 0.9);
    for (std::size_t i = 1; i < overlaps.size(); ++i) {
        INFO("overlap ", overlaps[i - 1], " -> ", overlaps[i]);
        CRIT_CHECK(timer, overlaps[i] >= overlaps[i - 1] - 1e-12);
        (void)prev_overlap;
    }
}

TEST_CASE("criterion-9: eps-averaging surrogates for Eqs. (48) and (49)") {
    CriterionTimer timer("criterion 9");
    const double eps = 1.8;
    const double ctilde_cap = 13.0; // sqrt(3)/(1 - sqrt(3)/2) ~ 12.93, grid independent

    // Eq. (48): |omega - <omega>_eps| <= C~ eps omega on non-origin cubes,
    // one shared constant across two grid refinements
    double ctilde_shared = 0.0;
    std::vector<std::pair<ModeTable, std::vector<double>>> grids;
    for (double h : {0.6, 0.3}) {
        RunConfig cfg = study_config();
        cfg.grid.photon_spacing = h;
        cfg.grid.photon_lambda = 1.8;
        ModeTable modes = cfg.make_mode_table();
        std::vector<double> omega_eps = epsilon_average(
            modes.photons, eps, std::span<const double>(modes.photons.energies));
        double local = 0.0;
        for (std::size_t i = 0; i < modes.photons.size(); ++i) {
            const auto n = epsilon_cube(modes.photons.points[i].k, eps);
            if (n[0] == 0 && n[1] == 0 && n[2] == 0) continue;
            const double om = modes.photons.energies[i];
            local = std::max(local, std::abs(om - omega_eps[i]) / (eps * om));
        }
        INFO("h=", h, " Ctilde=", local);
        ctilde_shared = std::max(ctilde_shared, local);
        grids.emplace_back(std::move(modes), std::move(omega_eps));
    }
    CRIT_CHECK(timer, ctilde_shared <= ctilde_cap);
    for (const auto& [modes, omega_eps] : grids) {
        bool all = true;
        for (std::size_t i = 0; i < modes.photons.size(); ++i) {
            const auto n = epsilon_cube(modes.photons.points[i].k, eps);
            if (n[0] == 0 && n[1] == 0 && n[2] == 0) continue;
            all = all && std::abs(modes.photons.energies[i] - omega_eps[i]) <=
                             ctilde_shared * eps * modes.photons.energies[i] * (1.0 + 1e-12);
        }
        CRIT_CHECK(timer, all);
    }

    // Eq. (49): the resolvent-weighted difference norm decreases at least
    // linearly in eps (odd cube multiples; eps = cell side is exact)
    RunConfig cfg = study_config();
    cfg.grid.photon_lambda = 1.8;
    cfg.eps_list = {3.0, 1.8, 0.6};
    ModeTable modes = cfg.make_mode_table();
    KernelSet ks = cfg.make_kernels(modes);
    FockBasis basis = FockBasis::enumerate(modes, cfg.caps);
    ConvergenceSeries s = eps_convergence_study(basis, ks, cfg.physical, 0.0, cfg.eps_list,
                                                cfg.lambda_threshold, cfg.solver);
    REQUIRE(s.entries.size() == 3);
    for (const auto& e : s.entries) CRIT_CHECK(timer, e.solver_ok);
    INFO("norms ", s.entries[0].pert_norm, " ", s.entries[1].pert_norm, " ",
         s.entries[2].pert_norm);
    CRIT_CHECK(timer, s.entries[0].pert_norm > 0.0);
    CRIT_CHECK(timer, s.entries[1].pert_norm <=
                          s.entries[0].pert_norm * (1.8 / 3.0) * (1.0 + 0.05));
    CRIT_CHECK(timer, s.entries[2].pert_norm <= 1e-10); // averaging is the identity
    CRIT_CHECK(timer, std::isfinite(s.const_gamma));
    std::printf("  const_gamma = %.6g\n", s.const_gamma);
}

TEST_CASE("criterion-10: condition-(4) gate agrees with the brute-force scan") {
    CriterionTimer timer("criterion 10");
    RunConfig cfg = study_config();
    ModeTable modes = cfg.make_mode_table();
    KernelSet ks = cfg.make_kernels(modes);
    FockBasis basis = FockBasis::enumerate(modes, cfg.caps);
    KernelConstants consts = compute_constants(ks, modes);
    const double e0 = modes.min_discrete_energy();

    // coupling ray (g1, g2) = t (1, 0.5); analytic threshold t* = 1/lhs(1, 0.5)
    auto margin_at = [&](double t) {
        return check_condition4(consts, e0, t * 1.0, t * 0.5).margin;
    };
    const double lhs_unit = 1.0 - margin_at(1.0);
    REQUIRE(lhs_unit > 0.0);
    const double t_star = 1.0 / lhs_unit;

    // brute-force scan: bisect the margin sign flip
    double lo = 0.0, hi = 4.0 * t_star;
    REQUIRE(margin_at(lo) > 0.0);
    REQUIRE(margin_at(hi) < 0.0);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (margin_at(mid) > 0.0 ? lo : hi) = mid;
    }
    const double t_hat = 0.5 * (lo + hi);
    INFO("t* = ", t_star, ", scan = ", t_hat);
    CRIT_CHECK(timer, std::abs(t_hat - t_star) <= 0.01 * t_star);

    // below the threshold the assembled H is bounded: finite lowest eigenvalue
    // with |E| <= (relative-bound combination) * (spectral-radius surrogate)
    PhysicalParams p = cfg.physical;
    p.g1 = 0.8 * t_star;
    p.g2 = 0.4 * t_star;
    SparseOperator h = build_total(basis, ks, p, {});
    SolverOptions solver = cfg.solver;
    solver.dense_threshold = 4000;
    GroundStateResult gs = ground_state(h, solver);
    CRIT_CHECK(timer, std::isfinite(gs.energy));

    SparseOperator hi1 = build_HI1(basis, ks.vertex);
    SparseOperator hi2 = build_HI2(basis, ks.coulomb);
    SparseOperator inter = operator_sum(hi1, hi2, p.g1, p.g2, "interaction");
    const double vnorm = operator_norm(inter, 1e-8, solver);
    CRIT_CHECK(timer, gs.energy >= -vnorm * (1.0 + 1e-8) - 1e-12);

    const double lhs_t = 1.0 - margin_at(0.8 * t_star);
    double spectral_surrogate = 0.0;
    {
        const auto dg = dgamma_hd_diagonal(basis);
        const auto hp = hph_diagonal(basis);
        for (std::size_t i = 0; i < basis.size(); ++i)
            spectral_surrogate = std::max(spectral_surrogate, dg[i] + hp[i] + p.m0c2);
    }
    // additive remainder: the ||Psi|| coefficients of Cor 3.17 and (34)
    VertexConstants vc = vertex_constants(modes, ks.vertex, solver);
    const double b_terms = std::abs(p.g2) * 2.0 * (consts.f4 + consts.f6_pm + consts.f6_mp) +
                           std::abs(p.g1) * 0.5 * vc.sum_a0();
    INFO("E=", gs.energy, " bound=", lhs_t * spectral_surrogate + b_terms);
    CRIT_CHECK(timer, std::abs(gs.energy) <= lhs_t * spectral_surrogate + b_terms);
}
