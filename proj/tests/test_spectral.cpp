#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "qedcut/spectral.hpp"
#include "qedcut/verifier.hpp"

using namespace qedcut;

namespace {

SparseOperator from_dense(const Eigen::MatrixXcd& m) {
    SparseOperator op;
    op.matrix = m.sparseView();
    op.hermitian = (m - m.adjoint()).norm() < 1e-12;
    op.provenance = "test";
    return op;
}

Eigen::MatrixXcd random_hermitian(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cplx(nd(rng), nd(rng));
    return 0.5 * (a + a.adjoint());
}

} // namespace

TEST_CASE("ground_state: diagonal matrix picks the smallest entry") {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    d(2, 2) = 2.0;
    GroundStateResult r = ground_state(from_dense(d));
    CHECK(r.energy == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(r.vector[1]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.vector[1].real() > 0.0); // phase fixed real positive
    CHECK(r.residual <= 1e-12);
}

TEST_CASE("ground_state dense path matches the dense eigensolver oracle") {
    Eigen::MatrixXcd h = random_hermitian(40, 99);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    GroundStateResult r = ground_state(from_dense(h));
    CHECK(r.energy == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-10));
}

TEST_CASE("ground_state Lanczos path matches dense at forced small threshold") {
    Eigen::MatrixXcd h = random_hermitian(120, 5);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    SolverOptions opts;
    opts.dense_threshold = 10; // force the iterative path
    opts.tol = 1e-11;
    GroundStateResult r = ground_state(from_dense(h), opts);
    CHECK(r.energy == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-10));
    CHECK(r.residual <= opts.tol * std::max(1.0, std::abs(r.energy)));
    CHECK(r.iterations > 0);
    // deterministic given the seed
    GroundStateResult r2 = ground_state(from_dense(h), opts);
    CHECK(r2.energy == r.energy);
    CHECK((r2.vector - r.vector).norm() == 0.0);
}

TEST_CASE("ground_state reports the degenerate cluster") {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
    d(0, 0) = 0.5;
    d(1, 1) = 0.5;
    d(2, 2) = 2.0;
    d(3, 3) = 3.0;
    GroundStateResult r = ground_state(from_dense(d));
    CHECK(r.cluster.size() == 2);
    CHECK(r.cluster_vectors.cols() == 2);
    // cluster projector observables are basis-choice independent
}

TEST_CASE("solver_error carries the best iterate") {
    Eigen::MatrixXcd h = random_hermitian(200, 31);
    SolverOptions opts;
    opts.dense_threshold = 10;
    opts.max_iter = 3; // cannot converge
    opts.tol = 1e-15;
    try {
        ground_state(from_dense(h), opts);
        FAIL("expected solver_error");
    } catch (const solver_error& e) {
        CHECK(std::isfinite(e.best.energy));
        CHECK(e.best.iterations > 0);
    }
}

TEST_CASE("operator_norm: zero, rank-one, dense SVD agreement") {
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(8, 8);
    CHECK(operator_norm(from_dense(z)) == 0.0);

    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXcd u(12), v(12);
    for (int i = 0; i < 12; ++i) {
        u[i] = cplx(nd(rng), nd(rng));
        v[i] = cplx(nd(rng), nd(rng));
    }
    u.normalize();
    v.normalize();
    Eigen::MatrixXcd rank1 = u * v.adjoint();
    CHECK(operator_norm(from_dense(rank1)) == doctest::Approx(1.0).epsilon(1e-10));

    Eigen::MatrixXcd a(50, 50);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) a(i, j) = cplx(nd(rng), nd(rng));
    const double oracle = dense_spectral_norm(a);
    CHECK(operator_norm(from_dense(a), 1e-10) == doctest::Approx(oracle).epsilon(1e-9));
    // force the power iteration path and compare against the same oracle
    SolverOptions opts;
    opts.dense_threshold = 4;
    opts.max_iter = 20000;
    CHECK(operator_norm(from_dense(a), 1e-12, opts) == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("observables: vacuum, one-photon state, projector decomposition") {
    ModeTable modes = make_test_modes(1, 1, 1, 2);
    TruncationCaps caps;
    caps.max_fermions = -1;
    caps.max_per_mode = 1;
    caps.max_photons_total = 1;
    FockBasis basis = FockBasis::enumerate(modes, caps);

    Vector vac = Vector::Zero(basis.size());
    vac[0] = 1.0;
    Observables o = observables(vac, basis, 0.5);
    CHECK(o.n_d == 0.0);
    CHECK(o.n_ph == 0.0);
    CHECK(o.overlap == 1.0);

    // one-photon state has overlap 0 for any lambda
    FockState ph;
    ph.ph_occ.assign(modes.n_photon(), 0);
    ph.ph_occ[0] = 1;
    Vector psi = Vector::Zero(basis.size());
    psi[(Eigen::Index)basis.index_of(ph).value()] = 1.0;
    Observables o2 = observables(psi, basis, 100.0);
    CHECK(o2.n_ph == 1.0);
    CHECK(o2.overlap == 0.0);

    // overlap + mass outside = 1 for a random normalized state
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd(0.0, 1.0);
    Vector r(basis.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) r[i] = cplx(nd(rng), nd(rng));
    r.normalize();
    const double lambda = 0.9;
    Observables o3 = observables(r, basis, lambda);
    const auto dg = dgamma_hd_diagonal(basis);
    double outside = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (!(basis.state(i).n_photons() == 0 && dg[i] <= lambda))
            outside += std::norm(r[(Eigen::Index)i]);
    CHECK(o3.overlap + outside == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("ir study: g=0 gives E_m = 0 and vacuum for every m") {
    ModeTable modes = make_test_modes(1, 1, 1, 2);
    TruncationCaps caps;
    caps.max_fermions = -1;
    caps.max_per_mode = 1;
    caps.max_photons_total = 1;
    FockBasis basis = FockBasis::enumerate(modes, caps);
    KernelSet ks;
    ks.vertex = PhotonVertexKernels::zeros(modes);
    ks.coulomb = CoulombKernels::zeros(modes);
    PhysicalParams params = modes.params;
    const double m_list[] = {3.0, 1.5, 0.5};
    ConvergenceSeries s =
        ir_convergence_study(basis, ks, params, m_list, 0.9, SolverOptions{});
    REQUIRE(s.entries.size() == 3);
    for (const auto& e : s.entries) {
        CHECK(std::abs(e.energy) <= 1e-12);
        CHECK(e.overlap == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(e.pert_norm <= 1e-14);
    }
    CHECK(s.all_energies_nonpositive);
    CHECK(s.sup_abs_energy <= 1e-12);
    // non-monotone m list is rejected
    const double bad[] = {1.0, 1.0};
    CHECK_THROWS(ir_convergence_study(basis, ks, params, bad, 0.9, SolverOptions{}));
}

TEST_CASE("series CSV format") {
    ConvergenceSeries s;
    s.param_name = "m";
    s.entries.push_back({0.5, -0.125, 0.25, 0.0625, 0.875, 0.001953125, true});
    const auto file = std::filesystem::temp_directory_path() / "qedcut_series.csv";
    write_series_csv(file, s);
    std::ifstream in(file);
    std::string line1, line2;
    std::getline(in, line1);
    std::getline(in, line2);
    CHECK(line1 == "param,energy,nD,nPh,overlap,pert_norm");
    CHECK(line2 == "0.5,-0.125,0.25,0.0625,0.875,0.001953125");
    std::filesystem::remove(file);
}

TEST_CASE("eps study: identity at the cell side gives zero difference norm") {
    ModeTable modes = make_test_modes(1, 1, 1, 2);
    TruncationCaps caps;
    caps.max_fermions = -1;
    caps.max_per_mode = 1;
    caps.max_photons_total = 1;
    FockBasis basis = FockBasis::enumerate(modes, caps);
    KernelSet ks = synthetic_kernels(modes, SyntheticSpec{});
    PhysicalParams params = modes.params;
    params.g1 = 0.1;
    params.g2 = 0.05;
    const double eps_list[] = {5.0, 1.0};
    ConvergenceSeries s =
        eps_convergence_study(basis, ks, params, 0.0, eps_list, 0.9, SolverOptions{});
    REQUIRE(s.entries.size() == 2);
    CHECK(s.entries[1].pert_norm <= 1e-11); // eps = cell side: averaging is identity
    CHECK(s.entries[0].pert_norm > 1e-8);   // coarse cubes genuinely perturb
    // Weyl bound: |E^eps - E| <= ||H^eps - H||
    SparseOperator h = build_total(basis, ks, params, {});
    SparseOperator heps =
        build_total(basis, ks, params, {.eps_average = true, .eps = 5.0});
    SparseOperator diff = operator_sum(heps, h, 1.0, -1.0, "diff");
    const double dn = operator_norm(diff);
    GroundStateResult g0 = ground_state(h);
    CHECK(std::abs(s.entries[0].energy - g0.energy) <= dn * (1.0 + 1e-10) + 1e-12);
}

TEST_CASE("variational property: E <= <Psi, H Psi> for random normalized states") {
    ModeTable modes = make_test_modes(1, 1, 1, 2);
    TruncationCaps caps;
    caps.max_fermions = -1;
    caps.max_per_mode = 1;
    caps.max_photons_total = 1;
    FockBasis basis = FockBasis::enumerate(modes, caps);
    KernelSet ks = synthetic_kernels(modes, SyntheticSpec{});
    PhysicalParams params = modes.params;
    params.g1 = 0.2;
    params.g2 = 0.1;
    SparseOperator h = build_total(basis, ks, params, {});
    GroundStateResult gs = ground_state(h);
    std::mt19937_64 rng(2718);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        Vector psi(basis.size());
        for (Eigen::Index i = 0; i < psi.size(); ++i) psi[i] = cplx(nd(rng), nd(rng));
        psi.normalize();
        const double expect = std::real(psi.dot(h.matrix * psi));
        CHECK(gs.energy <= expect + 1e-10);
    }
    // in particular E <= <Omega, H Omega> = 0
    CHECK(gs.energy <= 1e-12);
}

TEST_CASE("ir study is constant once m exceeds every grid frequency") {
    ModeTable modes = make_test_modes(1, 1, 1, 2); // omegas 1 and 2
    TruncationCaps caps;
    caps.max_fermions = -1;
    caps.max_per_mode = 1;
    caps.max_photons_total = 1;
    FockBasis basis = FockBasis::enumerate(modes, caps);
    KernelSet ks = synthetic_kernels(modes, SyntheticSpec{});
    PhysicalParams params = modes.params;
    params.g1 = 0.2;
    params.g2 = 0.1;
    const double m_list[] = {8.0, 4.0, 2.5}; // all above the top frequency
    ConvergenceSeries s =
        ir_convergence_study(basis, ks, params, m_list, 0.9, SolverOptions{});
    REQUIRE(s.entries.size() == 3);
    CHECK(s.entries[0].energy == s.entries[1].energy);
    CHECK(s.entries[1].energy == s.entries[2].energy);
    CHECK(s.entries[0].pert_norm == s.entries[1].pert_norm);
}
