#include "doctest.h"

#include <cmath>
#include <tuple>

#include "qedcut/modes.hpp"

using namespace qedcut;

TEST_CASE("bound_energy free case returns the rest energy") {
    PhysicalParams p;
    p.m0c2 = 2.5;
    CHECK(bound_energy(p, 1, 0) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(bound_energy(p, -3, 7) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("bound_energy z_alpha=0.6, kj=1, n=0 gives 0.8 m0c2") {
    // sqrt(1 - 0.36) = 0.8, 1 + 0.36/0.64 = 1.5625, 1/sqrt(1.5625) = 0.8 exactly
    PhysicalParams p;
    p.z_alpha = 0.6;
    CHECK(bound_energy(p, 1, 0) == doctest::Approx(0.8).epsilon(1e-15));
    p.m0c2 = 3.0;
    CHECK(bound_energy(p, 1, 0) == doctest::Approx(2.4).epsilon(1e-15));
}

TEST_CASE("bound_energy increases to m0c2 with n, decreases with z_alpha") {
    PhysicalParams p;
    p.z_alpha = 0.4;
    double prev = 0.0;
    for (int n = 0; n < 12; ++n) {
        const double e = bound_energy(p, 1, n);
        CHECK(e > prev);
        CHECK(e < p.m0c2);
        prev = e;
    }
    CHECK(bound_energy(p, 1, 40) == doctest::Approx(1.0).epsilon(1e-4));
    for (double za : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        PhysicalParams q;
        q.z_alpha = za;
        PhysicalParams r;
        r.z_alpha = za + 0.05;
        CHECK(bound_energy(r, 2, 1) < bound_energy(q, 2, 1));
    }
}

TEST_CASE("bound_energy domain error when kj^2 <= z_alpha^2") {
    PhysicalParams p;
    p.z_alpha = 0.99;
    CHECK_NOTHROW(bound_energy(p, 1, 0));
    CHECK_THROWS_AS(bound_energy(p, 0, 0), domain_error);
    PhysicalParams ok;
    CHECK_THROWS_AS(bound_energy(ok, 1, -1), domain_error);
}

TEST_CASE("continuum_energy") {
    PhysicalParams p;
    CHECK(continuum_energy(p, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(continuum_energy(p, std::sqrt(3.0)) == doctest::Approx(2.0).epsilon(1e-14));
    double prev = continuum_energy(p, 0.0);
    for (double q = 0.1; q < 3.0; q += 0.1) {
        const double e = continuum_energy(p, q);
        CHECK(e > prev);
        prev = e;
    }
}

TEST_CASE("photon_energy norm and homogeneity") {
    PhysicalParams p;
    CHECK(photon_energy(p, {0, 0, 0}) == 0.0);
    CHECK(photon_energy(p, {3, 4, 0}) == doctest::Approx(5.0).epsilon(1e-15));
    const std::array<double, 3> k{0.3, -1.2, 0.7};
    const double lam = 2.75;
    CHECK(photon_energy(p, {lam * k[0], lam * k[1], lam * k[2]}) ==
          doctest::Approx(lam * photon_energy(p, k)).epsilon(1e-14));
    PhysicalParams pc;
    pc.c = 2.0;
    CHECK(photon_energy(pc, {3, 4, 0}) == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("mode table: ordering, energies, E0 window") {
    PhysicalParams p;
    p.z_alpha = 0.5;
    GridSpec spec;
    spec.sectors = {{1, 2}, {-1, 1}};
    spec.p_max = 2.0;
    spec.n_p = 3;
    spec.photon_spacing = 0.5;
    spec.photon_lambda = 1.0;
    ModeTable t = build_mode_table(p, spec);

    CHECK(t.n_d() == 3);
    const double e0 = t.min_discrete_energy();
    CHECK(e0 > 0.0);
    CHECK(e0 < p.m0c2);

    // all continuum energies >= m0c2 > all discrete energies
    for (double e : t.plus.energies) CHECK(e >= p.m0c2);
    for (const auto& m : t.d_modes) CHECK(m.energy < p.m0c2);

    // midpoint rule, sorted by (gamma, p), positive weights
    for (std::size_t i = 1; i < t.plus.size(); ++i) {
        const auto &a = t.plus.points[i - 1], &b = t.plus.points[i];
        CHECK(std::tie(a.gamma_id, a.p) < std::tie(b.gamma_id, b.p));
        CHECK(b.weight > 0.0);
    }
    CHECK(t.plus.points[0].p == doctest::Approx(2.0 / 3.0 / 2.0));

    // photon lattice: ball, two polarizations per site, origin excluded
    CHECK(t.photons.size() % 2 == 0);
    CHECK(t.photons.num_k() == 33 - 1); // |m| <= 2 sites minus origin
    for (std::size_t i = 0; i < t.photons.size(); i += 2) {
        CHECK(t.photons.points[i].mu == 1);
        CHECK(t.photons.points[i + 1].mu == 2);
        CHECK(t.photons.energies[i] > 0.0);
        CHECK(t.photons.energies[i] <= 1.0 + 1e-12);
    }
    CHECK(t.min_nonzero_photon_energy() == doctest::Approx(0.5));

    GridSpec with_origin = spec;
    with_origin.include_origin = true;
    ModeTable t2 = build_mode_table(p, with_origin);
    CHECK(t2.photons.num_k() == 33);
}

TEST_CASE("params validation") {
    PhysicalParams p;
    p.z_alpha = 1.0;
    CHECK_THROWS_AS(p.validate(), domain_error);
    p.z_alpha = 0.5;
    p.m0c2 = 0.0;
    CHECK_THROWS_AS(p.validate(), domain_error);
}
