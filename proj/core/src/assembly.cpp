#include "qedcut/assembly.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qedcut {

SparseOperator SparseOperator::adjoint() const {
    SparseOperator out;
    out.matrix = matrix.adjoint();
    out.hermitian = hermitian;
    out.provenance = provenance + "^H";
    return out;
}

double SparseOperator::hermiticity_deviation() const {
    SparseMatrix diff = SparseMatrix(matrix.adjoint()) - matrix;
    double m = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(diff, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

SparseOperator diagonal_operator(std::span<const double> diag, std::string provenance) {
    SparseOperator op;
    op.matrix.resize(static_cast<Eigen::Index>(diag.size()),
                     static_cast<Eigen::Index>(diag.size()));
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i)
        if (diag[i] != 0.0)
            trips.emplace_back(static_cast<int>(i), static_cast<int>(i), cplx(diag[i], 0.0));
    op.matrix.setFromTriplets(trips.begin(), trips.end());
    op.hermitian = true;
    op.provenance = std::move(provenance);
    return op;
}

SparseOperator operator_sum(const SparseOperator& a, const SparseOperator& b, cplx ca,
                            cplx cb, std::string provenance) {
    SparseOperator out;
    out.matrix = ca * a.matrix + cb * b.matrix;
    out.hermitian = a.hermitian && b.hermitian && ca.imag() == 0.0 && cb.imag() == 0.0;
    out.provenance = std::move(provenance);
    return out;
}

SparseOperator build_from_monomials(const FockBasis& basis,
                                    std::span<const Monomial> monomials,
                                    std::string provenance, bool plus_adjoint) {
    const std::size_t dim = basis.size();
    std::vector<Eigen::Triplet<cplx>> trips;
    for (std::size_t col = 0; col < dim; ++col) {
        const FockState& s = basis.state(col);
        for (const Monomial& mono : monomials) {
            if (mono.coeff == cplx(0.0, 0.0)) continue;
            auto res = basis.apply_monomial(mono.ops, s);
            if (!res) continue;
            const cplx v = mono.coeff * res->second;
            trips.emplace_back(static_cast<int>(res->first), static_cast<int>(col), v);
            if (plus_adjoint)
                trips.emplace_back(static_cast<int>(col), static_cast<int>(res->first),
                                   std::conj(v));
        }
    }
    SparseOperator op;
    op.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    op.matrix.setFromTriplets(trips.begin(), trips.end());
    op.provenance = std::move(provenance);
    return op;
}

std::vector<double> dgamma_hd_diagonal(const FockBasis& basis) {
    const ModeTable& modes = basis.modes();
    std::vector<double> diag(basis.size(), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const FockState& s = basis.state(i);
        double e = 0.0;
        for (std::size_t a = 0; a < modes.n_d(); ++a)
            if (s.d_occ >> a & 1) e += modes.d_modes[a].energy;
        for (std::size_t j = 0; j < modes.n_plus(); ++j)
            if (s.plus_occ >> j & 1) e += modes.plus.energies[j];
        for (std::size_t j = 0; j < modes.n_minus(); ++j)
            if (s.minus_occ >> j & 1) e += modes.minus.energies[j];
        diag[i] = e;
    }
    return diag;
}

std::vector<double> hph_diagonal(const FockBasis& basis) {
    const ModeTable& modes = basis.modes();
    std::vector<double> diag(basis.size(), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const FockState& s = basis.state(i);
        double e = 0.0;
        for (std::size_t p = 0; p < s.ph_occ.size(); ++p)
            e += s.ph_occ[p] * modes.photons.energies[p];
        diag[i] = e;
    }
    return diag;
}

std::vector<double> hph_diagonal_eps(const FockBasis& basis, double eps, double m) {
    const ModeTable& modes = basis.modes();
    std::vector<double> omega_eps =
        epsilon_average(modes.photons, eps, std::span<const double>(modes.photons.energies));
    // eps-average only the large-frequency part; modes below m keep omega.
    for (std::size_t p = 0; p < omega_eps.size(); ++p)
        if (modes.photons.energies[p] < m) omega_eps[p] = modes.photons.energies[p];
    std::vector<double> diag(basis.size(), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const FockState& s = basis.state(i);
        double e = 0.0;
        for (std::size_t p = 0; p < s.ph_occ.size(); ++p) e += s.ph_occ[p] * omega_eps[p];
        diag[i] = e;
    }
    return diag;
}

FreeOperators build_free(const FockBasis& basis) {
    FreeOperators out;
    auto dg = dgamma_hd_diagonal(basis);
    auto hp = hph_diagonal(basis);
    out.d_gamma_hd = diagonal_operator(dg, "dGamma(H_D)");
    out.h_ph = diagonal_operator(hp, "H_ph");
    for (std::size_t i = 0; i < dg.size(); ++i) dg[i] += hp[i];
    out.h0 = diagonal_operator(dg, "H0");
    return out;
}

namespace {

std::vector<double> sqrt_weights(const ContinuumGrid& g) {
    std::vector<double> w(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) w[j] = std::sqrt(g.points[j].weight);
    return w;
}

// Electron-leg ladder op for the Coulomb term (discrete modes first).
LadderOp electron_leg_op(LadderKind kind, const ModeTable& modes, std::size_t e) {
    if (e < modes.n_d()) return fermion_op(kind, Block::D, static_cast<int>(e));
    return fermion_op(kind, Block::Plus, static_cast<int>(e - modes.n_d()));
}

std::vector<double> sqrt_electron_leg_weights(const ModeTable& modes) {
    auto w = electron_leg_weights(modes);
    for (auto& x : w) x = std::sqrt(x);
    return w;
}

void append_vertex_monomials(std::vector<Monomial>& out, const FockBasis& basis,
                             const PhotonVertexKernels& pv, int i, int mu, std::size_t ik) {
    const ModeTable& modes = basis.modes();
    const auto swp = sqrt_weights(modes.plus);
    const auto swm = sqrt_weights(modes.minus);
    const std::size_t nd = modes.n_d(), np = modes.n_plus(), nm = modes.n_minus();
    const std::size_t m = static_cast<std::size_t>(mu - 1);
    switch (i) {
        case 1:
            for (std::size_t a = 0; a < nd; ++a)
                for (std::size_t b = 0; b < nd; ++b) {
                    const cplx g = pv.g1_dd(m, ik, a, b);
                    if (g == cplx(0.0)) continue;
                    out.push_back({g,
                                   {fermion_op(LadderKind::Create, Block::D, (int)a),
                                    fermion_op(LadderKind::Annihilate, Block::D, (int)b)}});
                }
            return;
        case 2:
            for (std::size_t a = 0; a < nd; ++a)
                for (std::size_t j = 0; j < np; ++j) {
                    const cplx g = swp[j] * pv.g2_dplus(m, ik, a, j);
                    if (g == cplx(0.0)) continue;
                    out.push_back({g,
                                   {fermion_op(LadderKind::Create, Block::D, (int)a),
                                    fermion_op(LadderKind::Annihilate, Block::Plus, (int)j)}});
                    out.push_back({g,
                                   {fermion_op(LadderKind::Create, Block::Plus, (int)j),
                                    fermion_op(LadderKind::Annihilate, Block::D, (int)a)}});
                }
            return;
        case 3:
            for (std::size_t a = 0; a < nd; ++a)
                for (std::size_t j = 0; j < nm; ++j) {
                    const cplx g = swm[j] * pv.g3_dminus(m, ik, a, j);
                    if (g == cplx(0.0)) continue;
                    out.push_back({g,
                                   {fermion_op(LadderKind::Create, Block::D, (int)a),
                                    fermion_op(LadderKind::Annihilate, Block::Minus, (int)j)}});
                    out.push_back({g,
                                   {fermion_op(LadderKind::Create, Block::Minus, (int)j),
                                    fermion_op(LadderKind::Annihilate, Block::D, (int)a)}});
                }
            return;
        case 4:
            for (std::size_t a = 0; a < np; ++a)
                for (std::size_t b = 0; b < nm; ++b) {
                    const cplx g = swp[a] * swm[b] * pv.g4_pm(m, ik, a, b);
                    if (g == cplx(0.0)) continue;
                    out.push_back({g,
                                   {fermion_op(LadderKind::Create, Block::Plus, (int)a),
                                    fermion_op(LadderKind::Create, Block::Minus, (int)b)}});
                    out.push_back({g,
                                   {fermion_op(LadderKind::Annihilate, Block::Minus, (int)b),
                                    fermion_op(LadderKind::Annihilate, Block::Plus, (int)a)}});
                }
            return;
        case 5:
            for (std::size_t a = 0; a < np; ++a)
                for (std::size_t b = 0; b < np; ++b) {
                    const cplx g = swp[a] * swp[b] * pv.g5_pp(m, ik, a, b);
                    if (g == cplx(0.0)) continue;
                    out.push_back({g,
                                   {fermion_op(LadderKind::Create, Block::Plus, (int)a),
                                    fermion_op(LadderKind::Annihilate, Block::Plus, (int)b)}});
                }
            return;
        case 6:
            for (std::size_t a = 0; a < nm; ++a)
                for (std::size_t b = 0; b < nm; ++b) {
                    const cplx g = swm[a] * swm[b] * pv.g6_mm(m, ik, a, b);
                    if (g == cplx(0.0)) continue;
                    out.push_back({g,
                                   {fermion_op(LadderKind::Create, Block::Minus, (int)a),
                                    fermion_op(LadderKind::Annihilate, Block::Minus, (int)b)}});
                }
            return;
    }
    throw std::out_of_range("build_vertex: family index must be 1..6");
}

} // namespace

SparseOperator build_vertex(const FockBasis& basis, const PhotonVertexKernels& pv, int i,
                            int mu, std::size_t ik) {
    std::vector<Monomial> monos;
    append_vertex_monomials(monos, basis, pv, i, mu, ik);
    std::ostringstream prov;
    prov << "v_" << i << "^" << mu << "(k#" << ik << ")";
    return build_from_monomials(basis, monos, prov.str());
}

SparseOperator build_HI1(const FockBasis& basis, const PhotonVertexKernels& pv) {
    const ModeTable& modes = basis.modes();
    const std::size_t nk = modes.photons.num_k();
    std::vector<Monomial> monos;
    for (std::size_t ik = 0; ik < nk; ++ik) {
        const double sw = std::sqrt(modes.photons.points[2 * ik].weight);
        for (int mu = 1; mu <= 2; ++mu) {
            std::vector<Monomial> fermionic;
            for (int i = 1; i <= 6; ++i) append_vertex_monomials(fermionic, basis, pv, i, mu, ik);
            const int photon_point = static_cast<int>(2 * ik) + (mu - 1);
            for (auto& mono : fermionic) {
                Monomial withPhoton = mono;
                withPhoton.coeff *= sw;
                withPhoton.ops.push_back(boson_op(LadderKind::Create, photon_point));
                monos.push_back(std::move(withPhoton));
            }
        }
    }
    SparseOperator op = build_from_monomials(basis, monos, "H_I^(1)", /*plus_adjoint=*/true);
    op.hermitian = true;
    return op;
}

SparseOperator build_HI1_creation_part(const FockBasis& basis,
                                       const PhotonVertexKernels& pv, int i, int mu) {
    const ModeTable& modes = basis.modes();
    const std::size_t nk = modes.photons.num_k();
    std::vector<Monomial> monos;
    for (std::size_t ik = 0; ik < nk; ++ik) {
        const double sw = std::sqrt(modes.photons.points[2 * ik].weight);
        std::vector<Monomial> fermionic;
        append_vertex_monomials(fermionic, basis, pv, i, mu, ik);
        const int photon_point = static_cast<int>(2 * ik) + (mu - 1);
        for (auto& mono : fermionic) {
            mono.coeff *= sw;
            mono.ops.push_back(boson_op(LadderKind::Create, photon_point));
            monos.push_back(std::move(mono));
        }
    }
    std::ostringstream prov;
    prov << "sum_k v_" << i << "^" << mu << "(k) (x) a*";
    return build_from_monomials(basis, monos, prov.str());
}

SparseOperator build_HI2(const FockBasis& basis, const CoulombKernels& ck) {
    const ModeTable& modes = basis.modes();
    const std::size_t ne = modes.n_electron_legs(), nm = modes.n_minus();
    const auto swe = sqrt_electron_leg_weights(modes);
    const auto swm = sqrt_weights(modes.minus);

    auto eop = [&](LadderKind k, std::size_t e) { return electron_leg_op(k, modes, e); };
    auto mop = [&](LadderKind k, std::size_t j) {
        return fermion_op(k, Block::Minus, static_cast<int>(j));
    };
    const auto CR = LadderKind::Create;
    const auto AN = LadderKind::Annihilate;

    std::vector<Monomial> self_adjoint; // F1, F2, F5 (hermitian via kernel constraints)
    std::vector<Monomial> with_partner; // F3, F4, F6 (conjugate partner = matrix adjoint)

    for (std::size_t a = 0; a < ne; ++a)
        for (std::size_t b = 0; b < nm; ++b)
            for (std::size_t c = 0; c < ne; ++c)
                for (std::size_t d = 0; d < nm; ++d) {
                    const cplx f = swe[a] * swm[b] * swe[c] * swm[d] * ck.f1(a, b, c, d);
                    if (f == cplx(0.0)) continue;
                    self_adjoint.push_back({f, {eop(CR, a), mop(CR, b), eop(AN, c), mop(AN, d)}});
                }

    for (std::size_t a = 0; a < ne; ++a)
        for (std::size_t b = 0; b < ne; ++b)
            for (std::size_t c = 0; c < ne; ++c)
                for (std::size_t d = 0; d < ne; ++d) {
                    const cplx f = swe[a] * swe[b] * swe[c] * swe[d] * ck.f2_plus(a, b, c, d);
                    if (f == cplx(0.0)) continue;
                    self_adjoint.push_back({f, {eop(CR, a), eop(CR, b), eop(AN, c), eop(AN, d)}});
                }
    for (std::size_t a = 0; a < nm; ++a)
        for (std::size_t b = 0; b < nm; ++b)
            for (std::size_t c = 0; c < nm; ++c)
                for (std::size_t d = 0; d < nm; ++d) {
                    const cplx f = swm[a] * swm[b] * swm[c] * swm[d] * ck.f2_minus(a, b, c, d);
                    if (f == cplx(0.0)) continue;
                    self_adjoint.push_back({f, {mop(CR, a), mop(CR, b), mop(AN, c), mop(AN, d)}});
                }

    for (std::size_t a = 0; a < ne; ++a)
        for (std::size_t b = 0; b < ne; ++b)
            for (std::size_t c = 0; c < nm; ++c) {
                for (std::size_t d = 0; d < ne; ++d) {
                    const cplx f3 = swe[a] * swe[b] * swm[c] * swe[d] * ck.f3_pm(a, b, c, d);
                    if (f3 != cplx(0.0))
                        with_partner.push_back(
                            {f3, {eop(CR, a), eop(AN, b), mop(AN, c), eop(AN, d)}});
                }
                for (std::size_t d = 0; d < nm; ++d) {
                    const cplx f4 = swe[a] * swe[b] * swm[c] * swm[d] * ck.f4(a, b, c, d);
                    if (f4 != cplx(0.0))
                        with_partner.push_back(
                            {f4, {eop(AN, a), eop(AN, b), mop(AN, c), mop(AN, d)}});
                }
            }
    for (std::size_t a = 0; a < nm; ++a)
        for (std::size_t b = 0; b < nm; ++b)
            for (std::size_t c = 0; c < ne; ++c)
                for (std::size_t d = 0; d < nm; ++d) {
                    const cplx f = swm[a] * swm[b] * swe[c] * swm[d] * ck.f3_mp(a, b, c, d);
                    if (f == cplx(0.0)) continue;
                    with_partner.push_back({f, {mop(CR, a), mop(AN, b), eop(AN, c), mop(AN, d)}});
                }

    for (std::size_t a = 0; a < ne; ++a)
        for (std::size_t b = 0; b < ne; ++b) {
            const cplx f = swe[a] * swe[b] * ck.f5_plus(a, b);
            if (f == cplx(0.0)) continue;
            self_adjoint.push_back({f, {eop(CR, a), eop(AN, b)}});
        }
    for (std::size_t a = 0; a < nm; ++a)
        for (std::size_t b = 0; b < nm; ++b) {
            const cplx f = swm[a] * swm[b] * ck.f5_minus(a, b);
            if (f == cplx(0.0)) continue;
            self_adjoint.push_back({f, {mop(CR, a), mop(AN, b)}});
        }

    for (std::size_t a = 0; a < ne; ++a)
        for (std::size_t b = 0; b < nm; ++b) {
            const cplx f = swe[a] * swm[b] * ck.f6_pm(a, b);
            if (f == cplx(0.0)) continue;
            with_partner.push_back({f, {eop(CR, a), mop(CR, b)}});
        }
    for (std::size_t a = 0; a < nm; ++a)
        for (std::size_t b = 0; b < ne; ++b) {
            const cplx f = swm[a] * swe[b] * ck.f6_mp(a, b);
            if (f == cplx(0.0)) continue;
            with_partner.push_back({f, {mop(CR, a), eop(CR, b)}});
        }

    SparseOperator part1 = build_from_monomials(basis, self_adjoint, "H_I^(2):F1,F2,F5");
    SparseOperator part2 =
        build_from_monomials(basis, with_partner, "H_I^(2):F3,F4,F6", /*plus_adjoint=*/true);
    SparseOperator op = operator_sum(part1, part2, 1.0, 1.0, "H_I^(2)");
    op.hermitian = true;
    const double dev = op.hermiticity_deviation();
    double scale = 0.0;
    for (int k = 0; k < op.matrix.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(op.matrix, k); it; ++it)
            scale = std::max(scale, std::abs(it.value()));
    if (dev > 1e-12 * std::max(1.0, scale))
        throw symmetry_error(
            "build_HI2: assembled operator is not hermitian; the F kernels satisfy the "
            "literal reversal constraint but not its conjugated form");
    return op;
}

SparseOperator build_total(const FockBasis& basis, const KernelSet& ks,
                           const PhysicalParams& params, const TotalOptions& opts) {
    const ModeTable& modes = basis.modes();
    FreeOperators free_ops = build_free(basis);

    PhotonVertexKernels pv = opts.m > 0.0 ? infrared_truncate(ks.vertex, modes, opts.m)
                                          : ks.vertex;
    std::vector<double> h0diag;
    if (opts.eps_average) {
        pv = epsilon_average(pv, modes, opts.eps);
        if (opts.m > 0.0) pv = infrared_truncate(pv, modes, opts.m); // keep s-modes untouched
        auto dg = dgamma_hd_diagonal(basis);
        auto hp = hph_diagonal_eps(basis, opts.eps, opts.m);
        for (std::size_t i = 0; i < dg.size(); ++i) dg[i] += hp[i];
        h0diag = std::move(dg);
    }

    SparseOperator hi1 = build_HI1(basis, pv);
    SparseOperator hi2 = build_HI2(basis, ks.coulomb);

    std::ostringstream prov;
    prov << "H(g1=" << params.g1 << ",g2=" << params.g2 << ",m=" << opts.m
         << (opts.eps_average ? ",eps-avg" : "") << ")";

    SparseOperator h0 = opts.eps_average ? diagonal_operator(h0diag, "H0^eps")
                                         : std::move(free_ops.h0);
    SparseOperator sum = operator_sum(h0, hi1, 1.0, params.g1, "H0+g1*HI1");
    SparseOperator total = operator_sum(sum, hi2, 1.0, params.g2, prov.str());
    total.hermitian = true;
    return total;
}

void dump_matrix(const std::filesystem::path& file, const SparseOperator& op) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("dump_matrix: cannot open " + file.string());
    out << op.dim() << ' ' << op.nnz() << ' ' << (op.hermitian ? 1 : 0) << '\n';
    char buf[80];
    for (int k = 0; k < op.matrix.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(op.matrix, k); it; ++it) {
            std::snprintf(buf, sizeof buf, "%ld %ld %.17g %.17g\n",
                          static_cast<long>(it.row()), static_cast<long>(it.col()),
                          it.value().real(), it.value().imag());
            out << buf;
        }
}

SparseOperator load_matrix(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("load_matrix: cannot open " + file.string());
    std::size_t dim = 0, nnz = 0;
    int herm = 0;
    in >> dim >> nnz >> herm;
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(nnz);
    for (std::size_t i = 0; i < nnz; ++i) {
        long r = 0, c = 0;
        double re = 0, im = 0;
        in >> r >> c >> re >> im;
        trips.emplace_back(static_cast<int>(r), static_cast<int>(c), cplx(re, im));
    }
    if (!in) throw std::runtime_error("load_matrix: truncated file " + file.string());
    SparseOperator op;
    op.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    op.matrix.setFromTriplets(trips.begin(), trips.end());
    op.hermitian = herm != 0;
    op.provenance = "loaded:" + file.string();
    return op;
}

} // namespace qedcut
