#include "qedcut/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace qedcut {

Tensor& PhotonVertexKernels::family(int i) {
    switch (i) {
        case 1: return g1_dd;
        case 2: return g2_dplus;
        case 3: return g3_dminus;
        case 4: return g4_pm;
        case 5: return g5_pp;
        case 6: return g6_mm;
    }
    throw std::out_of_range("PhotonVertexKernels: family index must be 1..6");
}
const Tensor& PhotonVertexKernels::family(int i) const {
    return const_cast<PhotonVertexKernels*>(this)->family(i);
}

PhotonVertexKernels PhotonVertexKernels::zeros(const ModeTable& modes) {
    const std::size_t nk = modes.photons.num_k();
    const std::size_t nd = modes.n_d(), np = modes.n_plus(), nm = modes.n_minus();
    PhotonVertexKernels pv;
    pv.g1_dd = Tensor({2, nk, nd, nd});
    pv.g2_dplus = Tensor({2, nk, nd, np});
    pv.g3_dminus = Tensor({2, nk, nd, nm});
    pv.g4_pm = Tensor({2, nk, np, nm});
    pv.g5_pp = Tensor({2, nk, np, np});
    pv.g6_mm = Tensor({2, nk, nm, nm});
    return pv;
}

CoulombKernels CoulombKernels::zeros(const ModeTable& modes) {
    const std::size_t ne = modes.n_electron_legs(), npo = modes.n_minus();
    CoulombKernels ck;
    ck.f1 = Tensor({ne, npo, ne, npo});
    ck.f2_plus = Tensor({ne, ne, ne, ne});
    ck.f2_minus = Tensor({npo, npo, npo, npo});
    ck.f3_pm = Tensor({ne, ne, npo, ne});
    ck.f3_mp = Tensor({npo, npo, ne, npo});
    ck.f4 = Tensor({ne, ne, npo, npo});
    ck.f5_plus = Tensor({ne, ne});
    ck.f5_minus = Tensor({npo, npo});
    ck.f6_pm = Tensor({ne, npo});
    ck.f6_mp = Tensor({npo, ne});
    return ck;
}

namespace {

Tensor permuted(const Tensor& g, const std::vector<std::size_t>& perm) {
    // out(i_0..i_{r-1}) = g(i_{perm[0]}, .., i_{perm[r-1]})
    const auto& shp = g.shape();
    std::vector<std::size_t> oshape(shp.size());
    for (std::size_t s = 0; s < shp.size(); ++s) oshape[s] = shp[perm[s]];
    Tensor out(oshape);
    const std::size_t r = shp.size();
    std::vector<std::size_t> ix(r, 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        std::size_t rem = flat;
        for (std::size_t s = 0; s < r; ++s) {
            ix[s] = rem / out.stride(s);
            rem %= out.stride(s);
        }
        std::size_t goff = 0;
        for (std::size_t s = 0; s < r; ++s) goff += ix[s] * g.stride(perm[s]);
        out.data()[flat] = g.data()[goff];
    }
    return out;
}

void check_square(const Tensor& g, const char* what) {
    const auto& s = g.shape();
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] != s[0]) throw std::invalid_argument(std::string(what) + ": tensor must be square");
}

double max_abs_diff(const Tensor& a, const Tensor& b, bool conj_b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const cplx bv = conj_b ? std::conj(b.data()[i]) : b.data()[i];
        m = std::max(m, std::abs(a.data()[i] - bv));
    }
    return m;
}

void symmetrize_with(Tensor& g, const Tensor& partner, bool conj_partner) {
    for (std::size_t i = 0; i < g.size(); ++i) {
        const cplx pv = conj_partner ? std::conj(partner.data()[i]) : partner.data()[i];
        g.data()[i] = 0.5 * (g.data()[i] + pv);
    }
}

} // namespace

Tensor antisymmetrize_pair(const Tensor& g) {
    if (g.rank() != 2) throw std::invalid_argument("antisymmetrize_pair: rank-2 tensor required");
    check_square(g, "antisymmetrize_pair");
    Tensor t = permuted(g, {1, 0});
    Tensor out = g;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= t.data()[i];
    return out;
}

Tensor antisymmetrize_triple(const Tensor& g) {
    if (g.rank() != 3) throw std::invalid_argument("antisymmetrize_triple: rank-3 tensor required");
    if (g.shape()[0] != g.shape()[2])
        throw std::invalid_argument("antisymmetrize_triple: slots 1 and 3 must match");
    Tensor t = permuted(g, {2, 1, 0});
    Tensor out = g;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= t.data()[i];
    return out;
}

Tensor antisymmetrize_double(const Tensor& g, DoubleAntisymMode mode) {
    if (g.rank() != 4) throw std::invalid_argument("antisymmetrize_double: rank-4 tensor required");
    const auto& s = g.shape();
    auto need = [&](std::size_t a, std::size_t b) {
        if (s[a] != s[b])
            throw std::invalid_argument("antisymmetrize_double: swapped slots must match");
    };
    Tensor out = g;
    switch (mode) {
        case DoubleAntisymMode::Pairs1234:
        case DoubleAntisymMode::CoulombF4: {
            need(0, 1);
            need(2, 3);
            Tensor a = permuted(g, {0, 1, 3, 2});
            Tensor b = permuted(g, {1, 0, 2, 3});
            Tensor c = permuted(g, {1, 0, 3, 2});
            for (std::size_t i = 0; i < out.size(); ++i)
                out.data()[i] = g.data()[i] - a.data()[i] - b.data()[i] + c.data()[i];
            return out;
        }
        case DoubleAntisymMode::CoulombF2: {
            need(2, 3);
            Tensor a = permuted(g, {0, 1, 3, 2});
            for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= a.data()[i];
            return out;
        }
        case DoubleAntisymMode::CoulombF3: {
            need(1, 3);
            Tensor a = permuted(g, {0, 3, 2, 1});
            for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= a.data()[i];
            return out;
        }
    }
    throw std::invalid_argument("antisymmetrize_double: unknown mode");
}

void enforce_coulomb_symmetries(CoulombKernels& ck, SymmetryPolicy policy, double tol) {
    struct Rule {
        Tensor* t;
        std::vector<std::size_t> perm;
        bool conj;
        const char* name;
    };
    Rule rules[] = {
        {&ck.f1, {2, 3, 0, 1}, true, "f1: F(1,2,3,4) = conj F(3,4,1,2)"},
        {&ck.f2_plus, {3, 2, 1, 0}, false, "f2_plus: F(1,2,3,4) = F(4,3,2,1)"},
        {&ck.f2_minus, {3, 2, 1, 0}, false, "f2_minus: F(1,2,3,4) = F(4,3,2,1)"},
        {&ck.f5_plus, {1, 0}, true, "f5_plus: F(1,2) = conj F(2,1)"},
        {&ck.f5_minus, {1, 0}, true, "f5_minus: F(1,2) = conj F(2,1)"},
    };
    for (auto& r : rules) {
        if (r.t->empty()) continue;
        Tensor p = permuted(*r.t, r.perm);
        const double dev = max_abs_diff(*r.t, p, r.conj);
        if (dev > tol) {
            if (policy == SymmetryPolicy::Strict)
                throw symmetry_error(std::string("coulomb kernel symmetry violated, ") + r.name +
                                     ", max deviation " + std::to_string(dev));
            symmetrize_with(*r.t, p, r.conj);
        }
    }
}

double weighted_l2(const Tensor& t, std::span<const std::vector<double>> leg_weights) {
    if (leg_weights.size() != t.rank())
        throw std::invalid_argument("weighted_l2: one weight vector per tensor slot required");
    for (std::size_t s = 0; s < t.rank(); ++s)
        if (leg_weights[s].size() != t.shape()[s])
            throw std::invalid_argument("weighted_l2: weight length mismatch");
    const std::size_t r = t.rank();
    double acc = 0.0;
    std::vector<std::size_t> ix(r, 0);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        std::size_t rem = flat;
        double w = 1.0;
        for (std::size_t s = 0; s < r; ++s) {
            ix[s] = rem / t.stride(s);
            rem %= t.stride(s);
            w *= leg_weights[s][ix[s]];
        }
        acc += w * std::norm(t.data()[flat]);
    }
    return std::sqrt(acc);
}

std::vector<double> electron_leg_weights(const ModeTable& modes) {
    std::vector<double> w(modes.n_electron_legs(), 1.0);
    for (std::size_t j = 0; j < modes.n_plus(); ++j)
        w[modes.n_d() + j] = modes.plus.points[j].weight;
    return w;
}

std::vector<double> positron_leg_weights(const ModeTable& modes) {
    std::vector<double> w(modes.n_minus(), 1.0);
    for (std::size_t j = 0; j < modes.n_minus(); ++j) w[j] = modes.minus.points[j].weight;
    return w;
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

namespace {

// Quadrature-weighted sum over all fermion legs of |G(mu,ik,...)|^2.
double family_leg_sum(const Tensor& t, std::size_t mu, std::size_t ik,
                      const std::vector<double>& w2, const std::vector<double>& w3) {
    const std::size_t n2 = t.shape()[2], n3 = t.shape()[3];
    double acc = 0.0;
    const std::size_t base = mu * t.stride(0) + ik * t.stride(1);
    for (std::size_t a = 0; a < n2; ++a)
        for (std::size_t b = 0; b < n3; ++b)
            acc += w2[a] * w3[b] * std::norm(t.data()[base + a * t.stride(2) + b]);
    return acc;
}

struct FamilyWeights {
    std::vector<double> slot2, slot3;
};

std::array<FamilyWeights, 7> family_weights(const ModeTable& modes) {
    std::array<FamilyWeights, 7> fw; // 1-based
    std::vector<double> wd = ones(modes.n_d());
    std::vector<double> wp(modes.n_plus()), wm(modes.n_minus());
    for (std::size_t j = 0; j < wp.size(); ++j) wp[j] = modes.plus.points[j].weight;
    for (std::size_t j = 0; j < wm.size(); ++j) wm[j] = modes.minus.points[j].weight;
    fw[1] = {wd, wd};
    fw[2] = {wd, wp};
    fw[3] = {wd, wm};
    fw[4] = {wp, wm};
    fw[5] = {wp, wp};
    fw[6] = {wm, wm};
    return fw;
}

bool family_nonzero_at_k(const PhotonVertexKernels& pv, std::size_t ik) {
    for (int i = 1; i <= 6; ++i) {
        const Tensor& t = pv.family(i);
        if (t.empty()) continue;
        for (std::size_t mu = 0; mu < 2; ++mu) {
            const std::size_t base = mu * t.stride(0) + ik * t.stride(1);
            const std::size_t block = t.stride(1);
            for (std::size_t o = 0; o < block; ++o)
                if (t.data()[base + o] != cplx(0.0, 0.0)) return true;
        }
    }
    return false;
}

} // namespace

double compute_cbeta(const PhotonVertexKernels& pv, const ModeTable& modes, int beta) {
    if (beta < 0 || beta > 2) throw std::invalid_argument("compute_cbeta: beta must be 0, 1 or 2");
    const auto fw = family_weights(modes);
    const std::size_t nk = modes.photons.num_k();
    if (beta > 0) {
        for (std::size_t ik = 0; ik < nk; ++ik)
            if (modes.photons.energies[2 * ik] == 0.0 && family_nonzero_at_k(pv, ik))
                throw infrared_error(
                    "compute_cbeta: omega^-beta evaluated at omega = 0 with nonzero kernel");
    }
    // Three-line grouping of C_beta: family 1; families 2,3 (eps = +,-);
    // families 5,4,6 (r = {+,+},{+,-},{-,-}), each per polarization.
    const int line_groups[3][3] = {{1, 0, 0}, {2, 3, 0}, {5, 4, 6}};
    double total = 0.0;
    for (const auto& group : line_groups) {
        for (int fam : group) {
            if (fam == 0) continue;
            const Tensor& t = pv.family(fam);
            if (t.empty()) continue;
            for (std::size_t mu = 0; mu < 2; ++mu) {
                double acc = 0.0;
                for (std::size_t ik = 0; ik < nk; ++ik) {
                    const double w = modes.photons.points[2 * ik].weight;
                    const double om = modes.photons.energies[2 * ik];
                    const double ls = family_leg_sum(t, mu, ik, fw[fam].slot2, fw[fam].slot3);
                    if (ls == 0.0) continue;
                    acc += w * ls * (beta == 0 ? 1.0 : std::pow(om, -beta));
                }
                total += std::sqrt(acc);
            }
        }
    }
    return total;
}

double compute_gk_squared(const PhotonVertexKernels& pv, const ModeTable& modes,
                          std::size_t ik) {
    const auto fw = family_weights(modes);
    double acc = 0.0;
    const double factors[7] = {0, 1, 4, 4, 4, 1, 1};
    for (int fam = 1; fam <= 6; ++fam) {
        const Tensor& t = pv.family(fam);
        if (t.empty()) continue;
        for (std::size_t mu = 0; mu < 2; ++mu)
            acc += factors[fam] * family_leg_sum(t, mu, ik, fw[fam].slot2, fw[fam].slot3);
    }
    return acc;
}

KernelConstants compute_constants(const KernelSet& ks, const ModeTable& modes) {
    KernelConstants out;
    for (int b = 0; b <= 2; ++b) out.c_beta[b] = compute_cbeta(ks.vertex, modes, b);

    const auto we = electron_leg_weights(modes);
    const auto wp = positron_leg_weights(modes);
    auto norm4 = [&](const Tensor& t, std::array<const std::vector<double>*, 4> w) {
        if (t.empty()) return 0.0;
        std::vector<std::vector<double>> lw{*w[0], *w[1], *w[2], *w[3]};
        return weighted_l2(t, lw);
    };
    auto norm2 = [&](const Tensor& t, std::array<const std::vector<double>*, 2> w) {
        if (t.empty()) return 0.0;
        std::vector<std::vector<double>> lw{*w[0], *w[1]};
        return weighted_l2(t, lw);
    };

    const auto& ck = ks.coulomb;
    out.f1 = norm4(ck.f1, {&we, &wp, &we, &wp});
    out.f2a_plus = norm4(antisymmetrize_double(ck.f2_plus, DoubleAntisymMode::CoulombF2),
                         {&we, &we, &we, &we});
    out.f2a_minus = norm4(antisymmetrize_double(ck.f2_minus, DoubleAntisymMode::CoulombF2),
                          {&wp, &wp, &wp, &wp});
    out.f3a_pm = norm4(antisymmetrize_double(ck.f3_pm, DoubleAntisymMode::CoulombF3),
                       {&we, &we, &wp, &we});
    out.f3a_mp = norm4(antisymmetrize_double(ck.f3_mp, DoubleAntisymMode::CoulombF3),
                       {&wp, &wp, &we, &wp});
    out.f4 = norm4(ck.f4, {&we, &we, &wp, &wp});
    out.f4aa = norm4(antisymmetrize_double(ck.f4, DoubleAntisymMode::CoulombF4),
                     {&we, &we, &wp, &wp});
    out.f5_plus = norm2(ck.f5_plus, {&we, &we});
    out.f5_minus = norm2(ck.f5_minus, {&wp, &wp});
    out.f6_pm = norm2(ck.f6_pm, {&we, &wp});
    out.f6_mp = norm2(ck.f6_mp, {&wp, &we});

    out.g_of_k_sq.resize(modes.photons.num_k());
    for (std::size_t ik = 0; ik < out.g_of_k_sq.size(); ++ik)
        out.g_of_k_sq[ik] = compute_gk_squared(ks.vertex, modes, ik);
    return out;
}

Condition4Result check_condition4(const KernelConstants& consts, double e0, double g1,
                                  double g2) {
    if (!(e0 > 0.0)) throw domain_error("check_condition4: E0 must be > 0");
    Condition4Result r;
    r.lhs = std::abs(g1) / std::sqrt(e0) * consts.c_beta[1] +
            std::abs(g2) / e0 *
                (consts.f1 / std::sqrt(2.0) + consts.f2a_plus + consts.f2a_minus);
    r.margin = 1.0 - r.lhs;
    r.pass = r.lhs < 1.0;
    return r;
}

PhotonVertexKernels infrared_truncate(const PhotonVertexKernels& pv,
                                      const ModeTable& modes, double m) {
    if (m < 0.0) throw domain_error("infrared_truncate: m must be >= 0");
    PhotonVertexKernels out = pv;
    const std::size_t nk = modes.photons.num_k();
    for (int fam = 1; fam <= 6; ++fam) {
        Tensor& t = out.family(fam);
        if (t.empty()) continue;
        for (std::size_t ik = 0; ik < nk; ++ik) {
            if (modes.photons.energies[2 * ik] >= m) continue;
            for (std::size_t mu = 0; mu < 2; ++mu) {
                const std::size_t base = mu * t.stride(0) + ik * t.stride(1);
                std::fill_n(t.data().begin() + base, t.stride(1), cplx(0.0, 0.0));
            }
        }
    }
    return out;
}

std::array<long long, 3> epsilon_cube(const std::array<double, 3>& k, double eps) {
    std::array<long long, 3> n;
    for (int i = 0; i < 3; ++i) n[i] = std::llround(k[i] / eps);
    return n;
}

namespace {

void check_alignment(const PhotonGrid& grid, double eps) {
    if (!(eps > 0.0)) throw alignment_error("epsilon_average: eps must be > 0");
    if (grid.cell_side <= 0.0) return;
    const double ratio = eps / grid.cell_side;
    if (std::abs(ratio - std::llround(ratio)) > 1e-9 * std::max(1.0, ratio))
        throw alignment_error("epsilon_average: eps is not an integer multiple of the grid spacing");
}

struct CubeKey {
    long long x, y, z;
    int mu;
    bool operator==(const CubeKey&) const = default;
};
struct CubeKeyHash {
    std::size_t operator()(const CubeKey& c) const {
        std::size_t h = std::hash<long long>{}(c.x);
        h = h * 1000003 + std::hash<long long>{}(c.y);
        h = h * 1000003 + std::hash<long long>{}(c.z);
        h = h * 1000003 + c.mu;
        return h;
    }
};

} // namespace

std::vector<cplx> epsilon_average(const PhotonGrid& grid, double eps,
                                  std::span<const cplx> values) {
    if (values.size() != grid.size())
        throw std::invalid_argument("epsilon_average: one value per photon grid point required");
    check_alignment(grid, eps);
    std::unordered_map<CubeKey, std::pair<cplx, std::size_t>, CubeKeyHash> acc;
    std::vector<CubeKey> keys(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto n = epsilon_cube(grid.points[i].k, eps);
        keys[i] = CubeKey{n[0], n[1], n[2], grid.points[i].mu};
        auto& slot = acc[keys[i]];
        slot.first += values[i];
        slot.second += 1;
    }
    std::vector<cplx> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& slot = acc[keys[i]];
        out[i] = slot.first / static_cast<double>(slot.second);
    }
    return out;
}

std::vector<double> epsilon_average(const PhotonGrid& grid, double eps,
                                    std::span<const double> values) {
    std::vector<cplx> cv(values.begin(), values.end());
    auto avg = epsilon_average(grid, eps, cv);
    std::vector<double> out(avg.size());
    for (std::size_t i = 0; i < avg.size(); ++i) out[i] = avg[i].real();
    return out;
}

PhotonVertexKernels epsilon_average(const PhotonVertexKernels& pv, const ModeTable& modes,
                                    double eps) {
    check_alignment(modes.photons, eps);
    const std::size_t nk = modes.photons.num_k();
    // Group distinct k points by cube (polarization handled per slice index mu).
    std::unordered_map<CubeKey, std::vector<std::size_t>, CubeKeyHash> cubes;
    for (std::size_t ik = 0; ik < nk; ++ik) {
        const auto n = epsilon_cube(modes.photons.points[2 * ik].k, eps);
        cubes[CubeKey{n[0], n[1], n[2], 0}].push_back(ik);
    }
    PhotonVertexKernels out = pv;
    for (int fam = 1; fam <= 6; ++fam) {
        Tensor& t = out.family(fam);
        if (t.empty()) continue;
        const Tensor& src = pv.family(fam);
        const std::size_t block = t.stride(1);
        for (std::size_t mu = 0; mu < 2; ++mu) {
            for (const auto& [key, iks] : cubes) {
                for (std::size_t o = 0; o < block; ++o) {
                    cplx mean(0.0, 0.0);
                    for (std::size_t ik : iks)
                        mean += src.data()[mu * src.stride(0) + ik * src.stride(1) + o];
                    mean /= static_cast<double>(iks.size());
                    for (std::size_t ik : iks)
                        t.data()[mu * t.stride(0) + ik * t.stride(1) + o] = mean;
                }
            }
        }
    }
    return out;
}

namespace {

double leg_profile_d(const ModeTable& modes, std::size_t a) {
    return 1.0 / (1.0 + modes.d_modes[a].energy + 0.3 * modes.d_modes[a].gamma_id);
}
double leg_profile_c(double p) { return std::exp(-0.5 * p * p) / (1.0 + p); }
double leg_profile_c2(double p) { return p * std::exp(-p); }

double electron_profile(const ModeTable& modes, std::size_t e, bool alt) {
    if (e < modes.n_d())
        return alt ? 0.7 * leg_profile_d(modes, e) + 0.2 : leg_profile_d(modes, e);
    const double p = modes.plus.points[e - modes.n_d()].p;
    return alt ? leg_profile_c2(p) : leg_profile_c(p);
}
double positron_profile(const ModeTable& modes, std::size_t j, bool alt) {
    const double p = modes.minus.points[j].p;
    return alt ? leg_profile_c2(p) : leg_profile_c(p);
}

} // namespace

KernelSet synthetic_kernels(const ModeTable& modes, const SyntheticSpec& spec) {
    KernelSet ks;
    ks.vertex = PhotonVertexKernels::zeros(modes);
    ks.coulomb = CoulombKernels::zeros(modes);

    const std::size_t nk = modes.photons.num_k();
    const std::size_t nd = modes.n_d(), np = modes.n_plus(), nm = modes.n_minus();

    std::vector<double> ud(nd), up(np), um(nm);
    for (std::size_t a = 0; a < nd; ++a) ud[a] = leg_profile_d(modes, a);
    for (std::size_t j = 0; j < np; ++j) up[j] = leg_profile_c(modes.plus.points[j].p);
    for (std::size_t j = 0; j < nm; ++j) um[j] = leg_profile_c(modes.minus.points[j].p);

    for (std::size_t ik = 0; ik < nk; ++ik) {
        const double om = modes.photons.energies[2 * ik];
        if (om == 0.0) continue; // infrared regularization: kernels vanish at omega = 0
        const auto& k = modes.photons.points[2 * ik].k;
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        const double chi = std::pow(om, spec.ir_power) *
                           std::exp(-k2 / (2.0 * spec.uv_sigma * spec.uv_sigma));
        const double envelope = chi / std::sqrt(om);
        for (std::size_t mu = 0; mu < 2; ++mu) {
            const double pol = mu == 0 ? 1.0 : 0.7;
            const double base = pol * envelope;
            for (std::size_t a = 0; a < nd; ++a)
                for (std::size_t b = 0; b < nd; ++b)
                    ks.vertex.g1_dd(mu, ik, a, b) = spec.vertex_amp[0] * base * ud[a] * ud[b];
            for (std::size_t a = 0; a < nd; ++a)
                for (std::size_t j = 0; j < np; ++j)
                    ks.vertex.g2_dplus(mu, ik, a, j) = spec.vertex_amp[1] * base * ud[a] * up[j];
            for (std::size_t a = 0; a < nd; ++a)
                for (std::size_t j = 0; j < nm; ++j)
                    ks.vertex.g3_dminus(mu, ik, a, j) = spec.vertex_amp[2] * base * ud[a] * um[j];
            for (std::size_t i = 0; i < np; ++i)
                for (std::size_t j = 0; j < nm; ++j)
                    ks.vertex.g4_pm(mu, ik, i, j) = spec.vertex_amp[3] * base * up[i] * um[j];
            for (std::size_t i = 0; i < np; ++i)
                for (std::size_t j = 0; j < np; ++j)
                    ks.vertex.g5_pp(mu, ik, i, j) = spec.vertex_amp[4] * base * up[i] * up[j];
            for (std::size_t i = 0; i < nm; ++i)
                for (std::size_t j = 0; j < nm; ++j)
                    ks.vertex.g6_mm(mu, ik, i, j) = spec.vertex_amp[5] * base * um[i] * um[j];
        }
    }

    const std::size_t ne = modes.n_electron_legs();
    std::vector<double> ve(ne), we_(ne), vp(nm), wp_(nm);
    for (std::size_t e = 0; e < ne; ++e) {
        ve[e] = electron_profile(modes, e, false);
        we_[e] = electron_profile(modes, e, true);
    }
    for (std::size_t j = 0; j < nm; ++j) {
        vp[j] = positron_profile(modes, j, false);
        wp_[j] = positron_profile(modes, j, true);
    }

    auto& ck = ks.coulomb;
    for (std::size_t a = 0; a < ne; ++a)
        for (std::size_t b = 0; b < nm; ++b)
            for (std::size_t c = 0; c < ne; ++c)
                for (std::size_t d = 0; d < nm; ++d)
                    ck.f1(a, b, c, d) = spec.f1_amp * ve[a] * vp[b] * ve[c] * vp[d];

    // reversal-symmetric but not (3<->4)-symmetric, so F^{(2),a} != 0
    for (std::size_t a = 0; a < ne; ++a)
        for (std::size_t b = 0; b < ne; ++b)
            for (std::size_t c = 0; c < ne; ++c)
                for (std::size_t d = 0; d < ne; ++d)
                    ck.f2_plus(a, b, c, d) = spec.f2_amp * (we_[a] * ve[b] * ve[c] * we_[d] +
                                                            ve[a] * we_[b] * we_[c] * ve[d]);
    for (std::size_t a = 0; a < nm; ++a)
        for (std::size_t b = 0; b < nm; ++b)
            for (std::size_t c = 0; c < nm; ++c)
                for (std::size_t d = 0; d < nm; ++d)
                    ck.f2_minus(a, b, c, d) = spec.f2_amp * (wp_[a] * vp[b] * vp[c] * wp_[d] +
                                                             vp[a] * wp_[b] * wp_[c] * vp[d]);

    for (std::size_t a = 0; a < ne; ++a)
        for (std::size_t b = 0; b < ne; ++b)
            for (std::size_t c = 0; c < nm; ++c) {
                for (std::size_t d = 0; d < ne; ++d)
                    ck.f3_pm(a, b, c, d) = spec.f3_amp * ve[a] * we_[b] * vp[c] * ve[d];
                for (std::size_t d = 0; d < nm; ++d)
                    ck.f4(a, b, c, d) = spec.f4_amp * ve[a] * we_[b] * wp_[c] * vp[d];
            }
    for (std::size_t a = 0; a < nm; ++a)
        for (std::size_t b = 0; b < nm; ++b)
            for (std::size_t c = 0; c < ne; ++c)
                for (std::size_t d = 0; d < nm; ++d)
                    ck.f3_mp(a, b, c, d) = spec.f3_amp * vp[a] * wp_[b] * ve[c] * vp[d];

    for (std::size_t a = 0; a < ne; ++a)
        for (std::size_t b = 0; b < ne; ++b)
            ck.f5_plus(a, b) = spec.f5_amp * (ve[a] * ve[b] + we_[a] * we_[b]);
    for (std::size_t a = 0; a < nm; ++a)
        for (std::size_t b = 0; b < nm; ++b)
            ck.f5_minus(a, b) = spec.f5_amp * (vp[a] * vp[b] + wp_[a] * wp_[b]);
    for (std::size_t a = 0; a < ne; ++a)
        for (std::size_t b = 0; b < nm; ++b)
            ck.f6_pm(a, b) = spec.f6_amp * ve[a] * wp_[b];
    for (std::size_t a = 0; a < nm; ++a)
        for (std::size_t b = 0; b < ne; ++b)
            ck.f6_mp(a, b) = spec.f6_amp * vp[a] * we_[b];

    enforce_coulomb_symmetries(ks.coulomb, SymmetryPolicy::Strict);
    return ks;
}

} // namespace qedcut
