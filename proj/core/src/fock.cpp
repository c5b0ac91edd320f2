#include "qedcut/fock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qedcut {

std::size_t FockStateHash::operator()(const FockState& s) const {
    std::size_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ull;
    };
    mix(s.d_occ);
    mix(s.plus_occ);
    mix(s.minus_occ);
    std::uint64_t acc = 0xabcdefull;
    for (auto o : s.ph_occ) acc = acc * 131 + o + 7;
    mix(acc);
    return h;
}

namespace {

bool canonical_less(const FockState& a, const FockState& b) {
    const int fa = a.n_fermions(), fb = b.n_fermions();
    if (fa != fb) return fa < fb;
    const int pa = a.n_photons(), pb = b.n_photons();
    if (pa != pb) return pa < pb;
    if (a.d_occ != b.d_occ) return a.d_occ < b.d_occ;
    if (a.plus_occ != b.plus_occ) return a.plus_occ < b.plus_occ;
    if (a.minus_occ != b.minus_occ) return a.minus_occ < b.minus_occ;
    return a.ph_occ < b.ph_occ;
}

void enumerate_photon_vectors(std::size_t n_modes, int per_mode, int total,
                              std::vector<std::vector<std::uint8_t>>& out) {
    std::vector<std::uint8_t> occ(n_modes, 0);
    // depth-first over modes with a running total
    std::vector<std::vector<std::uint8_t>> result;
    std::function<void(std::size_t, int)> rec = [&](std::size_t mode, int used) {
        if (mode == n_modes) {
            result.push_back(occ);
            return;
        }
        for (int v = 0; v <= per_mode && used + v <= total; ++v) {
            occ[mode] = static_cast<std::uint8_t>(v);
            rec(mode + 1, used + v);
        }
        occ[mode] = 0;
    };
    if (n_modes == 0) {
        result.push_back({});
    } else {
        rec(0, 0);
    }
    out = std::move(result);
}

} // namespace

FockBasis FockBasis::enumerate(const ModeTable& modes, const TruncationCaps& caps) {
    const std::size_t nd = modes.n_d(), np = modes.n_plus(), nm = modes.n_minus();
    if (nd > 64 || np > 64 || nm > 64)
        throw resource_error("FockBasis: more than 64 modes in a fermionic block");
    const int total_modes = static_cast<int>(nd + np + nm);
    const int fcap = caps.max_fermions < 0 ? total_modes
                                           : std::min(caps.max_fermions, total_modes);

    std::vector<std::vector<std::uint8_t>> photon_vectors;
    enumerate_photon_vectors(modes.n_photon(), caps.max_per_mode,
                             caps.max_photons_total, photon_vectors);

    // Quick overflow estimate before materializing anything.
    double est = static_cast<double>(photon_vectors.size());
    est *= std::pow(2.0, static_cast<double>(total_modes));
    if (est > 64.0 * static_cast<double>(caps.max_basis) && fcap == total_modes)
        throw resource_error("FockBasis: estimated basis size exceeds configured maximum");

    FockBasis basis;
    basis.modes_ = &modes;
    basis.caps_ = caps;
    basis.caps_.max_fermions = fcap;

    const std::uint64_t dlim = nd == 64 ? ~0ull : ((1ull << nd) - 1);
    const std::uint64_t plim = np == 64 ? ~0ull : ((1ull << np) - 1);
    const std::uint64_t mlim = nm == 64 ? ~0ull : ((1ull << nm) - 1);
    for (std::uint64_t d = 0;; ++d) {
        if (__builtin_popcountll(d) <= fcap) {
            for (std::uint64_t p = 0;; ++p) {
                const int qd = __builtin_popcountll(d) + __builtin_popcountll(p);
                if (qd <= fcap) {
                    for (std::uint64_t m = 0;; ++m) {
                        if (qd + __builtin_popcountll(m) <= fcap) {
                            for (const auto& ph : photon_vectors) {
                                FockState s;
                                s.d_occ = d;
                                s.plus_occ = p;
                                s.minus_occ = m;
                                s.ph_occ = ph;
                                basis.states_.push_back(std::move(s));
                                if (basis.states_.size() > caps.max_basis)
                                    throw resource_error(
                                        "FockBasis: basis size exceeds configured maximum");
                            }
                        }
                        if (m == mlim) break;
                    }
                }
                if (p == plim) break;
            }
        }
        if (d == dlim) break;
    }

    std::sort(basis.states_.begin(), basis.states_.end(), canonical_less);
    basis.index_.reserve(basis.states_.size() * 2);
    for (std::size_t i = 0; i < basis.states_.size(); ++i) basis.index_[basis.states_[i]] = i;
    return basis;
}

std::optional<std::size_t> FockBasis::index_of(const FockState& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t FockBasis::block_size(Block b) const {
    switch (b) {
        case Block::D: return modes_->n_d();
        case Block::Plus: return modes_->n_plus();
        case Block::Minus: return modes_->n_minus();
    }
    return 0;
}

bool FockBasis::fermion_step(LadderKind kind, Block block, int mode, FockState& s,
                             int& sign) {
    std::uint64_t* occ = nullptr;
    int prefix = 0;
    const int q = s.n_d(), r = s.n_plus();
    switch (block) {
        case Block::D:
            occ = &s.d_occ;
            prefix = 0;
            break;
        case Block::Plus:
            occ = &s.plus_occ;
            prefix = q;
            break;
        case Block::Minus:
            occ = &s.minus_occ;
            prefix = q + r;
            break;
    }
    const std::uint64_t bit = 1ull << mode;
    const bool occupied = (*occ & bit) != 0;
    if (kind == LadderKind::Annihilate ? !occupied : occupied) return false;
    const std::uint64_t below = *occ & (bit - 1);
    const int swaps = prefix + __builtin_popcountll(below);
    sign *= (swaps & 1) ? -1 : 1;
    *occ ^= bit;
    return true;
}

WeightedStates FockBasis::apply_fermion(LadderKind kind, Block block, int mode,
                                        const FockState& s) const {
    if (mode < 0 || static_cast<std::size_t>(mode) >= block_size(block))
        throw std::out_of_range("apply_fermion: mode index out of range");
    FockState t = s;
    int sign = 1;
    if (!fermion_step(kind, block, mode, t, sign)) return {};
    auto idx = index_of(t);
    if (!idx) return {};
    return {{*idx, cplx(static_cast<double>(sign), 0.0)}};
}

WeightedStates FockBasis::apply_boson(LadderKind kind, int mode, const FockState& s) const {
    if (mode < 0 || static_cast<std::size_t>(mode) >= modes_->n_photon())
        throw std::out_of_range("apply_boson: mode index out of range");
    FockState t = s;
    const int n = t.ph_occ[mode];
    double amp = 0.0;
    if (kind == LadderKind::Annihilate) {
        if (n == 0) return {};
        amp = std::sqrt(static_cast<double>(n));
        t.ph_occ[mode] = static_cast<std::uint8_t>(n - 1);
    } else {
        if (n >= caps_.max_per_mode) return {}; // projective truncation at the cap
        amp = std::sqrt(static_cast<double>(n + 1));
        t.ph_occ[mode] = static_cast<std::uint8_t>(n + 1);
    }
    auto idx = index_of(t);
    if (!idx) return {};
    return {{*idx, cplx(amp, 0.0)}};
}

std::optional<std::pair<std::size_t, cplx>> FockBasis::apply_monomial(
    std::span<const LadderOp> ops, const FockState& s) const {
    FockState t = s;
    double boson_amp = 1.0;
    int sign = 1;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        const LadderOp& op = *it;
        if (op.boson) {
            const int n = t.ph_occ[op.mode];
            if (op.kind == LadderKind::Annihilate) {
                if (n == 0) return std::nullopt;
                boson_amp *= std::sqrt(static_cast<double>(n));
                t.ph_occ[op.mode] = static_cast<std::uint8_t>(n - 1);
            } else {
                if (n >= caps_.max_per_mode) return std::nullopt;
                boson_amp *= std::sqrt(static_cast<double>(n + 1));
                t.ph_occ[op.mode] = static_cast<std::uint8_t>(n + 1);
            }
        } else {
            if (!fermion_step(op.kind, op.block, op.mode, t, sign)) return std::nullopt;
        }
    }
    auto idx = index_of(t);
    if (!idx) return std::nullopt;
    return std::make_pair(*idx, cplx(sign * boson_amp, 0.0));
}

WeightedStates FockBasis::apply_smeared(LadderKind kind, Block block,
                                        std::span<const cplx> h, std::size_t index) const {
    WeightedStates out;
    const FockState& s = states_[index];
    for (std::size_t m = 0; m < h.size(); ++m) {
        if (h[m] == cplx(0.0, 0.0)) continue;
        auto r = apply_fermion(kind, block, static_cast<int>(m), s);
        // b(h) is antilinear in h, b*(h) linear
        const cplx coeff = kind == LadderKind::Annihilate ? std::conj(h[m]) : h[m];
        for (auto& [i, a] : r) out.emplace_back(i, coeff * a);
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> FockBasis::number_operators() const {
    std::vector<double> nd(states_.size()), nph(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) {
        nd[i] = states_[i].n_fermions();
        nph[i] = states_[i].n_photons();
    }
    return {std::move(nd), std::move(nph)};
}

} // namespace qedcut
