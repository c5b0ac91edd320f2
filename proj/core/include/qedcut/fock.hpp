#ifndef QEDCUT_FOCK_HPP
#define QEDCUT_FOCK_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "qedcut/modes.hpp"

namespace qedcut {

using cplx = std::complex<double>;

struct TruncationCaps {
    int max_fermions = -1;     // -1: no cap beyond the mode count
    int max_photons_total = 0; // total photon number cap
    int max_per_mode = 0;      // per-mode photon occupation cap
    std::size_t max_basis = 2'000'000;
};

struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Occupation state: three ordered fermionic blocks (bitstrings, mode-table
// order, at most 64 modes per block) and a bosonic occupation vector.
struct FockState {
    std::uint64_t d_occ = 0;
    std::uint64_t plus_occ = 0;
    std::uint64_t minus_occ = 0;
    std::vector<std::uint8_t> ph_occ;

    int n_d() const { return __builtin_popcountll(d_occ); }
    int n_plus() const { return __builtin_popcountll(plus_occ); }
    int n_minus() const { return __builtin_popcountll(minus_occ); }
    int n_fermions() const { return n_d() + n_plus() + n_minus(); }
    int n_photons() const {
        int t = 0;
        for (auto o : ph_occ) t += o;
        return t;
    }

    bool operator==(const FockState& o) const {
        return d_occ == o.d_occ && plus_occ == o.plus_occ && minus_occ == o.minus_occ &&
               ph_occ == o.ph_occ;
    }
};

struct FockStateHash {
    std::size_t operator()(const FockState& s) const;
};

enum class Block : std::uint8_t { D, Plus, Minus };
enum class LadderKind : std::uint8_t { Create, Annihilate };

struct LadderOp {
    LadderKind kind = LadderKind::Annihilate;
    bool boson = false;
    Block block = Block::D; // ignored for boson ops
    int mode = 0;           // position within block / photon grid
};

inline LadderOp fermion_op(LadderKind kind, Block block, int mode) {
    return LadderOp{kind, false, block, mode};
}
inline LadderOp boson_op(LadderKind kind, int mode) {
    return LadderOp{kind, true, Block::D, mode};
}

// Sparse vector on the basis: (position, amplitude), no explicit zeros.
using WeightedStates = std::vector<std::pair<std::size_t, cplx>>;

class FockBasis {
public:
    FockBasis() = default;

    // Enumerates every state satisfying the caps, canonically ordered
    // (fermion count, photon count, bitstrings, photon vector); the vacuum
    // sits at position 0. Throws resource_error past caps.max_basis.
    static FockBasis enumerate(const ModeTable& modes, const TruncationCaps& caps);

    std::size_t size() const { return states_.size(); }
    const FockState& state(std::size_t i) const { return states_[i]; }
    const std::vector<FockState>& states() const { return states_; }
    std::optional<std::size_t> index_of(const FockState& s) const;

    const ModeTable& modes() const { return *modes_; }
    const TruncationCaps& caps() const { return caps_; }

    std::size_t block_size(Block b) const;

    // Signed single-operator actions. Results falling outside the enumerated
    // basis (caps) are dropped: projective truncation.
    WeightedStates apply_fermion(LadderKind kind, Block block, int mode,
                                 const FockState& s) const;
    WeightedStates apply_boson(LadderKind kind, int mode, const FockState& s) const;

    // Applies a normal-order-agnostic product of ladder operators; ops are
    // written left-to-right in operator order, so the rightmost acts first.
    std::optional<std::pair<std::size_t, cplx>> apply_monomial(
        std::span<const LadderOp> ops, const FockState& s) const;

    // b(h) = sum_m conj(h_m) b_m and its adjoint, h on one fermionic block.
    WeightedStates apply_smeared(LadderKind kind, Block block,
                                 std::span<const cplx> h, std::size_t index) const;

    // Diagonals of N_D and N_ph in basis order.
    std::pair<std::vector<double>, std::vector<double>> number_operators() const;

private:
    // Sign and occupancy step for one fermionic operator on the raw state;
    // returns false when the action annihilates the vector.
    static bool fermion_step(LadderKind kind, Block block, int mode, FockState& s,
                             int& sign);

    const ModeTable* modes_ = nullptr;
    TruncationCaps caps_;
    std::vector<FockState> states_;
    std::unordered_map<FockState, std::size_t, FockStateHash> index_;
};

} // namespace qedcut

#endif
