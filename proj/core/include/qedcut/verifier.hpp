#ifndef QEDCUT_VERIFIER_HPP
#define QEDCUT_VERIFIER_HPP

#include <iosfwd>

#include "qedcut/config.hpp"
#include "qedcut/spectral.hpp"

namespace qedcut {

struct CheckRecord {
    std::string id;   // inequality label, e.g. "prop3.4(i)"
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0; // rhs - lhs
    bool pass = false;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    std::string dims; // instance description
};

struct BoundReport {
    std::vector<CheckRecord> checks;

    // pass <=> lhs <= rhs*(1+rel_tol) + abs_tol
    void add_bound(std::string id, double lhs, double rhs, double rel_tol, double abs_tol,
                   std::string dims);
    // deviation-style record: pass <=> dev <= tol
    void add_equality(std::string id, double dev, double tol, std::string dims);
    void merge(const BoundReport& other);

    std::size_t n_pass() const;
    std::size_t n_fail() const;
    bool all_pass() const { return n_fail() == 0; }
    const CheckRecord* find(const std::string& id) const;

    std::string to_json() const;
    void print_table(std::ostream& os) const;
};

// Unit-weight mode table for randomized operator checks: nd bound modes with
// energies inside (0, 1), unit-weight continuum points, photon points on a
// 1-d unit lattice.
ModeTable make_test_modes(std::size_t nd, std::size_t nplus, std::size_t nminus,
                          std::size_t n_kpoints = 0, int max_per_mode = 0);

// Generic contraction sum_xi coeff(xi) * prod_legs ladder(leg, xi_leg).
struct LegSpec {
    LadderKind kind;
    Block block;
};
SparseOperator contract(const FockBasis& basis, const Tensor& t,
                        std::span<const LegSpec> legs, bool conjugate_coeff,
                        std::string provenance);

// CAR/CCR matrix identities on an exactly closed truncation.
BoundReport check_car_ccr(const ModeTable& modes, const TruncationCaps& caps);

// ||b(h)Psi||^2 + ||b*(h)Psi||^2 = ||h||^2 ||Psi||^2 on random pairs.
BoundReport check_fermion_norm_identity(int n_pairs, std::uint64_t seed);

// Props. 3.4 (i-iv), 3.7 (22)-(25), 3.14 (i-iv) + the weighted variants of
// the three unweighted quadratic bounds, on random dense kernels; one record
// per inequality carrying the worst instance.
BoundReport check_quartic_bounds(int n_instances, int size_cap, std::uint64_t seed,
                                 double rel_tol, double abs_tol);

// Saturating constructions: flat pairing for Prop 3.4(i), diagonal chain for
// Prop 3.7 (22); asserts achieved lhs/rhs >= 0.99.
BoundReport check_tightness(std::uint64_t seed);

// Lemma 3.1 on a photon-only basis plus its single-mode saturating case, and
// (50)/(51)/(33)/(34) on the supplied basis with eps in {0.1, 1, 10}.
BoundReport check_photon_bounds(const FockBasis& basis, const PhotonVertexKernels& pv,
                                int n_states, std::uint64_t seed, double rel_tol,
                                double abs_tol);

// [1 (x) a_mu(k), H^(1)_{I,m}] = sqrt(W_k) sum_i v_i^mu(k) per grid point on
// columns below the photon caps; then the Lemma 4.5 norm bound with an
// empirical constant.
BoundReport check_commutator_identity(const FockBasis& basis,
                                      const PhotonVertexKernels& pv, double m,
                                      int n_states, std::uint64_t seed, double tol);

// Cor. 3.13 / Cor. 3.17 relative bounds on random states, the condition-(4)
// margin, and boundedness from below of the assembled H.
BoundReport check_relative_bounds(const FockBasis& basis, const KernelSet& ks,
                                  const PhysicalParams& params, int n_states,
                                  std::uint64_t seed, double rel_tol, double abs_tol);

// Structural sanity of the assembled operators: hermiticity, photon/fermion
// selection rules, vacuum expectations, Lemma 3.9/3.10 diagonal comparisons.
BoundReport check_assembly_sanity(const FockBasis& basis, const KernelSet& ks,
                                  const PhysicalParams& params);

// Everything above, driven by one configuration.
BoundReport run_full_verification(const RunConfig& config);

} // namespace qedcut

#endif
