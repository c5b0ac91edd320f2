#ifndef QEDCUT_ASSEMBLY_HPP
#define QEDCUT_ASSEMBLY_HPP

#include <Eigen/SparseCore>
#include <filesystem>
#include <string>

#include "qedcut/fock.hpp"
#include "qedcut/kernels.hpp"

namespace qedcut {

using SparseMatrix = Eigen::SparseMatrix<cplx>;
using Vector = Eigen::VectorXcd;

struct SparseOperator {
    SparseMatrix matrix;
    bool hermitian = false;
    std::string provenance;

    std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
    std::size_t nnz() const { return static_cast<std::size_t>(matrix.nonZeros()); }

    Vector apply(const Vector& x) const { return matrix * x; }
    SparseOperator adjoint() const;
    double hermiticity_deviation() const; // max |A - A^H| entry
};

SparseOperator diagonal_operator(std::span<const double> diag, std::string provenance);
SparseOperator operator_sum(const SparseOperator& a, const SparseOperator& b, cplx ca,
                            cplx cb, std::string provenance);

// A scaled normal-ordered product of ladder operators.
struct Monomial {
    cplx coeff;
    std::vector<LadderOp> ops; // operator order, leftmost acts last
};

// Matrix of sum_t coeff_t * (product of ladder ops), column by column.
SparseOperator build_from_monomials(const FockBasis& basis,
                                    std::span<const Monomial> monomials,
                                    std::string provenance, bool plus_adjoint = false);

struct FreeOperators {
    SparseOperator d_gamma_hd; // dGamma(H_D), diagonal
    SparseOperator h_ph;       // photon field energy, diagonal
    SparseOperator h0;         // sum of the two
};

FreeOperators build_free(const FockBasis& basis);

// Diagonal of dGamma(H_D) / H_ph per basis state (used for projections).
std::vector<double> dgamma_hd_diagonal(const FockBasis& basis);
std::vector<double> hph_diagonal(const FockBasis& basis);
std::vector<double> hph_diagonal_eps(const FockBasis& basis, double eps, double m);

// The fermionic vertex operator v_i^mu(k) (photon legs untouched), with the
// sqrt(Delta p) quadrature weight per continuum leg folded in.
SparseOperator build_vertex(const FockBasis& basis, const PhotonVertexKernels& pv, int i,
                            int mu, std::size_t ik);

// H_I^(1) = sum_{i,mu,k} sqrt(W_k) (v_i^mu(k) (x) a*_mu(k) + h.c.).
SparseOperator build_HI1(const FockBasis& basis, const PhotonVertexKernels& pv);

// The creation half sum_k sqrt(W_k) v_i^mu(k) (x) a*_mu(k) of one family; its
// adjoint is the matching annihilation half.
SparseOperator build_HI1_creation_part(const FockBasis& basis,
                                       const PhotonVertexKernels& pv, int i, int mu);

// The Wick-ordered Coulomb term on the fermion sector, photon identity.
SparseOperator build_HI2(const FockBasis& basis, const CoulombKernels& ck);

struct TotalOptions {
    double m = 0.0;          // infrared cutoff
    bool eps_average = false;
    double eps = 0.0;        // averaging cube side, required when eps_average
};

// H(g1, g2) = H0 + g1 H_I^(1) + g2 H_I^(2) (x) 1, with optional infrared
// truncation (H_m) and epsilon averaging (H^eps_m: omega and v_{i,m} replaced
// by their eps-averages on modes with omega >= m).
SparseOperator build_total(const FockBasis& basis, const KernelSet& ks,
                           const PhysicalParams& params, const TotalOptions& opts = {});

// Coordinate text dump: header `dim nnz hermitian`, rows `row col re im`.
void dump_matrix(const std::filesystem::path& file, const SparseOperator& op);
SparseOperator load_matrix(const std::filesystem::path& file);

} // namespace qedcut

#endif
