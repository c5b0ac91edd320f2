#ifndef QEDCUT_SPECTRAL_HPP
#define QEDCUT_SPECTRAL_HPP

#include <Eigen/Dense>
#include <filesystem>

#include "qedcut/assembly.hpp"

namespace qedcut {

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 4000;        // matvec budget for iterative paths
    std::uint64_t seed = 1234;  // start-vector seed
    double gap_tol = 1e-8;      // degenerate-cluster window (relative)
    int dense_threshold = 1200; // dims up to this use the dense eigensolver
};

struct GroundStateResult {
    double energy = 0.0;
    Vector vector;     // normalized, largest-|amplitude| entry real positive
    double residual = 0.0;
    int iterations = 0;
    std::vector<double> cluster; // degenerate ground cluster energies
    Eigen::MatrixXcd cluster_vectors; // orthonormal columns spanning the cluster
};

struct solver_error : std::runtime_error {
    GroundStateResult best;
    solver_error(const std::string& msg, GroundStateResult b)
        : std::runtime_error(msg), best(std::move(b)) {}
};

// Lowest eigenpair of a Hermitian operator: dense eigensolver at small dims,
// Lanczos with full reorthogonalization above. Deterministic given the seed.
GroundStateResult ground_state(const SparseOperator& h, const SolverOptions& opts = {});

// Largest singular value: dense SVD below the threshold, else power iteration
// on A^H A with relative accuracy tol.
double operator_norm(const SparseOperator& a, double tol = 1e-10,
                     const SolverOptions& opts = {});
double dense_spectral_norm(const Eigen::MatrixXcd& a);
Eigen::MatrixXcd to_dense(const SparseOperator& a);

struct Observables {
    double n_d = 0.0;
    double n_ph = 0.0;
    double overlap = 0.0; // mass on { zero photons, dGamma(H_D) <= lambda }
};
Observables observables(const Vector& phi, const FockBasis& basis, double lambda);
// Cluster average: mean of the observables over orthonormal cluster columns.
Observables observables(const Eigen::MatrixXcd& cluster_vectors, const FockBasis& basis,
                        double lambda);

struct SeriesEntry {
    double param = 0.0;
    double energy = 0.0;
    double n_d = 0.0;
    double n_ph = 0.0;
    double overlap = 0.0;
    double pert_norm = 0.0;
    bool solver_ok = true;
};

struct ConvergenceSeries {
    std::string param_name; // "m" or "eps"
    std::vector<SeriesEntry> entries;
    bool all_energies_nonpositive = true; // E_m <= tol_zero across the series
    double sup_abs_energy = 0.0;
    double const_gamma = 0.0; // eps study: max norm/(eps + kernel defect)
};

// CSV columns: param,energy,nD,nPh,overlap,pert_norm
void write_series_csv(const std::filesystem::path& file, const ConvergenceSeries& s);

// Descending m sweep: ground state of H_m, observables, ||(H - H_m) Phi_m||.
ConvergenceSeries ir_convergence_study(const FockBasis& basis, const KernelSet& kernels,
                                       const PhysicalParams& params,
                                       std::span<const double> m_list, double lambda,
                                       const SolverOptions& solver, double tol_zero = 1e-10);

// Descending eps sweep at fixed m: ||(H^eps - H)(H - E + 1)^{-1}|| and the
// ground energies of H^eps.
ConvergenceSeries eps_convergence_study(const FockBasis& basis, const KernelSet& kernels,
                                        const PhysicalParams& params, double m,
                                        std::span<const double> eps_list, double lambda,
                                        const SolverOptions& solver);

// The constants of Eqs. (31)-(32) from true operator norms of v_i^mu(k),
// computed on a photon-free auxiliary basis over the same fermionic modes.
struct VertexConstants {
    // indexed [mu-1][i-1]
    std::array<std::array<double, 6>, 2> a0{}, a1{}, b{};
    double sum_a0() const;
    double sum_a1() const;
    double sum_b() const;
};
VertexConstants vertex_constants(const ModeTable& modes, const PhotonVertexKernels& pv,
                                 const SolverOptions& solver);

} // namespace qedcut

#endif
