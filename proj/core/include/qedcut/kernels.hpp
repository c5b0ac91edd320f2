#ifndef QEDCUT_KERNELS_HPP
#define QEDCUT_KERNELS_HPP

#include <array>
#include <span>
#include <string>

#include "qedcut/modes.hpp"
#include "qedcut/tensor.hpp"

namespace qedcut {

using cplx = std::complex<double>;

// The six photon-vertex families v_i^mu(k). Tensors are indexed
// [mu-1][k][xi...] over distinct lattice k points; quadrature weights are
// never stored in the tensors.
struct PhotonVertexKernels {
    Tensor g1_dd;     // [2][nK][nd][nd]
    Tensor g2_dplus;  // [2][nK][nd][n+]
    Tensor g3_dminus; // [2][nK][nd][n-]
    Tensor g4_pm;     // [2][nK][n+][n-]
    Tensor g5_pp;     // [2][nK][n+][n+]
    Tensor g6_mm;     // [2][nK][n-][n-]

    Tensor& family(int i);
    const Tensor& family(int i) const;

    static PhotonVertexKernels zeros(const ModeTable& modes);
};

// Coulomb kernels F^(1)..F^(6). Electron legs range over the disjoint union
// [discrete d-modes] ++ [electron continuum points] (xi covers both measures);
// positron legs over the positron grid.
struct CoulombKernels {
    Tensor f1;     // [nE][nP][nE][nP]
    Tensor f2_plus;  // [nE]^4
    Tensor f2_minus; // [nP]^4
    Tensor f3_pm;  // [nE][nE][nP][nP]
    Tensor f3_mp;  // [nP][nP][nE][nE]
    Tensor f4;     // [nE][nE][nP][nP]
    Tensor f5_plus;  // [nE][nE]
    Tensor f5_minus; // [nP][nP]
    Tensor f6_pm;  // [nE][nP]
    Tensor f6_mp;  // [nP][nE]

    static CoulombKernels zeros(const ModeTable& modes);
};

struct KernelSet {
    PhotonVertexKernels vertex;
    CoulombKernels coulomb;
};

enum class SymmetryPolicy { Strict, Repair };

struct symmetry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct infrared_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct alignment_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Enforces the F^(1)/F^(2)/F^(5) symmetry constraints; Strict throws
// symmetry_error past tol, Repair projects onto the symmetric part.
void enforce_coulomb_symmetries(CoulombKernels& ck, SymmetryPolicy policy,
                                double tol = 1e-12);

// --- antisymmetrizers -------------------------------------------------------

Tensor antisymmetrize_pair(const Tensor& g);   // G(1,2) - G(2,1)
Tensor antisymmetrize_triple(const Tensor& g); // swap on slots (1,3)

enum class DoubleAntisymMode { Pairs1234, CoulombF4, CoulombF2, CoulombF3 };
// Pairs1234 / CoulombF4: four-term alternation over (1<->2) and (3<->4);
// CoulombF2: two-term (3<->4); CoulombF3: two-term (2<->4).
Tensor antisymmetrize_double(const Tensor& g, DoubleAntisymMode mode);

// --- weighted norms and constants -------------------------------------------

// sqrt(sum prod_legs w_leg |T|^2); weights per tensor slot.
double weighted_l2(const Tensor& t, std::span<const std::vector<double>> leg_weights);

std::vector<double> electron_leg_weights(const ModeTable& modes); // 1 then Delta p
std::vector<double> positron_leg_weights(const ModeTable& modes);
std::vector<double> ones(std::size_t n);

struct KernelConstants {
    std::array<double, 3> c_beta{0, 0, 0};
    double f1 = 0, f2a_plus = 0, f2a_minus = 0;
    double f3a_pm = 0, f3a_mp = 0;
    double f4 = 0, f4aa = 0;
    double f5_plus = 0, f5_minus = 0;
    double f6_pm = 0, f6_mp = 0;
    std::vector<double> g_of_k_sq; // per distinct k point
};

double compute_cbeta(const PhotonVertexKernels& pv, const ModeTable& modes, int beta);
double compute_gk_squared(const PhotonVertexKernels& pv, const ModeTable& modes,
                          std::size_t ik);
KernelConstants compute_constants(const KernelSet& ks, const ModeTable& modes);

struct Condition4Result {
    double lhs = 0.0;
    double margin = 1.0; // 1 - lhs
    bool pass = true;
};
Condition4Result check_condition4(const KernelConstants& consts, double e0, double g1,
                                  double g2);

// --- infrared truncation and epsilon averaging -------------------------------

// Zeroes every tensor slice at k points with omega(k) < m.
PhotonVertexKernels infrared_truncate(const PhotonVertexKernels& pv,
                                      const ModeTable& modes, double m);

// Cube id (coordinates of n(k) in units of eps) for a grid point; eps must be
// an integer multiple of the lattice spacing. Boundary points are assigned by
// rounding half away from zero.
std::array<long long, 3> epsilon_cube(const std::array<double, 3>& k, double eps);

// Replaces each value by the mean over the grid points sharing its
// (cube, polarization); `values` runs over photon grid points.
std::vector<cplx> epsilon_average(const PhotonGrid& grid, double eps,
                                  std::span<const cplx> values);
std::vector<double> epsilon_average(const PhotonGrid& grid, double eps,
                                    std::span<const double> values);

// Averages every kernel slice over k cubes (per family, mu and fermion legs).
PhotonVertexKernels epsilon_average(const PhotonVertexKernels& pv,
                                    const ModeTable& modes, double eps);

// --- synthetic defaults -------------------------------------------------------

// Separable admissible kernels: G = amp * u(xi) u(xi') * pol(mu) * chi(k)/sqrt(omega),
// chi = omega^ir_power * exp(-|k|^2/(2 uv_sigma^2)), zero at omega = 0.
struct SyntheticSpec {
    std::array<double, 6> vertex_amp{0.2, 0.2, 0.2, 0.2, 0.2, 0.2};
    double f1_amp = 0.1, f2_amp = 0.1, f3_amp = 0.1, f4_amp = 0.1;
    double f5_amp = 0.1, f6_amp = 0.1;
    double ir_power = 2.5;  // >= 1.5 keeps C_0, C_1, C_2 finite under refinement
    double uv_sigma = 2.0;
};

KernelSet synthetic_kernels(const ModeTable& modes, const SyntheticSpec& spec);

} // namespace qedcut

#endif
