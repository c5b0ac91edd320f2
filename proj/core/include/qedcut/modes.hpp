#ifndef QEDCUT_MODES_HPP
#define QEDCUT_MODES_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qedcut {

// hbar = 1 throughout; m0c2 and c are test knobs, default 1.
struct PhysicalParams {
    double m0c2 = 1.0;   // rest energy
    double c = 1.0;      // speed of light
    double z_alpha = 0.0; // (Z e^2)/c, dimensionless; must satisfy 0 <= z_alpha < 1
    double g1 = 0.0;     // photon coupling
    double g2 = 0.0;     // Coulomb coupling

    void validate() const;
};

// Energy of the discrete (bound) level with spin-orbit number kj and radial number n.
// Requires kj^2 > z_alpha^2; the result lies strictly in (0, m0c2) for z_alpha > 0.
double bound_energy(const PhysicalParams& params, int kj, int n);

// Continuum dispersion sqrt(m0c2^2 + (c p)^2), p >= 0.
double continuum_energy(const PhysicalParams& params, double p);

// Photon dispersion c|k|.
double photon_energy(const PhysicalParams& params, const std::array<double, 3>& k);

struct DiscreteMode {
    int gamma_id = 0; // opaque sector label
    int kj = 1;       // spin-orbit quantum number backing gamma_id
    int n = 0;        // radial quantum number
    double energy = 0.0;
};

enum class Species : std::uint8_t { ElectronContinuum, Positron };

struct ContinuumPoint {
    int gamma_id = 0;
    double p = 0.0;      // momentum, > 0
    double weight = 0.0; // quadrature weight (Delta p)
};

struct ContinuumGrid {
    Species species = Species::ElectronContinuum;
    std::vector<ContinuumPoint> points;   // sorted by (gamma_id, p)
    std::vector<double> energies;         // omega(p) per point

    std::size_t size() const { return points.size(); }
};

struct PhotonPoint {
    std::array<double, 3> k{0, 0, 0};
    int mu = 1;          // polarization, 1 or 2
    double weight = 0.0; // cell volume (cell_side^3)
};

// Uniform cubic lattice over the ball |k| <= lambda, cell side = spacing.
// Exactly two polarization entries per lattice point, mu = 1 stored first.
struct PhotonGrid {
    std::vector<PhotonPoint> points;
    std::vector<double> energies; // omega(k) = c|k| per point
    double cell_side = 0.0;

    std::size_t size() const { return points.size(); }
    // Number of distinct k lattice points (= size()/2).
    std::size_t num_k() const { return points.size() / 2; }
};

struct SectorSpec {
    int kj = 1;
    int n_levels = 1;
};

struct GridSpec {
    std::vector<SectorSpec> sectors; // discrete gamma sectors
    double p_max = 0.0;              // continuum momentum cutoff
    int n_p = 0;                     // midpoint cells per sector
    double photon_spacing = 0.0;     // lattice cell side
    double photon_lambda = 0.0;      // ultraviolet ball radius
    bool include_origin = false;     // keep the k = 0 lattice point
};

// All single-particle index sets of one run. Immutable after construction.
struct ModeTable {
    PhysicalParams params;
    std::vector<DiscreteMode> d_modes;
    ContinuumGrid plus;   // electron continuum
    ContinuumGrid minus;  // positron continuum
    PhotonGrid photons;

    std::size_t n_d() const { return d_modes.size(); }
    std::size_t n_plus() const { return plus.size(); }
    std::size_t n_minus() const { return minus.size(); }
    std::size_t n_photon() const { return photons.size(); }
    // Electron legs for the Coulomb term: discrete modes first, then the
    // electron continuum points. Weight 1 for discrete legs, sqrt(Delta p)
    // folded in at assembly time for continuum legs.
    std::size_t n_electron_legs() const { return n_d() + n_plus(); }

    double min_discrete_energy() const; // E_0 = inf E_{gamma,n}
    double min_nonzero_photon_energy() const;
};

ModeTable build_mode_table(const PhysicalParams& params, const GridSpec& spec);

struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qedcut

#endif
