#include "qedcut/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qedcut {

void PhysicalParams::validate() const {
    if (!(m0c2 > 0.0)) throw domain_error("PhysicalParams: m0c2 must be > 0");
    if (!(c > 0.0)) throw domain_error("PhysicalParams: c must be > 0");
    if (!(z_alpha >= 0.0 && z_alpha < 1.0))
        throw domain_error("PhysicalParams: z_alpha must lie in [0, 1)");
}

double bound_energy(const PhysicalParams& params, int kj, int n) {
    if (kj == 0) throw domain_error("bound_energy: kj must be nonzero");
    if (n < 0) throw domain_error("bound_energy: n must be non-negative");
    const double za2 = params.z_alpha * params.z_alpha;
    const double kj2 = static_cast<double>(kj) * static_cast<double>(kj);
    if (!(kj2 > za2)) throw domain_error("bound_energy: requires kj^2 > z_alpha^2");
    const double denom = static_cast<double>(n) + std::sqrt(kj2 - za2);
    return params.m0c2 / std::sqrt(1.0 + za2 / (denom * denom));
}

double continuum_energy(const PhysicalParams& params, double p) {
    return std::sqrt(params.m0c2 * params.m0c2 + params.c * params.c * p * p);
}

double photon_energy(const PhysicalParams& params, const std::array<double, 3>& k) {
    return params.c * std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
}

namespace {

ContinuumGrid build_continuum(const PhysicalParams& params, const GridSpec& spec,
                              Species species) {
    ContinuumGrid grid;
    grid.species = species;
    if (spec.n_p <= 0) return grid;
    const double dp = spec.p_max / spec.n_p;
    for (int g = 0; g < static_cast<int>(spec.sectors.size()); ++g) {
        for (int j = 0; j < spec.n_p; ++j) {
            ContinuumPoint pt;
            pt.gamma_id = g;
            pt.p = (j + 0.5) * dp; // midpoint rule
            pt.weight = dp;
            grid.points.push_back(pt);
        }
    }
    std::sort(grid.points.begin(), grid.points.end(),
              [](const ContinuumPoint& a, const ContinuumPoint& b) {
                  return std::tie(a.gamma_id, a.p) < std::tie(b.gamma_id, b.p);
              });
    grid.energies.reserve(grid.points.size());
    for (const auto& pt : grid.points) grid.energies.push_back(continuum_energy(params, pt.p));
    return grid;
}

PhotonGrid build_photon(const PhysicalParams& params, const GridSpec& spec) {
    PhotonGrid grid;
    grid.cell_side = spec.photon_spacing;
    if (spec.photon_spacing <= 0.0 || spec.photon_lambda <= 0.0) return grid;
    const double h = spec.photon_spacing;
    const int mmax = static_cast<int>(std::floor(spec.photon_lambda / h + 1e-12));
    const double lam2 = spec.photon_lambda * spec.photon_lambda * (1.0 + 1e-12);
    std::vector<std::array<int, 3>> sites;
    for (int x = -mmax; x <= mmax; ++x)
        for (int y = -mmax; y <= mmax; ++y)
            for (int z = -mmax; z <= mmax; ++z) {
                if (x == 0 && y == 0 && z == 0 && !spec.include_origin) continue;
                const double k2 = h * h * (double(x) * x + double(y) * y + double(z) * z);
                if (k2 <= lam2) sites.push_back({x, y, z});
            }
    std::sort(sites.begin(), sites.end()); // deterministic lexicographic order
    for (const auto& s : sites) {
        for (int mu = 1; mu <= 2; ++mu) {
            PhotonPoint pt;
            pt.k = {h * s[0], h * s[1], h * s[2]};
            pt.mu = mu;
            pt.weight = h * h * h;
            grid.points.push_back(pt);
        }
    }
    grid.energies.reserve(grid.points.size());
    for (const auto& pt : grid.points) grid.energies.push_back(photon_energy(params, pt.k));
    return grid;
}

} // namespace

double ModeTable::min_discrete_energy() const {
    double e0 = std::numeric_limits<double>::infinity();
    for (const auto& m : d_modes) e0 = std::min(e0, m.energy);
    return e0;
}

double ModeTable::min_nonzero_photon_energy() const {
    double w = std::numeric_limits<double>::infinity();
    for (double e : photons.energies)
        if (e > 0.0) w = std::min(w, e);
    return w;
}

ModeTable build_mode_table(const PhysicalParams& params, const GridSpec& spec) {
    params.validate();
    ModeTable table;
    table.params = params;
    for (int g = 0; g < static_cast<int>(spec.sectors.size()); ++g) {
        const auto& sec = spec.sectors[g];
        for (int n = 0; n < sec.n_levels; ++n) {
            DiscreteMode mode;
            mode.gamma_id = g;
            mode.kj = sec.kj;
            mode.n = n;
            mode.energy = bound_energy(params, sec.kj, n);
            table.d_modes.push_back(mode);
        }
    }
    table.plus = build_continuum(params, spec, Species::ElectronContinuum);
    table.minus = build_continuum(params, spec, Species::Positron);
    table.photons = build_photon(params, spec);
    return table;
}

} // namespace qedcut
