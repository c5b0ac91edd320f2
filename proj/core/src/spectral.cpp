#include "qedcut/spectral.hpp"


#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>

namespace qedcut {

namespace {

Vector seeded_vector(std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Vector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = cplx(nd(rng), nd(rng));
    v.normalize();
    return v;
}

void fix_phase(Vector& v) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best + 1e-15) {
            best = a;
            imax = i;
        }
    }
    if (best > 0.0) v *= std::conj(v[imax]) / std::abs(v[imax]);
}

GroundStateResult dense_ground(const SparseOperator& h, const SolverOptions& opts) {
    Eigen::MatrixXcd dense = to_dense(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
    GroundStateResult r;
    r.energy = es.eigenvalues()(0);
    r.vector = es.eigenvectors().col(0);
    fix_phase(r.vector);
    r.residual = (h.matrix * r.vector - r.energy * r.vector).norm();
    r.iterations = 0;
    const double window = opts.gap_tol * std::max(1.0, std::abs(r.energy));
    std::size_t csize = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()(i) - r.energy <= window) {
            r.cluster.push_back(es.eigenvalues()(i));
            ++csize;
        } else {
            break;
        }
    }
    r.cluster_vectors = es.eigenvectors().leftCols(static_cast<Eigen::Index>(csize));
    return r;
}

struct LanczosOut {
    std::vector<double> ritz;
    Eigen::MatrixXcd ritz_vectors;
    double residual = 0.0;
    int matvecs = 0;
};

// One full-reorthogonalization Lanczos pass from v0; returns the lowest nev
// Ritz pairs of the Krylov space.
LanczosOut lanczos_pass(const SparseOperator& h, const Vector& v0, int krylov, int nev) {
    const Eigen::Index dim = static_cast<Eigen::Index>(h.dim());
    krylov = std::min<int>(krylov, static_cast<int>(dim));
    Eigen::MatrixXcd V(dim, krylov);
    std::vector<double> alpha, beta;
    V.col(0) = v0;
    Vector w;
    int built = 0;
    LanczosOut out;
    for (int j = 0; j < krylov; ++j) {
        w = h.matrix * V.col(j);
        ++out.matvecs;
        const double a = std::real(V.col(j).dot(w));
        alpha.push_back(a);
        w -= a * V.col(j);
        if (j > 0) w -= beta[j - 1] * V.col(j - 1);
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXcd proj = V.leftCols(j + 1).adjoint() * w;
            w -= V.leftCols(j + 1) * proj;
        }
        const double b = w.norm();
        built = j + 1;
        if (b < 1e-14 || j + 1 == krylov) {
            beta.push_back(0.0);
            break;
        }
        beta.push_back(b);
        V.col(j + 1) = w / b;
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(built, built);
    for (int j = 0; j < built; ++j) {
        T(j, j) = alpha[j];
        if (j + 1 < built) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const int take = std::min(nev, built);
    out.ritz.assign(es.eigenvalues().data(), es.eigenvalues().data() + take);
    out.ritz_vectors = V.leftCols(built) * es.eigenvectors().leftCols(take).cast<cplx>();
    const double blast = beta.empty() ? 0.0 : beta[built - 1];
    out.residual = std::abs(blast * es.eigenvectors()(built - 1, 0));
    return out;
}

} // namespace

Eigen::MatrixXcd to_dense(const SparseOperator& a) { return Eigen::MatrixXcd(a.matrix); }

namespace {

// Largest eigenvalue of a hermitian PSD operator given through its matvec,
// by restarted Lanczos with full reorthogonalization.
double lanczos_largest(const std::function<Vector(const Vector&)>& apply, std::size_t dim,
                       std::uint64_t seed, double tol, int max_matvecs) {
    Vector v = seeded_vector(dim, seed);
    const int krylov = static_cast<int>(std::min<std::size_t>(dim, 60));
    double theta = 0.0;
    int used = 0;
    while (used < max_matvecs) {
        Eigen::MatrixXcd V(static_cast<Eigen::Index>(dim), krylov);
        std::vector<double> alpha, beta;
        V.col(0) = v;
        int built = 0;
        for (int j = 0; j < krylov && used < max_matvecs; ++j) {
            Vector w = apply(V.col(j));
            ++used;
            const double a = std::real(V.col(j).dot(w));
            alpha.push_back(a);
            w -= a * V.col(j);
            if (j > 0) w -= beta[j - 1] * V.col(j - 1);
            for (int pass = 0; pass < 2; ++pass) {
                Eigen::VectorXcd proj = V.leftCols(j + 1).adjoint() * w;
                w -= V.leftCols(j + 1) * proj;
            }
            const double b = w.norm();
            built = j + 1;
            if (b < 1e-14 || j + 1 == krylov) {
                beta.push_back(0.0);
                break;
            }
            beta.push_back(b);
            V.col(j + 1) = w / b;
        }
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(built, built);
        for (int j = 0; j < built; ++j) {
            T(j, j) = alpha[j];
            if (j + 1 < built) T(j, j + 1) = T(j + 1, j) = beta[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        theta = es.eigenvalues()(built - 1);
        const double blast = beta.empty() ? 0.0 : beta[built - 1];
        const double resid = std::abs(blast * es.eigenvectors()(built - 1, built - 1));
        v = (V.leftCols(built) * es.eigenvectors().col(built - 1).cast<cplx>()).normalized();
        if (resid <= tol * std::max(1e-300, std::abs(theta))) break;
    }
    return std::max(0.0, theta);
}

} // namespace

GroundStateResult ground_state(const SparseOperator& h, const SolverOptions& opts) {
    const std::size_t dim = h.dim();
    if (dim == 0) throw std::invalid_argument("ground_state: empty operator");
    if (static_cast<int>(dim) <= opts.dense_threshold) return dense_ground(h, opts);

    Vector v = seeded_vector(dim, opts.seed);
    GroundStateResult r;
    int total_matvecs = 0;
    const int krylov = std::min<std::size_t>(dim, 160);
    double scale = 1.0;
    while (total_matvecs < opts.max_iter) {
        LanczosOut out = lanczos_pass(h, v, krylov, 8);
        total_matvecs += out.matvecs;
        r.energy = out.ritz[0];
        r.vector = out.ritz_vectors.col(0).normalized();
        r.residual = (h.matrix * r.vector - r.energy * r.vector).norm();
        scale = std::max(1.0, std::abs(r.energy));
        if (r.residual <= opts.tol * scale) {
            fix_phase(r.vector);
            r.iterations = total_matvecs;
            const double window = opts.gap_tol * scale;
            std::vector<Eigen::Index> cluster_ix;
            for (std::size_t i = 0; i < out.ritz.size(); ++i) {
                if (out.ritz[i] - r.energy > window) break;
                Vector u = out.ritz_vectors.col(i).normalized();
                const double res = (h.matrix * u - out.ritz[i] * u).norm();
                if (res <= 10 * opts.tol * scale) cluster_ix.push_back(i);
            }
            r.cluster.clear();
            r.cluster_vectors.resize(r.vector.size(),
                                     static_cast<Eigen::Index>(cluster_ix.size()));
            for (std::size_t c = 0; c < cluster_ix.size(); ++c) {
                r.cluster.push_back(out.ritz[cluster_ix[c]]);
                r.cluster_vectors.col(c) = out.ritz_vectors.col(cluster_ix[c]);
            }
            // orthonormalize (Ritz vectors of distinct values already are)
            Eigen::HouseholderQR<Eigen::MatrixXcd> qr(r.cluster_vectors);
            r.cluster_vectors =
                qr.householderQ() * Eigen::MatrixXcd::Identity(
                                        r.cluster_vectors.rows(), r.cluster_vectors.cols());
            return r;
        }
        v = r.vector;
    }
    r.iterations = total_matvecs;
    throw solver_error("ground_state: no convergence within max_iter", std::move(r));
}

double dense_spectral_norm(const Eigen::MatrixXcd& a) {
    if (a.size() == 0) return 0.0;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
    return svd.singularValues()(0);
}

double operator_norm(const SparseOperator& a, double tol, const SolverOptions& opts) {
    const std::size_t dim = a.dim();
    if (dim == 0) return 0.0;
    if (static_cast<int>(dim) <= opts.dense_threshold / 2) return dense_spectral_norm(to_dense(a));
    Vector x = seeded_vector(dim, opts.seed + 1);
    double lambda = 0.0;
    for (int it = 0; it < opts.max_iter; ++it) {
        Vector ax = a.matrix * x;
        Vector y = a.matrix.adjoint() * ax;
        const double next = std::sqrt(std::max(0.0, std::real(x.dot(y))));
        const double ynorm = y.norm();
        if (ynorm == 0.0) return 0.0;
        x = y / ynorm;
        if (it > 4 && std::abs(next - lambda) <= tol * std::max(1e-300, next)) return next;
        lambda = next;
    }
    return lambda; // best estimate; relative change below tol not reached
}

Observables observables(const Vector& phi, const FockBasis& basis, double lambda) {
    const auto [nd, nph] = basis.number_operators();
    const auto dg = dgamma_hd_diagonal(basis);
    Observables out;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double w = std::norm(phi[static_cast<Eigen::Index>(i)]);
        out.n_d += w * nd[i];
        out.n_ph += w * nph[i];
        if (nph[i] == 0.0 && dg[i] <= lambda) out.overlap += w;
    }
    return out;
}

Observables observables(const Eigen::MatrixXcd& cluster_vectors, const FockBasis& basis,
                        double lambda) {
    Observables acc;
    const Eigen::Index n = cluster_vectors.cols();
    if (n == 0) return acc;
    for (Eigen::Index c = 0; c < n; ++c) {
        Observables o = observables(Vector(cluster_vectors.col(c)), basis, lambda);
        acc.n_d += o.n_d / n;
        acc.n_ph += o.n_ph / n;
        acc.overlap += o.overlap / n;
    }
    return acc;
}

void write_series_csv(const std::filesystem::path& file, const ConvergenceSeries& s) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("write_series_csv: cannot open " + file.string());
    out << "param,energy,nD,nPh,overlap,pert_norm\n";
    char buf[256];
    for (const auto& e : s.entries) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.param,
                      e.energy, e.n_d, e.n_ph, e.overlap, e.pert_norm);
        out << buf;
    }
}

ConvergenceSeries ir_convergence_study(const FockBasis& basis, const KernelSet& kernels,
                                       const PhysicalParams& params,
                                       std::span<const double> m_list, double lambda,
                                       const SolverOptions& solver, double tol_zero) {
    for (std::size_t i = 1; i < m_list.size(); ++i)
        if (!(m_list[i] < m_list[i - 1]))
            throw std::invalid_argument("ir_convergence_study: m list must strictly decrease");
    ConvergenceSeries series;
    series.param_name = "m";
    SparseOperator h_full = build_total(basis, kernels, params, {});
    for (double m : m_list) {
        SeriesEntry e;
        e.param = m;
        try {
            SparseOperator hm = build_total(basis, kernels, params, {.m = m});
            GroundStateResult gs = ground_state(hm, solver);
            e.energy = gs.energy;
            Observables obs = gs.cluster_vectors.cols() > 0
                                  ? observables(gs.cluster_vectors, basis, lambda)
                                  : observables(gs.vector, basis, lambda);
            e.n_d = obs.n_d;
            e.n_ph = obs.n_ph;
            e.overlap = obs.overlap;
            e.pert_norm = ((h_full.matrix - hm.matrix) * gs.vector).norm();
            series.all_energies_nonpositive &= e.energy <= tol_zero;
            series.sup_abs_energy = std::max(series.sup_abs_energy, std::abs(e.energy));
        } catch (const solver_error&) {
            e.solver_ok = false;
        }
        series.entries.push_back(e);
    }
    return series;
}

double VertexConstants::sum_a0() const {
    double s = 0;
    for (const auto& row : a0)
        for (double v : row) s += v;
    return s;
}
double VertexConstants::sum_a1() const {
    double s = 0;
    for (const auto& row : a1)
        for (double v : row) s += v;
    return s;
}
double VertexConstants::sum_b() const {
    double s = 0;
    for (const auto& row : b)
        for (double v : row) s += v;
    return s;
}

VertexConstants vertex_constants(const ModeTable& modes, const PhotonVertexKernels& pv,
                                 const SolverOptions& solver) {
    // v_i^mu(k) acts on the fermion factor only; its norm is computed on a
    // photon-free basis over the same fermionic modes.
    ModeTable fmodes = modes;
    fmodes.photons = PhotonGrid{};
    TruncationCaps caps;
    caps.max_fermions = -1;
    FockBasis fb = FockBasis::enumerate(fmodes, caps);
    const auto [nddiag, _] = fb.number_operators();

    VertexConstants out;
    const std::size_t nk = modes.photons.num_k();
    for (int mu = 1; mu <= 2; ++mu) {
        for (int i = 1; i <= 6; ++i) {
            double acc0 = 0.0, acc1 = 0.0, accb = 0.0;
            for (std::size_t ik = 0; ik < nk; ++ik) {
                // kernels live on `modes`; rebuild the vertex on the aux basis
                SparseOperator v = build_vertex(fb, pv, i, mu, ik);
                if (v.nnz() == 0) continue;
                const double w = modes.photons.points[2 * ik].weight;
                const double om = modes.photons.energies[2 * ik];
                double n2, n2b;
                if (i == 5 || i == 6) {
                    SparseMatrix right = v.matrix;
                    SparseMatrix left = v.matrix;
                    for (int c = 0; c < right.outerSize(); ++c)
                        for (SparseMatrix::InnerIterator it(right, c); it; ++it)
                            it.valueRef() /= std::sqrt(nddiag[it.col()] + 1.0);
                    for (int c = 0; c < left.outerSize(); ++c)
                        for (SparseMatrix::InnerIterator it(left, c); it; ++it)
                            it.valueRef() /= std::sqrt(nddiag[it.row()] + 1.0);
                    SparseOperator r{right, false, "v(N+1)^-1/2"};
                    SparseOperator l{left, false, "(N+1)^-1/2 v"};
                    n2 = operator_norm(r, 1e-12, solver);
                    n2b = operator_norm(l, 1e-12, solver);
                } else {
                    n2 = n2b = operator_norm(v, 1e-12, solver);
                }
                acc0 += w * n2 * n2;
                if (om > 0.0) {
                    acc1 += w * n2 * n2 / om;
                    accb += w * n2b * n2b / om;
                } else if (n2 > 0.0 || n2b > 0.0) {
                    throw infrared_error("vertex_constants: omega = 0 with nonzero vertex");
                }
            }
            out.a0[mu - 1][i - 1] = std::sqrt(acc0);
            out.a1[mu - 1][i - 1] = std::sqrt(acc1);
            out.b[mu - 1][i - 1] = std::sqrt(accb);
        }
    }
    return out;
}

ConvergenceSeries eps_convergence_study(const FockBasis& basis, const KernelSet& kernels,
                                        const PhysicalParams& params, double m,
                                        std::span<const double> eps_list, double lambda,
                                        const SolverOptions& solver) {
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw std::invalid_argument("eps_convergence_study: eps list must strictly decrease");
    ConvergenceSeries series;
    series.param_name = "eps";
    const ModeTable& modes = basis.modes();

    SparseOperator h = build_total(basis, kernels, params, {.m = m});
    GroundStateResult gs = ground_state(h, solver);
    const double e0 = gs.energy;

    // (H - E + 1)^{-1} is hermitian, so the adjoint factor is the same solve;
    // applied as a dense factorization (exactness over speed at desk scale).
    Eigen::MatrixXcd shifted = to_dense(h);
    shifted.diagonal().array() += cplx(1.0 - e0, 0.0);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);

    PhotonVertexKernels pv_m = m > 0.0 ? infrared_truncate(kernels.vertex, modes, m)
                                       : kernels.vertex;

    for (double eps : eps_list) {
        SeriesEntry e;
        e.param = eps;
        try {
            SparseOperator heps =
                build_total(basis, kernels, params, {.m = m, .eps_average = true, .eps = eps});
            SparseMatrix d = heps.matrix - h.matrix;

            // ||D R|| via Lanczos on M^H M = R D^H D R (R hermitian)
            const SparseMatrix dH = d.adjoint();
            auto mhm = [&](const Vector& x) {
                Vector rx = lu.solve(x);
                Vector mx = d * rx;
                return Vector(lu.solve(Vector(dH * mx)));
            };
            e.pert_norm =
                std::sqrt(lanczos_largest(mhm, h.dim(), solver.seed + 17, 1e-10,
                                          solver.max_iter));

            GroundStateResult gse = ground_state(heps, solver);
            e.energy = gse.energy;
            Observables obs = observables(gse.vector, basis, lambda);
            e.n_d = obs.n_d;
            e.n_ph = obs.n_ph;
            e.overlap = obs.overlap;

            // kernel-averaging defect constants of Eq. (31)-(32) with
            // v_{j,m} - <v_{j,m}>_eps
            PhotonVertexKernels diff = epsilon_average(pv_m, modes, eps);
            for (int fam = 1; fam <= 6; ++fam) {
                Tensor& t = diff.family(fam);
                const Tensor& src = pv_m.family(fam);
                for (std::size_t q = 0; q < t.size(); ++q)
                    t.data()[q] = src.data()[q] - t.data()[q];
            }
            VertexConstants vc = vertex_constants(modes, diff, solver);
            const double defect = vc.sum_a0() + vc.sum_a1() + vc.sum_b();
            if (eps + defect > 0.0)
                series.const_gamma =
                    std::max(series.const_gamma, e.pert_norm / (eps + defect));
            series.sup_abs_energy = std::max(series.sup_abs_energy, std::abs(e.energy));
            series.all_energies_nonpositive &= e.energy <= 1e-10;
        } catch (const solver_error&) {
            e.solver_ok = false;
        }
        series.entries.push_back(e);
    }
    return series;
}

} // namespace qedcut
