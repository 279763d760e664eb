#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rmtherm/core.hpp"

namespace rmtherm {

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::GOE;
    int dimension = 100;
    double spectral_scale = 1.0;  // lambda (lambda_U for GUE)
    std::uint64_t master_seed = 0x5eed;

    void validate() const {
        if (dimension < 2)
            throw InvalidArgument("ensemble dimension must be >= 2, got " + std::to_string(dimension));
        if (!(spectral_scale > 0.0) || !std::isfinite(spectral_scale))
            throw InvalidArgument("spectral_scale must be positive and finite");
    }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of realization `index`; a pure function of (master_seed, index).
inline std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(index ^ 0xa5a5a5a5a5a5a5a5ULL));
}

// Draws one Hamiltonian. Entries are filled row by row over the upper
// triangle, so the matrix depends only on the spec and the index.
template <class Scalar>
Matrix<Scalar> sample_hamiltonian(const EnsembleSpec& spec, std::uint64_t realization_index) {
    spec.validate();
    if (spec.kind != ScalarTraits<Scalar>::kind)
        throw InvalidArgument("scalar type does not match ensemble kind " + std::string(to_string(spec.kind)));
    const int n = spec.dimension;
    const double lam = spec.spectral_scale;
    std::mt19937_64 rng(realization_seed(spec.master_seed, realization_index));
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix<Scalar> h(n, n);
    if constexpr (std::is_same_v<Scalar, double>) {
        const double off = lam / std::sqrt(static_cast<double>(n));
        const double diag = off * std::sqrt(2.0);
        for (int i = 0; i < n; ++i) {
            h(i, i) = diag * normal(rng);
            for (int j = i + 1; j < n; ++j) {
                const double v = off * normal(rng);
                h(i, j) = v;
                h(j, i) = v;
            }
        }
    } else {
        const double part = lam / std::sqrt(2.0 * n);
        const double diag = lam / std::sqrt(static_cast<double>(n));
        for (int i = 0; i < n; ++i) {
            h(i, i) = Complex(diag * normal(rng), 0.0);
            for (int j = i + 1; j < n; ++j) {
                const double re = part * normal(rng);
                const double im = part * normal(rng);
                h(i, j) = Complex(re, im);
                h(j, i) = Complex(re, -im);
            }
        }
    }
    return h;
}

template <class Scalar>
struct SpectralDecomposition {
    RealVector eigenvalues;         // ascending
    Matrix<Scalar> eigenvectors;    // columns; empty when only values were requested

    int dimension() const { return static_cast<int>(eigenvalues.size()); }
    bool has_vectors() const { return eigenvectors.size() > 0; }

    Matrix<Scalar> reconstruct() const {
        return eigenvectors * eigenvalues.cast<Scalar>().asDiagonal() * eigenvectors.adjoint();
    }

    // max |V^dagger V - 1|
    double orthogonality_residual() const {
        const auto n = eigenvectors.cols();
        return (eigenvectors.adjoint() * eigenvectors - Matrix<Scalar>::Identity(n, n)).cwiseAbs().maxCoeff();
    }

    double reconstruction_residual(const Matrix<Scalar>& h) const {
        return (reconstruct() - h).cwiseAbs().maxCoeff();
    }
};

template <class Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& h) {
    return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

// Diagonalizes a Hermitian matrix. `scale` is the energy scale lambda used in
// the hermiticity tolerance 1e-8*scale.
template <class Scalar>
SpectralDecomposition<Scalar> decompose(const Matrix<Scalar>& h, double scale = 1.0, bool compute_vectors = true) {
    if (h.rows() != h.cols() || h.rows() == 0) throw InvalidArgument("decompose: matrix must be square and nonempty");
    if (!h.allFinite()) throw InvalidArgument("decompose: matrix has non-finite entries");
    const double defect = hermiticity_defect(h);
    if (defect > 1e-8 * scale)
        throw NotHermitian("decompose: max |H - H^dagger| = " + std::to_string(defect) + " exceeds 1e-8*lambda");
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(h, compute_vectors ? Eigen::ComputeEigenvectors
                                                                            : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw EigensolverFailure("decompose: eigensolver did not converge");
    SpectralDecomposition<Scalar> out;
    out.eigenvalues = solver.eigenvalues();
    if (compute_vectors) out.eigenvectors = solver.eigenvectors();
    // Eigen already returns ascending values; enforce it with a stable sort in
    // case a future backend does not.
    const Eigen::Index n = out.eigenvalues.size();
    std::vector<Eigen::Index> order(n);
    for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return out.eigenvalues[a] < out.eigenvalues[b]; });
    if (!std::is_sorted(out.eigenvalues.data(), out.eigenvalues.data() + n)) {
        RealVector vals(n);
        Matrix<Scalar> vecs(compute_vectors ? n : 0, compute_vectors ? n : 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            vals[i] = out.eigenvalues[order[i]];
            if (compute_vectors) vecs.col(i) = out.eigenvectors.col(order[i]);
        }
        out.eigenvalues = std::move(vals);
        out.eigenvectors = std::move(vecs);
    }
    return out;
}

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> counts;   // raw counts summed over realizations
    std::vector<double> density;  // counts / (realizations * width); integrates to N
    std::size_t realizations = 0;
    std::size_t outside = 0;      // eigenvalues that fell outside [lo, hi]

    std::size_t bins() const { return counts.size(); }
    double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
    double centre(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width(); }
    double left(std::size_t i) const { return lo + static_cast<double>(i) * width(); }
};

// Histogram of eigenvalues over [lo, hi]. The upper edge is inclusive.
inline Histogram empirical_density(const std::vector<RealVector>& spectra, int bins, double lo, double hi) {
    if (spectra.empty()) throw InvalidArgument("empirical_density: no spectra supplied");
    if (bins < 1) throw InvalidArgument("empirical_density: bins must be >= 1");
    if (!(hi > lo)) throw InvalidArgument("empirical_density: empty range");
    Histogram out;
    out.lo = lo;
    out.hi = hi;
    out.counts.assign(bins, 0.0);
    out.realizations = spectra.size();
    const double w = (hi - lo) / bins;
    for (const auto& s : spectra) {
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const double e = s[i];
            if (e < lo || e > hi) {
                ++out.outside;
                continue;
            }
            auto b = static_cast<std::size_t>((e - lo) / w);
            if (b >= static_cast<std::size_t>(bins)) b = bins - 1;
            out.counts[b] += 1.0;
        }
    }
    out.density.resize(bins);
    for (int b = 0; b < bins; ++b) out.density[b] = out.counts[b] / (static_cast<double>(out.realizations) * w);
    return out;
}

// Range defaults to the extreme eigenvalues of the sample.
inline Histogram empirical_density(const std::vector<RealVector>& spectra, int bins) {
    if (spectra.empty()) throw InvalidArgument("empirical_density: no spectra supplied");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : spectra) {
        if (s.size() == 0) continue;
        lo = std::min(lo, s.minCoeff());
        hi = std::max(hi, s.maxCoeff());
    }
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    return empirical_density(spectra, bins, lo, hi);
}

template <class Scalar>
std::vector<RealVector> spectra_of(const std::vector<SpectralDecomposition<Scalar>>& decomps) {
    std::vector<RealVector> out;
    out.reserve(decomps.size());
    for (const auto& d : decomps) out.push_back(d.eigenvalues);
    return out;
}

template <class Scalar>
Histogram empirical_density(const std::vector<SpectralDecomposition<Scalar>>& decomps, int bins) {
    return empirical_density(spectra_of(decomps), bins);
}

template <class Scalar>
Histogram empirical_density(const std::vector<SpectralDecomposition<Scalar>>& decomps, int bins, double lo,
                            double hi) {
    return empirical_density(spectra_of(decomps), bins, lo, hi);
}

// Mean level spacing at the band centre, d = pi*lambda/N.
inline double mean_spacing(int n, double lambda) {
    if (n < 2) throw InvalidArgument("mean_spacing: N must be >= 2");
    if (!(lambda > 0.0)) throw InvalidArgument("mean_spacing: lambda must be positive");
    return pi * lambda / n;
}

}  // namespace rmtherm
