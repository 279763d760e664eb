#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rmtherm/core.hpp"
#include "rmtherm/ensemble.hpp"
#include "rmtherm/states.hpp"

namespace rmtherm {

// Physical time (hbar = 1) for a time in units of tau_lambda = 1/(2 lambda).
inline double physical_time(double tau, double lambda) { return tau / (2.0 * lambda); }
inline double tau_lambda_units(double t, double lambda) { return 2.0 * lambda * t; }

// f(t) = (1/N) sum_alpha exp(-i E_alpha t), t physical. Evaluated at |t| and
// conjugated for negative t so that f(-t) == conj(f(t)) holds bit for bit.
inline Complex f_of_t(std::span<const double> eigenvalues, double t) {
    if (eigenvalues.empty()) throw InvalidArgument("f_of_t: empty spectrum");
    const double at = std::abs(t);
    double re = 0.0;
    double im = 0.0;
    for (double e : eigenvalues) {
        re += std::cos(e * at);
        im += std::sin(e * at);
    }
    const double n = static_cast<double>(eigenvalues.size());
    return t < 0 ? Complex(re / n, im / n) : Complex(re / n, -im / n);
}

inline Complex f_of_t(const RealVector& eigenvalues, double t) {
    return f_of_t(std::span<const double>(eigenvalues.data(), static_cast<std::size_t>(eigenvalues.size())), t);
}

struct TrajectoryProvenance {
    EnsembleKind kind = EnsembleKind::GOE;
    int dimension = 0;
    double spectral_scale = 1.0;
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> realizations;
    std::string pi_label;
    std::string observable_label;
    double shift = 0.0;  // t0 in units of tau_lambda
};

struct Trajectory {
    std::vector<double> times;  // units of tau_lambda
    std::vector<double> values;
    std::vector<Complex> f;     // optional; same length as times when present
    double max_imag_residue = 0.0;
    TrajectoryProvenance provenance;
};

// Precomputed eigenbasis form of one (H, Pi, A) triple:
// Tr(A rho(t)) = sum_ab M_ab exp(i (E_a - E_b) t), M_ab = At_ab Pt_ba.
template <class Scalar>
class TraceEvolver {
public:
    TraceEvolver(const SpectralDecomposition<Scalar>& d, const StatOperator<Scalar>& pi, const Observable<Scalar>& a)
        : energies_(d.eigenvalues) {
        const int n = d.dimension();
        if (!d.has_vectors()) throw InvalidArgument("evolve_trace: decomposition lacks eigenvectors");
        if (pi.dimension() != n || a.dimension() != n)
            throw InvalidArgument("evolve_trace: dimension mismatch (H " + std::to_string(n) + ", Pi " +
                                  std::to_string(pi.dimension()) + ", A " + std::to_string(a.dimension()) + ")");
        if (!energies_.allFinite()) throw InvalidArgument("evolve_trace: non-finite eigenvalues");
        if (pi.is_equilibrium) {
            constant_ = true;
            constant_value_ = a.trace / n;
            return;
        }
        const auto& v = d.eigenvectors;
        Matrix<Scalar> at = v.adjoint() * a.matrix * v;
        Matrix<Scalar> pt = v.adjoint() * pi.matrix * v;
        weights_ = at.cwiseProduct(pt.transpose());
    }

    bool constant() const { return constant_; }
    const Matrix<Scalar>& weights() const { return weights_; }
    const RealVector& energies() const { return energies_; }

    // Values at physical times `ts`. `imag_residue` receives max |Im| of the sum.
    std::vector<double> values(std::span<const double> ts, double* imag_residue = nullptr) const {
        std::vector<double> out(ts.size());
        if (imag_residue) *imag_residue = 0.0;
        if (constant_) {
            std::fill(out.begin(), out.end(), constant_value_);
            return out;
        }
        const Eigen::Index n = energies_.size();
        const Eigen::Index nt = static_cast<Eigen::Index>(ts.size());
        // Process in column blocks to bound memory for long grids.
        constexpr Eigen::Index block = 256;
        for (Eigen::Index start = 0; start < nt; start += block) {
            const Eigen::Index cols = std::min(block, nt - start);
            RealMatrix c(n, cols), s(n, cols);
            for (Eigen::Index j = 0; j < cols; ++j) {
                const double t = ts[start + j];
                const double at = std::abs(t);
                const double sign = t < 0 ? -1.0 : 1.0;
                for (Eigen::Index a = 0; a < n; ++a) {
                    const double ph = energies_[a] * at;
                    c(a, j) = std::cos(ph);
                    s(a, j) = sign * std::sin(ph);
                }
            }
            if constexpr (std::is_same_v<Scalar, double>) {
                const RealMatrix mc = weights_ * c;
                const RealMatrix ms = weights_ * s;
                for (Eigen::Index j = 0; j < cols; ++j) {
                    out[start + j] = c.col(j).dot(mc.col(j)) + s.col(j).dot(ms.col(j));
                    if (imag_residue) {
                        const double im = s.col(j).dot(mc.col(j)) - c.col(j).dot(ms.col(j));
                        *imag_residue = std::max(*imag_residue, std::abs(im));
                    }
                }
            } else {
                ComplexMatrix p(n, cols);
                p.real() = c;
                p.imag() = s;
                const ComplexMatrix q = weights_ * p.conjugate();
                for (Eigen::Index j = 0; j < cols; ++j) {
                    const Complex v = (p.col(j).cwiseProduct(q.col(j))).sum();
                    out[start + j] = v.real();
                    if (imag_residue) *imag_residue = std::max(*imag_residue, std::abs(v.imag()));
                }
            }
        }
        return out;
    }

private:
    RealVector energies_;
    Matrix<Scalar> weights_;
    bool constant_ = false;
    double constant_value_ = 0.0;
};

// Tr(A rho(t + t0)) on a grid given in units of tau_lambda. `lambda` converts
// to physical time.
template <class Scalar>
Trajectory evolve_trace(const SpectralDecomposition<Scalar>& d, const StatOperator<Scalar>& pi,
                        const Observable<Scalar>& a, std::span<const double> times, double shift = 0.0,
                        double lambda = 1.0) {
    TraceEvolver<Scalar> ev(d, pi, a);
    std::vector<double> ts(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) ts[i] = physical_time(times[i] + shift, lambda);
    Trajectory out;
    out.times.assign(times.begin(), times.end());
    out.values = ev.values(ts, &out.max_imag_residue);
    out.f.reserve(ts.size());
    for (double t : ts) out.f.push_back(f_of_t(d.eigenvalues, t));
    out.provenance.kind = ScalarTraits<Scalar>::kind;
    out.provenance.dimension = d.dimension();
    out.provenance.spectral_scale = lambda;
    out.provenance.pi_label = std::string(to_string(pi.kind));
    out.provenance.observable_label = std::string(to_string(a.kind));
    out.provenance.shift = shift;
    return out;
}

// U(t) = V exp(-i E t) V^dagger; t in units of tau_lambda.
template <class Scalar>
ComplexMatrix evolve_operator(const SpectralDecomposition<Scalar>& d, double tau, double lambda = 1.0) {
    if (!d.has_vectors()) throw InvalidArgument("evolve_operator: decomposition lacks eigenvectors");
    const double t = physical_time(tau, lambda);
    const double at = std::abs(t);
    const double sign = t < 0 ? -1.0 : 1.0;
    ComplexVector phase(d.dimension());
    for (int a = 0; a < d.dimension(); ++a) {
        const double ph = d.eigenvalues[a] * at;
        phase[a] = Complex(std::cos(ph), -sign * std::sin(ph));
    }
    const ComplexMatrix v = d.eigenvectors.template cast<Complex>();
    return v * phase.asDiagonal() * v.adjoint();
}

struct LongTimeAverage {
    double value = 0.0;
    int degenerate_blocks = 0;  // blocks with more than one level
    bool degenerate() const { return degenerate_blocks > 0; }
};

// Infinite-time average of Tr(A rho(t))^power for power 1 or 2, evaluated in
// the eigenbasis. Levels closer than 1e-12*lambda are merged into blocks.
template <class Scalar>
LongTimeAverage long_time_average(const SpectralDecomposition<Scalar>& d, const StatOperator<Scalar>& pi,
                                  const Observable<Scalar>& a, int power, double lambda = 1.0) {
    if (power != 1 && power != 2) throw InvalidArgument("long_time_average: power must be 1 or 2");
    const int n = d.dimension();
    std::vector<int> block_start{0};
    for (int i = 1; i < n; ++i)
        if (d.eigenvalues[i] - d.eigenvalues[i - 1] > 1e-12 * lambda) block_start.push_back(i);
    block_start.push_back(n);
    const int nb = static_cast<int>(block_start.size()) - 1;

    LongTimeAverage out;
    for (int b = 0; b < nb; ++b)
        if (block_start[b + 1] - block_start[b] > 1) ++out.degenerate_blocks;

    TraceEvolver<Scalar> ev(d, pi, a);
    if (ev.constant()) {
        const double c = ev.values(std::vector<double>{0.0}).front();
        out.value = power == 1 ? c : c * c;
        return out;
    }
    const auto& z = ev.weights();
    if (out.degenerate_blocks == 0) {
        double diag = 0.0;
        for (int i = 0; i < n; ++i) diag += std::real(z(i, i));
        if (power == 1) {
            out.value = diag;
            return out;
        }
        double off = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (i != j) off += std::norm(z(i, j));
        out.value = diag * diag + off;
        return out;
    }
    // Block sums w_{B1 B2} = sum_{a in B1, b in B2} z_ab.
    Matrix<Scalar> w = Matrix<Scalar>::Zero(nb, nb);
    std::vector<int> owner(n);
    for (int b = 0; b < nb; ++b)
        for (int i = block_start[b]; i < block_start[b + 1]; ++i) owner[i] = b;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) w(owner[i], owner[j]) += z(i, j);
    double diag = 0.0;
    for (int b = 0; b < nb; ++b) diag += std::real(w(b, b));
    if (power == 1) {
        out.value = diag;
        return out;
    }
    double off = 0.0;
    for (int j = 0; j < nb; ++j)
        for (int i = 0; i < nb; ++i)
            if (i != j) off += std::real(w(i, j) * w(j, i));
    out.value = diag * diag + off;
    return out;
}

}  // namespace rmtherm
