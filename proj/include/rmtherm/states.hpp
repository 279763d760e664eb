#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rmtherm/core.hpp"

namespace rmtherm {

// ---------------------------------------------------------------------------
// Statistical operators

enum class PiKind { equilibrium, half_filled, pure_state, power_law, custom };

inline std::string_view to_string(PiKind k) {
    switch (k) {
        case PiKind::equilibrium: return "equilibrium";
        case PiKind::half_filled: return "half_filled";
        case PiKind::pure_state: return "pure_state";
        case PiKind::power_law: return "power_law";
        case PiKind::custom: return "custom";
    }
    return "?";
}

inline PiKind parse_pi_kind(std::string_view s) {
    for (PiKind k : {PiKind::equilibrium, PiKind::half_filled, PiKind::pure_state, PiKind::power_law, PiKind::custom})
        if (s == to_string(k)) return k;
    throw InvalidArgument("unknown statistical operator kind '" + std::string(s) + "'");
}

template <class Scalar>
struct PiSpec {
    PiKind kind = PiKind::equilibrium;
    double alpha = 0.5;                  // power_law exponent
    std::vector<double> weights;         // custom eigenvalues
    std::optional<Matrix<Scalar>> frame; // orthonormal columns |kappa>; identity when absent

    static PiSpec equilibrium() { return {PiKind::equilibrium}; }
    static PiSpec half_filled() { return {PiKind::half_filled}; }
    static PiSpec pure_state() { return {PiKind::pure_state}; }
    static PiSpec power_law(double a) { return {PiKind::power_law, a}; }
    static PiSpec custom(std::vector<double> w, std::optional<Matrix<Scalar>> basis = std::nullopt) {
        return {PiKind::custom, 0.5, std::move(w), std::move(basis)};
    }
};

template <class Scalar>
struct StatOperator {
    Matrix<Scalar> matrix;
    std::vector<double> eigenvalues;  // pi_kappa in frame order
    int rank = 0;
    double trace = 0.0;
    double trace_sq = 0.0;            // Tr Pi^2
    PiKind kind = PiKind::custom;
    bool is_equilibrium = false;      // Pi = 1/N exactly

    int dimension() const { return static_cast<int>(matrix.rows()); }
};

// Number of occupied states of the power-law operator, floor(N^alpha).
inline int power_law_rank(int n, double alpha) {
    const double k = std::pow(static_cast<double>(n), alpha);
    return std::max(1, static_cast<int>(std::floor(k + 1e-9 * k)));
}

template <class Scalar>
StatOperator<Scalar> make_pi(const PiSpec<Scalar>& spec, int n) {
    if (n < 1) throw InvalidArgument("make_pi: dimension must be positive");
    std::vector<double> w(n, 0.0);
    switch (spec.kind) {
        case PiKind::equilibrium:
            std::fill(w.begin(), w.end(), 1.0 / n);
            break;
        case PiKind::half_filled: {
            const int k = std::max(1, n / 2);
            for (int i = 0; i < k; ++i) w[i] = 1.0 / k;
            break;
        }
        case PiKind::pure_state:
            w[0] = 1.0;
            break;
        case PiKind::power_law: {
            if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
                throw InvalidArgument("make_pi: power_law exponent must lie in (0, 1)");
            const int k = std::min(n, power_law_rank(n, spec.alpha));
            for (int i = 0; i < k; ++i) w[i] = 1.0 / k;
            break;
        }
        case PiKind::custom: {
            if (static_cast<int>(spec.weights.size()) != n)
                throw InvalidArgument("make_pi: custom eigenvalue count " + std::to_string(spec.weights.size()) +
                                      " does not match dimension " + std::to_string(n));
            double sum = 0.0;
            for (double x : spec.weights) {
                if (!(x >= 0.0) || !std::isfinite(x))
                    throw InvalidArgument("make_pi: custom eigenvalues must be finite and nonnegative");
                sum += x;
            }
            if (std::abs(sum - 1.0) > 1e-10)
                throw InvalidArgument("make_pi: custom eigenvalues sum to " + std::to_string(sum) + ", expected 1");
            w = spec.weights;
            break;
        }
    }

    StatOperator<Scalar> out;
    out.kind = spec.kind;
    out.eigenvalues = w;
    out.rank = static_cast<int>(std::count_if(w.begin(), w.end(), [](double x) { return x > 0.0; }));
    out.trace_sq = 0.0;
    for (double x : w) out.trace_sq += x * x;
    out.is_equilibrium = std::all_of(w.begin(), w.end(), [&](double x) { return x == w.front(); });

    RealVector diag = Eigen::Map<const RealVector>(w.data(), n);
    if (spec.frame && !out.is_equilibrium) {
        const Matrix<Scalar>& f = *spec.frame;
        if (f.rows() != n || f.cols() != n) throw InvalidArgument("make_pi: frame must be N x N");
        const double defect = (f.adjoint() * f - Matrix<Scalar>::Identity(n, n)).cwiseAbs().maxCoeff();
        if (defect > 1e-10) throw InvalidArgument("make_pi: frame is not orthonormal");
        out.matrix = f * diag.cast<Scalar>().asDiagonal() * f.adjoint();
        out.matrix = (0.5 * (out.matrix + out.matrix.adjoint())).eval();
    } else {
        out.matrix = diag.cast<Scalar>().asDiagonal();
    }
    out.trace = std::real(out.matrix.trace());
    return out;
}

// ---------------------------------------------------------------------------
// Observables

enum class ObservableKind { diagonal, projector, near_diagonal, staggered, signed_projector, custom };

inline std::string_view to_string(ObservableKind k) {
    switch (k) {
        case ObservableKind::diagonal: return "diagonal";
        case ObservableKind::projector: return "projector";
        case ObservableKind::near_diagonal: return "near_diagonal";
        case ObservableKind::staggered: return "staggered";
        case ObservableKind::signed_projector: return "signed_projector";
        case ObservableKind::custom: return "custom";
    }
    return "?";
}

inline ObservableKind parse_observable_kind(std::string_view s) {
    for (ObservableKind k : {ObservableKind::diagonal, ObservableKind::projector, ObservableKind::near_diagonal,
                             ObservableKind::staggered, ObservableKind::signed_projector, ObservableKind::custom})
        if (s == to_string(k)) return k;
    throw InvalidArgument("unknown observable kind '" + std::string(s) + "'");
}

// staggered: diag(+1, -1, +1, ...). signed_projector(m): +1 on the first m
// basis states, -1 on the rest. near_diagonal: a0 + delta*u_j with u_j a
// linear ramp from -1 to +1 unless `values` supplies u.
template <class Scalar>
struct ObservableSpec {
    ObservableKind kind = ObservableKind::projector;
    std::vector<double> values;
    int subspace = -1;  // projector / signed_projector size; -1 means N/2
    double offset = 1.0;
    double spread = 0.0;
    std::optional<Matrix<Scalar>> matrix;

    static ObservableSpec diagonal(std::vector<double> v) { return {ObservableKind::diagonal, std::move(v)}; }
    static ObservableSpec projector(int m = -1) { return {ObservableKind::projector, {}, m}; }
    static ObservableSpec near_diagonal(double a0, double delta, std::vector<double> u = {}) {
        return {ObservableKind::near_diagonal, std::move(u), -1, a0, delta};
    }
    static ObservableSpec staggered() { return {ObservableKind::staggered}; }
    static ObservableSpec signed_projector(int m = -1) { return {ObservableKind::signed_projector, {}, m}; }
    static ObservableSpec custom(Matrix<Scalar> a) { return {ObservableKind::custom, {}, -1, 1.0, 0.0, std::move(a)}; }
};

template <class Scalar>
struct Observable {
    Matrix<Scalar> matrix;
    double trace = 0.0;
    double trace_sq = 0.0;  // Tr A^2
    bool diagonal = false;  // diagonal in the fixed basis
    ObservableKind kind = ObservableKind::custom;

    int dimension() const { return static_cast<int>(matrix.rows()); }
};

template <class Scalar>
Observable<Scalar> observable_from_matrix(Matrix<Scalar> a, ObservableKind kind = ObservableKind::custom) {
    if (a.rows() != a.cols() || a.rows() == 0) throw InvalidArgument("observable must be a nonempty square matrix");
    if (!a.allFinite()) throw InvalidArgument("observable has non-finite entries");
    const double defect = (a - a.adjoint()).cwiseAbs().maxCoeff();
    if (defect > 1e-12) throw NotHermitian("observable is not Hermitian (max defect " + std::to_string(defect) + ")");
    Observable<Scalar> out;
    out.matrix = (0.5 * (a + a.adjoint())).eval();
    out.trace = std::real(out.matrix.trace());
    out.trace_sq = out.matrix.squaredNorm();
    out.diagonal = (out.matrix - Matrix<Scalar>(out.matrix.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
    out.kind = kind;
    return out;
}

template <class Scalar>
Observable<Scalar> make_observable(const ObservableSpec<Scalar>& spec, int n) {
    if (n < 1) throw InvalidArgument("make_observable: dimension must be positive");
    RealVector d = RealVector::Zero(n);
    const int m = spec.subspace < 0 ? n / 2 : spec.subspace;
    switch (spec.kind) {
        case ObservableKind::diagonal:
            if (static_cast<int>(spec.values.size()) != n)
                throw InvalidArgument("make_observable: diagonal needs " + std::to_string(n) + " values, got " +
                                      std::to_string(spec.values.size()));
            d = Eigen::Map<const RealVector>(spec.values.data(), n);
            break;
        case ObservableKind::projector:
        case ObservableKind::signed_projector:
            if (m < 0 || m > n) throw InvalidArgument("make_observable: subspace dimension out of range");
            for (int i = 0; i < n; ++i)
                d[i] = i < m ? 1.0 : (spec.kind == ObservableKind::signed_projector ? -1.0 : 0.0);
            break;
        case ObservableKind::near_diagonal: {
            if (!(spec.spread >= 0.0)) throw InvalidArgument("make_observable: spread must be nonnegative");
            if (!spec.values.empty() && static_cast<int>(spec.values.size()) != n)
                throw InvalidArgument("make_observable: near_diagonal profile length must equal N");
            for (int i = 0; i < n; ++i) {
                double u = spec.values.empty() ? (n == 1 ? 0.0 : -1.0 + 2.0 * i / (n - 1)) : spec.values[i];
                if (std::abs(u) > 1.0) throw InvalidArgument("make_observable: near_diagonal profile needs |u| <= 1");
                d[i] = spec.offset + spec.spread * u;
            }
            break;
        }
        case ObservableKind::staggered:
            for (int i = 0; i < n; ++i) d[i] = (i % 2 == 0) ? 1.0 : -1.0;
            break;
        case ObservableKind::custom:
            if (!spec.matrix) throw InvalidArgument("make_observable: custom kind needs a matrix");
            if (spec.matrix->rows() != n) throw InvalidArgument("make_observable: custom matrix dimension mismatch");
            return observable_from_matrix<Scalar>(*spec.matrix, ObservableKind::custom);
    }
    Observable<Scalar> out;
    out.matrix = d.cast<Scalar>().asDiagonal();
    out.trace = d.sum();
    out.trace_sq = d.squaredNorm();
    out.diagonal = true;
    out.kind = spec.kind;
    return out;
}

// Tr(A^2)/(Tr A)^2; +infinity when Tr A = 0.
template <class Scalar>
double c5_ratio(const Observable<Scalar>& a) {
    if (!(a.trace_sq > 0.0)) throw InvalidArgument("c5_ratio: zero operator");
    if (a.trace == 0.0) return std::numeric_limits<double>::infinity();
    return a.trace_sq / (a.trace * a.trace);
}

// Traces entering the mean of Tr(A rho(t)).
struct PairTraces {
    double tr_a = 0.0;       // Tr A
    double tr_a_pi = 0.0;    // Tr(A Pi)
    double tr_at_pi = 0.0;   // Tr(A^T Pi)
    double tr_a_sq = 0.0;    // Tr A^2
    double tr_pi_sq = 0.0;   // Tr Pi^2
};

template <class Scalar>
PairTraces pair_traces(const Observable<Scalar>& a, const StatOperator<Scalar>& p) {
    if (a.dimension() != p.dimension()) throw InvalidArgument("observable and statistical operator differ in size");
    PairTraces t;
    t.tr_a = a.trace;
    t.tr_a_sq = a.trace_sq;
    t.tr_pi_sq = p.trace_sq;
    // Tr(A Pi) = sum_ij A_ij Pi_ji ; Tr(A^T Pi) = sum_ij A_ji Pi_ji
    t.tr_a_pi = std::real(a.matrix.cwiseProduct(p.matrix.transpose()).sum());
    t.tr_at_pi = std::real(a.matrix.cwiseProduct(p.matrix).sum());
    return t;
}

}  // namespace rmtherm
