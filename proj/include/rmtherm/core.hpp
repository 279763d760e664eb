#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace rmtherm {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Gaussian orthogonal (real symmetric) or unitary (complex Hermitian) ensemble.
enum class EnsembleKind { GOE, GUE };

// Dyson index: 1 for GOE, 2 for GUE.
constexpr int dyson_index(EnsembleKind kind) { return kind == EnsembleKind::GOE ? 1 : 2; }

inline std::string_view to_string(EnsembleKind kind) {
    return kind == EnsembleKind::GOE ? "GOE" : "GUE";
}

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NotHermitian : public Error {
public:
    using Error::Error;
};

class EigensolverFailure : public Error {
public:
    using Error::Error;
};

inline EnsembleKind parse_ensemble_kind(std::string_view text) {
    if (text == "GOE" || text == "goe") return EnsembleKind::GOE;
    if (text == "GUE" || text == "gue") return EnsembleKind::GUE;
    throw InvalidArgument("unknown ensemble kind '" + std::string(text) + "' (expected GOE or GUE)");
}

template <class Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr EnsembleKind kind = EnsembleKind::GOE;
};

template <>
struct ScalarTraits<Complex> {
    static constexpr EnsembleKind kind = EnsembleKind::GUE;
};

// Calls fn with a value of the scalar type matching `kind` (double for GOE,
// std::complex<double> for GUE).
template <class Fn>
decltype(auto) visit_kind(EnsembleKind kind, Fn&& fn) {
    if (kind == EnsembleKind::GOE) return fn(double{});
    return fn(Complex{});
}

}  // namespace rmtherm
