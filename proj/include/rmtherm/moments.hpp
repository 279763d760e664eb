#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmtherm/analytics.hpp"
#include "rmtherm/core.hpp"
#include "rmtherm/ensemble.hpp"
#include "rmtherm/evolution.hpp"
#include "rmtherm/parallel.hpp"
#include "rmtherm/states.hpp"
#include "rmtherm/stats.hpp"

namespace rmtherm::moments {

enum class Target { first, second_corr, third_corr, fourth_corr };

inline std::string_view to_string(Target t) {
    switch (t) {
        case Target::first: return "first";
        case Target::second_corr: return "second_corr";
        case Target::third_corr: return "third_corr";
        case Target::fourth_corr: return "fourth_corr";
    }
    return "?";
}

// Second-moment factor pattern: U U or U U^* (entrywise conjugate).
enum class Pattern { uu, uu_conj };

inline std::string_view to_string(Pattern p) { return p == Pattern::uu ? "UU" : "UU*"; }

struct MomentEstimate {
    Target target = Target::first;
    std::vector<int> indices;  // (mu1, nu1, mu2, nu2, ...); empty when pooled
    std::string pattern;       // which factors are conjugated, e.g. "UUU*"
    double t = 0.0;            // units of tau_lambda
    Complex estimate;
    double standard_error = 0.0;
    int realizations = 0;
    int dimension = 0;
    bool pooled = false;
};

struct Options {
    unsigned threads = 1;
    int jackknife_groups = 20;
    bool pooled = false;             // average over all distinct cyclic index tuples
    std::uint64_t first_realization = 0;
};

// Runs `per_realization(decomposition, index)` over M realizations and
// returns the results in realization order.
template <class Scalar, class Fn>
auto over_realizations(const EnsembleSpec& spec, int m, unsigned threads, bool vectors, Fn&& per_realization,
                       std::uint64_t first = 0) {
    using R = decltype(per_realization(std::declval<const SpectralDecomposition<Scalar>&>(), std::uint64_t{}));
    std::vector<R> out(static_cast<std::size_t>(m));
    parallel_for(static_cast<std::size_t>(m), threads, [&](std::size_t r) {
        const std::uint64_t idx = first + r;
        const auto h = sample_hamiltonian<Scalar>(spec, idx);
        const auto d = decompose<Scalar>(h, spec.spectral_scale, vectors);
        out[r] = per_realization(d, idx);
    });
    return out;
}

// U_{mu nu}(t) = sum_a V_{mu a} exp(-i E_a t) conj(V_{nu a}), t physical.
template <class Scalar>
Complex entry(const SpectralDecomposition<Scalar>& d, int mu, int nu, double t) {
    Complex s = 0.0;
    const double at = std::abs(t);
    const double sign = t < 0 ? -1.0 : 1.0;
    for (int a = 0; a < d.dimension(); ++a) {
        const double ph = d.eigenvalues[a] * at;
        s += Complex(d.eigenvectors(mu, a)) * Complex(std::cos(ph), -sign * std::sin(ph)) *
             std::conj(Complex(d.eigenvectors(nu, a)));
    }
    return s;
}

// Joint cumulant of n <= 4 complex variables from per-group sample sums.
// `sample[r][k]` is the k-th factor in realization r; the cumulant is taken
// over the subset of realizations in `rows`.
inline Complex joint_cumulant(const std::vector<std::vector<Complex>>& sample, const std::vector<std::size_t>& rows,
                              int n) {
    // Mixed raw moments for every nonempty subset (bitmask) of factors.
    const int subsets = 1 << n;
    std::vector<Complex> raw(subsets, Complex(0.0));
    for (std::size_t r : rows) {
        for (int mask = 1; mask < subsets; ++mask) {
            Complex p = 1.0;
            for (int k = 0; k < n; ++k)
                if (mask & (1 << k)) p *= sample[r][k];
            raw[mask] += p;
        }
    }
    for (auto& v : raw) v /= static_cast<double>(rows.size());
    // Sum over set partitions of {0..n-1}: (-1)^(b-1) (b-1)! prod_B raw[B].
    Complex total = 0.0;
    std::vector<int> block(n, 0);
    std::function<void(int, int)> rec = [&](int k, int used) {
        if (k == n) {
            std::vector<int> masks(used, 0);
            for (int i = 0; i < n; ++i) masks[block[i]] |= 1 << i;
            Complex p = 1.0;
            for (int m : masks) p *= raw[m];
            double coef = (used % 2 == 1) ? 1.0 : -1.0;
            for (int f = 2; f < used; ++f) coef *= f;
            total += coef * p;
            return;
        }
        for (int b = 0; b <= used; ++b) {
            block[k] = b;
            rec(k + 1, std::max(used, b + 1));
        }
    };
    rec(0, 0);
    return total;
}

namespace detail {

inline void check_index(int i, int n) {
    if (i < 0 || i >= n) throw InvalidArgument("moment index " + std::to_string(i) + " out of range");
}

inline MomentEstimate jackknifed(const std::vector<std::vector<Complex>>& sample, int order, int groups) {
    const std::size_t m = sample.size();
    groups = std::max(2, std::min<int>(groups, static_cast<int>(m)));
    std::vector<std::vector<std::size_t>> members(groups);
    for (std::size_t r = 0; r < m; ++r) members[r * groups / m].push_back(r);
    auto est = [&](const std::vector<std::size_t>& keep) {
        std::vector<std::size_t> rows;
        for (auto g : keep) rows.insert(rows.end(), members[g].begin(), members[g].end());
        return joint_cumulant(sample, rows, order);
    };
    const auto jk = stats::jackknife(static_cast<std::size_t>(groups), est);
    MomentEstimate e;
    e.estimate = jk.estimate;
    e.standard_error = jk.standard_error;
    return e;
}

inline MomentEstimate plain_mean(const std::vector<Complex>& x) {
    MomentEstimate e;
    e.estimate = stats::mean(std::span<const Complex>(x));
    e.standard_error = stats::standard_error(std::span<const Complex>(x));
    return e;
}

}  // namespace detail

// Average of X_ij Y_jk Z_ki over pairwise distinct (i, j, k).
inline Complex distinct_cyclic_mean(const ComplexMatrix& x, const ComplexMatrix& y, const ComplexMatrix& z) {
    const Eigen::Index n = x.rows();
    const ComplexMatrix xy = x * y;
    const ComplexMatrix yz = y * z;
    const ComplexMatrix zx = z * x;
    const Complex full = xy.cwiseProduct(z.transpose()).sum();
    Complex s_ij = 0.0, s_jk = 0.0, s_ki = 0.0, s_all = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        s_ij += x(i, i) * yz(i, i);
        s_jk += y(i, i) * zx(i, i);
        s_ki += z(i, i) * xy(i, i);
        s_all += x(i, i) * y(i, i) * z(i, i);
    }
    const double count = static_cast<double>(n) * (n - 1) * (n - 2);
    return (full - s_ij - s_jk - s_ki + 2.0 * s_all) / count;
}

// Average of W_ij X_jk Y_kl Z_li over pairwise distinct (i, j, k, l), by
// Moebius inversion over the set partitions of the four indices.
inline Complex distinct_cyclic_mean(const ComplexMatrix& w, const ComplexMatrix& x, const ComplexMatrix& y,
                                    const ComplexMatrix& z) {
    const Eigen::Index n = w.rows();
    const ComplexMatrix wx = w * x;
    const ComplexMatrix xy = x * y;
    const ComplexMatrix yz = y * z;
    const ComplexMatrix zw = z * w;
    const Complex full = wx.cwiseProduct(yz.transpose()).sum();
    // Diagonals of the cyclic triple products.
    const ComplexVector xyz = xy.cwiseProduct(z.transpose()).rowwise().sum();
    const ComplexVector yzw = yz.cwiseProduct(w.transpose()).rowwise().sum();
    const ComplexVector zwx = zw.cwiseProduct(x.transpose()).rowwise().sum();
    const ComplexVector wxy = wx.cwiseProduct(y.transpose()).rowwise().sum();
    const ComplexVector dw = w.diagonal(), dx = x.diagonal(), dy = y.diagonal(), dz = z.diagonal();

    Complex pairs = 0.0, triples = 0.0, all = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        pairs += dw[i] * xyz[i] + dx[i] * yzw[i] + dy[i] * zwx[i] + dz[i] * wxy[i];
        pairs += wx(i, i) * yz(i, i) + xy(i, i) * zw(i, i);
        triples += dw[i] * dx[i] * yz(i, i) + dx[i] * dy[i] * zw(i, i) + dy[i] * dz[i] * wx(i, i) +
                   dz[i] * dw[i] * xy(i, i);
        all += dw[i] * dx[i] * dy[i] * dz[i];
    }
    Complex double_pairs = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double_pairs += dw[i] * x(i, j) * z(j, i) * dy[j];  // i=j, k=l
            double_pairs += dz[i] * w(i, j) * y(j, i) * dx[j];  // j=k, l=i
            double_pairs += w(i, j) * x(j, i) * y(i, j) * z(j, i);  // i=k, j=l
        }
    }
    const double count = static_cast<double>(n) * (n - 1) * (n - 2) * (n - 3);
    return (full - pairs + double_pairs + 2.0 * triples - 6.0 * all) / count;
}

// <U_{mu nu}(t)> over M realizations; t in units of tau_lambda.
template <class Scalar>
MomentEstimate estimate_first_moment(const EnsembleSpec& spec, double t, int mu, int nu, int m,
                                     const Options& opt = {}) {
    spec.validate();
    if (m < 100) throw InvalidArgument("estimate_first_moment: need at least 100 realizations");
    detail::check_index(mu, spec.dimension);
    detail::check_index(nu, spec.dimension);
    const double tp = physical_time(t, spec.spectral_scale);
    auto x = over_realizations<Scalar>(
        spec, m, opt.threads, true, [&](const auto& d, std::uint64_t) { return entry(d, mu, nu, tp); },
        opt.first_realization);
    MomentEstimate e = detail::plain_mean(x);
    e.target = Target::first;
    e.indices = {mu, nu};
    e.pattern = "U";
    e.t = t;
    e.realizations = m;
    e.dimension = spec.dimension;
    return e;
}

// Connected <U_{mu nu} U_{mu' nu'}> (or with the second factor conjugated).
template <class Scalar>
MomentEstimate estimate_second_moment_corr(const EnsembleSpec& spec, double t, std::array<int, 4> idx,
                                           Pattern pattern, int m, const Options& opt = {}) {
    spec.validate();
    if (m < 100) throw InvalidArgument("estimate_second_moment_corr: need at least 100 realizations");
    for (int i : idx) detail::check_index(i, spec.dimension);
    const double tp = physical_time(t, spec.spectral_scale);
    auto sample = over_realizations<Scalar>(
        spec, m, opt.threads, true,
        [&](const auto& d, std::uint64_t) {
            const Complex a = entry(d, idx[0], idx[1], tp);
            Complex b = entry(d, idx[2], idx[3], tp);
            if (pattern == Pattern::uu_conj) b = std::conj(b);
            return std::vector<Complex>{a, b};
        },
        opt.first_realization);
    MomentEstimate e = detail::jackknifed(sample, 2, opt.jackknife_groups);
    e.target = Target::second_corr;
    e.indices.assign(idx.begin(), idx.end());
    e.pattern = std::string(to_string(pattern));
    e.t = t;
    e.realizations = m;
    e.dimension = spec.dimension;
    return e;
}

// Totally connected third (U U U^*) or fourth (U U U^* U^*) moment. With
// opt.pooled the index tuple is ignored and every distinct cyclic tuple
// (i, j), (j, k), ... contributes; lower-order terms then vanish in
// expectation, so the raw pooled moment is reported.
template <class Scalar>
MomentEstimate estimate_higher_corr(const EnsembleSpec& spec, double t, int order, std::vector<int> idx, int m,
                                    const Options& opt = {}) {
    spec.validate();
    if (order != 3 && order != 4) throw InvalidArgument("estimate_higher_corr: order must be 3 or 4");
    if (m < 1000) throw InvalidArgument("estimate_higher_corr: need at least 1000 realizations");
    if (opt.pooled && spec.dimension < order)
        throw InvalidArgument("estimate_higher_corr: pooled mode needs N >= order");
    if (!opt.pooled) {
        if (static_cast<int>(idx.size()) != 2 * order)
            throw InvalidArgument("estimate_higher_corr: need " + std::to_string(2 * order) + " indices");
        for (int i : idx) detail::check_index(i, spec.dimension);
    }
    const double tau = t;
    constexpr int conj_from = 2;  // factors from here on are conjugated
    MomentEstimate e;
    if (opt.pooled) {
        auto x = over_realizations<Scalar>(
            spec, m, opt.threads, true,
            [&](const auto& d, std::uint64_t) {
                const ComplexMatrix u = evolve_operator(d, tau, spec.spectral_scale);
                const ComplexMatrix uc = u.conjugate();
                return order == 3 ? distinct_cyclic_mean(u, u, uc) : distinct_cyclic_mean(u, u, uc, uc);
            },
            opt.first_realization);
        e = detail::plain_mean(x);
        e.pooled = true;
    } else {
        const double tp = physical_time(t, spec.spectral_scale);
        auto sample = over_realizations<Scalar>(
            spec, m, opt.threads, true,
            [&](const auto& d, std::uint64_t) {
                std::vector<Complex> v(order);
                for (int k = 0; k < order; ++k) {
                    v[k] = entry(d, idx[2 * k], idx[2 * k + 1], tp);
                    if (k >= conj_from) v[k] = std::conj(v[k]);
                }
                return v;
            },
            opt.first_realization);
        e = detail::jackknifed(sample, order, opt.jackknife_groups);
        e.indices = idx;
    }
    e.target = order == 3 ? Target::third_corr : Target::fourth_corr;
    e.pattern = order == 3 ? "UUU*" : "UUU*U*";
    e.t = t;
    e.realizations = m;
    e.dimension = spec.dimension;
    return e;
}

// ---------------------------------------------------------------------------
// Predictions

// Free cumulant kappa_n(a_1, ..., a_n) of commuting unitaries U (+1) and U^dagger
// (-1) whose mixed moments are phi(U^p U^dagger^q) = moment(p - q).
inline double free_cumulant(const std::vector<int>& word, const std::function<double(int)>& moment) {
    const int n = static_cast<int>(word.size());
    if (n == 0) return 1.0;
    auto phi = [&](const std::vector<int>& w) {
        int k = 0;
        for (int x : w) k += x;
        return moment(k);
    };
    double total = phi(word);
    // Subtract all non-crossing partitions other than the single block.
    std::vector<int> block(n, 0);
    std::function<void(int, int)> rec = [&](int k, int used) {
        if (k == n) {
            if (used == 1) return;
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b)
                    for (int c = b + 1; c < n; ++c)
                        for (int d = c + 1; d < n; ++d)
                            if (block[a] == block[c] && block[b] == block[d] && block[a] != block[b]) return;
            double prod = 1.0;
            for (int bl = 0; bl < used; ++bl) {
                std::vector<int> sub;
                for (int i = 0; i < n; ++i)
                    if (block[i] == bl) sub.push_back(word[i]);
                prod *= free_cumulant(sub, moment);
            }
            total -= prod;
            return;
        }
        for (int b = 0; b <= used; ++b) {
            block[k] = b;
            rec(k + 1, std::max(used, b + 1));
        }
    };
    rec(0, 0);
    return total;
}

// Leading-order spectral moment <f(k t)> ~ g(|k| tau).
inline std::function<double(int)> spectral_moments(double tau) {
    return [tau](int k) { return analytics::g(std::abs(k) * tau); };
}

struct Prediction {
    Complex free_value;       // exact orthogonal/unitary averaging, leading order in 1/N
    Complex contraction;      // single Gaussian pair contraction of eigenvector entries
};

inline bool cyclic(const std::vector<int>& idx) {
    const int n = static_cast<int>(idx.size()) / 2;
    for (int k = 0; k < n; ++k) {
        if (idx[2 * k + 1] != idx[2 * ((k + 1) % n)]) return false;
        for (int l = k + 1; l < n; ++l)
            if (idx[2 * k] == idx[2 * l]) return false;
    }
    return true;
}

// t in units of tau_lambda.
inline Prediction predict_first(double t, int mu, int nu) {
    const double v = mu == nu ? analytics::g(t) : 0.0;
    return {v, v};
}

inline Prediction predict_second(double t, std::array<int, 4> i, Pattern p, int n, EnsembleKind kind) {
    const double gv = analytics::g(t);
    const double g2 = analytics::g(2.0 * t);
    const bool direct = i[0] == i[2] && i[1] == i[3];
    const bool swapped = i[0] == i[3] && i[1] == i[2];
    const double nn = n;
    Prediction out{0.0, 0.0};
    if (i[0] == i[1] || i[2] == i[3]) {
        // Diagonal entries carry extra self-contractions; only the contraction form is given.
        const double c = (direct ? 1.0 : 0.0) + (kind == EnsembleKind::GOE && swapped ? 1.0 : 0.0);
        out.contraction = c / nn * (p == Pattern::uu ? g2 : 1.0);
        out.free_value = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    if (p == Pattern::uu_conj) {
        const bool hit = direct || (kind == EnsembleKind::GOE && swapped);
        out.free_value = hit ? (1.0 - gv * gv) / nn : 0.0;
        out.contraction = ((direct ? 1.0 : 0.0) + (kind == EnsembleKind::GOE && swapped ? 1.0 : 0.0)) / nn;
    } else {
        const bool hit = kind == EnsembleKind::GOE && (direct || swapped);
        out.free_value = hit ? (g2 - gv * gv) / nn : 0.0;
        out.contraction = hit ? g2 / nn : 0.0;
    }
    return out;
}

// Cyclic U U U^* (order 3) or U U U^* U^* (order 4) pattern with distinct
// row indices; zero otherwise and always zero for GUE (phase invariance).
inline Prediction predict_higher(double t, int order, const std::vector<int>& idx, int n, EnsembleKind kind) {
    Prediction out{0.0, 0.0};
    if (!idx.empty() && !cyclic(idx)) return out;
    if (kind == EnsembleKind::GUE) return out;
    const auto mom = spectral_moments(t);
    const double nn = n;
    if (order == 3) {
        out.free_value = free_cumulant({1, 1, -1}, mom) / (nn * nn);
        out.contraction = analytics::g(t) / (nn * nn);
    } else {
        out.free_value = free_cumulant({1, 1, -1, -1}, mom) / (nn * nn * nn);
        out.contraction = 1.0 / (nn * nn * nn);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ensemble statistics of Tr(A rho(t)) and of f(t)

template <class Scalar>
struct TraceProbe {
    const StatOperator<Scalar>* pi = nullptr;
    const Observable<Scalar>* observable = nullptr;
    std::vector<double> times;  // units of tau_lambda
    double shift = 0.0;
};

struct TraceStatistics {
    std::vector<double> times;
    std::vector<double> mean, variance, mean_se, variance_se;
    RealMatrix samples;  // realizations x times
    int realizations = 0;
    int dimension = 0;
    double max_imag_residue = 0.0;
};

template <class Scalar>
std::vector<TraceStatistics> estimate_mean_and_variance_of_trace(const EnsembleSpec& spec,
                                                                 const std::vector<TraceProbe<Scalar>>& probes, int m,
                                                                 const Options& opt = {}) {
    spec.validate();
    if (m < 2) throw InvalidArgument("estimate_mean_and_variance_of_trace: need at least 2 realizations");
    for (const auto& p : probes)
        if (!p.pi || !p.observable) throw InvalidArgument("trace probe lacks Pi or A");
    const double lam = spec.spectral_scale;
    struct Row {
        std::vector<std::vector<double>> values;
        double imag = 0.0;
    };
    auto rows = over_realizations<Scalar>(
        spec, m, opt.threads, true,
        [&](const SpectralDecomposition<Scalar>& d, std::uint64_t) {
            Row r;
            for (const auto& p : probes) {
                TraceEvolver<Scalar> ev(d, *p.pi, *p.observable);
                std::vector<double> ts(p.times.size());
                for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = physical_time(p.times[i] + p.shift, lam);
                double im = 0.0;
                r.values.push_back(ev.values(ts, &im));
                r.imag = std::max(r.imag, im);
            }
            return r;
        },
        opt.first_realization);

    std::vector<TraceStatistics> out(probes.size());
    for (std::size_t k = 0; k < probes.size(); ++k) {
        auto& s = out[k];
        const auto nt = probes[k].times.size();
        s.times = probes[k].times;
        s.realizations = m;
        s.dimension = spec.dimension;
        s.samples.resize(m, static_cast<Eigen::Index>(nt));
        for (int r = 0; r < m; ++r) {
            s.max_imag_residue = std::max(s.max_imag_residue, rows[r].imag);
            for (std::size_t j = 0; j < nt; ++j) s.samples(r, static_cast<Eigen::Index>(j)) = rows[r].values[k][j];
        }
        std::vector<double> col(m);
        for (std::size_t j = 0; j < nt; ++j) {
            for (int r = 0; r < m; ++r) col[r] = s.samples(r, static_cast<Eigen::Index>(j));
            const auto sum = stats::summarize(col);
            s.mean.push_back(sum.mean);
            s.variance.push_back(sum.variance);
            s.mean_se.push_back(sum.mean_se);
            s.variance_se.push_back(sum.variance_se);
        }
    }
    return out;
}

template <class Scalar>
TraceStatistics estimate_mean_and_variance_of_trace(const EnsembleSpec& spec, const StatOperator<Scalar>& pi,
                                                    const Observable<Scalar>& a, const std::vector<double>& times,
                                                    int m, const Options& opt = {}) {
    if (m < 50) throw InvalidArgument("estimate_mean_and_variance_of_trace: need at least 50 realizations");
    std::vector<TraceProbe<Scalar>> probes{{&pi, &a, times, 0.0}};
    return std::move(estimate_mean_and_variance_of_trace(spec, probes, m, opt).front());
}

struct FormFactorStatistics {
    std::vector<double> times;         // units of tau_lambda
    std::vector<Complex> mean_f;
    std::vector<double> mean_f_se;
    std::vector<double> mean_abs2;     // <|f|^2>
    std::vector<double> mean_abs2_se;
    std::vector<double> connected;     // <|f|^2> - |<f>|^2, jackknife bias corrected
    std::vector<double> connected_se;
    std::vector<std::vector<Complex>> samples;  // realization x time
    int realizations = 0;
    int dimension = 0;
};

// Monte Carlo statistics of f(t) from eigenvalues only.
template <class Scalar>
FormFactorStatistics estimate_form_factor(const EnsembleSpec& spec, const std::vector<double>& times, int m,
                                          const Options& opt = {}) {
    spec.validate();
    if (m < 2) throw InvalidArgument("estimate_form_factor: need at least 2 realizations");
    const double lam = spec.spectral_scale;
    FormFactorStatistics s;
    s.times = times;
    s.realizations = m;
    s.dimension = spec.dimension;
    s.samples = over_realizations<Scalar>(
        spec, m, opt.threads, false,
        [&](const SpectralDecomposition<Scalar>& d, std::uint64_t) {
            std::vector<Complex> v;
            v.reserve(times.size());
            for (double t : times) v.push_back(f_of_t(d.eigenvalues, physical_time(t, lam)));
            return v;
        },
        opt.first_realization);
    const int groups = std::max(2, std::min(opt.jackknife_groups, m));
    std::vector<std::vector<std::size_t>> members(groups);
    for (int r = 0; r < m; ++r) members[static_cast<std::size_t>(r) * groups / m].push_back(r);
    for (std::size_t j = 0; j < times.size(); ++j) {
        std::vector<Complex> f(m);
        std::vector<double> a2(m);
        for (int r = 0; r < m; ++r) {
            f[r] = s.samples[r][j];
            a2[r] = std::norm(f[r]);
        }
        s.mean_f.push_back(stats::mean(std::span<const Complex>(f)));
        s.mean_f_se.push_back(stats::standard_error(std::span<const Complex>(f)));
        const auto sa = stats::summarize(a2);
        s.mean_abs2.push_back(sa.mean);
        s.mean_abs2_se.push_back(sa.mean_se);
        auto est = [&](const std::vector<std::size_t>& keep) {
            Complex mf = 0.0;
            double ma = 0.0;
            std::size_t cnt = 0;
            for (auto g : keep)
                for (auto r : members[g]) {
                    mf += f[r];
                    ma += a2[r];
                    ++cnt;
                }
            mf /= static_cast<double>(cnt);
            ma /= static_cast<double>(cnt);
            return Complex(ma - std::norm(mf), 0.0);
        };
        const auto jk = stats::jackknife(static_cast<std::size_t>(groups), est);
        s.connected.push_back(jk.estimate.real());
        s.connected_se.push_back(jk.standard_error);
    }
    return s;
}

}  // namespace rmtherm::moments
