// Relaxation of a half-filled projector: one realization, a small ensemble
// mean and the predicted mean, side by side.
#include <cstdio>
#include <vector>

#include "rmtherm/analytics.hpp"
#include "rmtherm/evolution.hpp"
#include "rmtherm/moments.hpp"

using namespace rmtherm;

int main() {
    EnsembleSpec spec{EnsembleKind::GOE, 400, 1.0, 42};
    const auto pi = make_pi(PiSpec<double>::half_filled(), spec.dimension);
    const auto a = make_observable(ObservableSpec<double>::projector(), spec.dimension);
    const auto tr = pair_traces(a, pi);

    std::vector<double> taus;
    for (double t = 0.0; t <= 12.0; t += 1.0) taus.push_back(t);

    const auto d = decompose<double>(sample_hamiltonian<double>(spec, 0));
    const auto one = evolve_trace(d, pi, a, taus);
    moments::Options opt;
    opt.threads = 0;
    const auto ens = moments::estimate_mean_and_variance_of_trace(spec, pi, a, taus, 60, opt);

    std::printf("%6s %12s %12s %12s %12s\n", "t/tl", "single", "mean", "stderr", "predicted");
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double t = physical_time(taus[i], spec.spectral_scale);
        const double p = analytics::predicted_mean(t, tr, spec.dimension, spec.spectral_scale, spec.kind);
        std::printf("%6.1f %12.6f %12.6f %12.6f %12.6f\n", taus[i], one.values[i], ens.mean[i], ens.mean_se[i], p);
    }
    return 0;
}
