#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmtherm/analytics.hpp"
#include "rmtherm/ensemble.hpp"
#include "rmtherm/io.hpp"
#include "rmtherm/states.hpp"

namespace rmtherm {

// Invalid config field; path() is a JSON pointer such as "/time_grid/points".
class ConfigError : public InvalidArgument {
public:
    ConfigError(std::string path, const std::string& what)
        : InvalidArgument((path.empty() ? std::string("/") : path) + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// Times in units of tau_lambda.
struct TimeGrid {
    double start = -20.0;
    double stop = 20.0;
    int points = 161;
    double shift = 0.0;

    std::vector<double> values() const {
        std::vector<double> t(static_cast<std::size_t>(points));
        if (points == 1) {
            t[0] = start;
            return t;
        }
        for (int i = 0; i < points; ++i) {
            const double u = static_cast<double>(i) / (points - 1);
            t[static_cast<std::size_t>(i)] = start + (stop - start) * u;
        }
        // Symmetric grids are made exactly symmetric.
        if (start == -stop)
            for (int i = 0; i < points / 2; ++i)
                t[static_cast<std::size_t>(points - 1 - i)] = -t[static_cast<std::size_t>(i)];
        if (points % 2 == 1 && start == -stop) t[static_cast<std::size_t>(points / 2)] = 0.0;
        return t;
    }
};

struct PiConfig {
    std::string kind = "half_filled";
    double alpha = 0.5;
    std::vector<double> weights;
};

struct ObservableConfig {
    std::string kind = "projector";
    int subspace = -1;
    double offset = 1.0;
    double spread = 0.0;
    std::vector<double> values;
};

struct OutputConfig {
    std::string directory = "out";
    std::string format = "csv";
    std::string prefix = "run";
};

struct ComparisonConfig {
    bool mean = true;
    bool variance_scaling = false;
    bool moments = false;
    bool gue_vs_goe = false;
    bool eth = false;
    bool include_corr = true;
    std::string mean_model = "leading_order";  // or "invariant"
    std::string corr_convention = "connected_form_factor";
    std::vector<int> variance_dimensions{128, 256, 512, 1024};
    double variance_time = 2.0;
    double plateau_start = 50.0;
    double plateau_stop = 100.0;
    int plateau_points = 51;
};

struct GateConfig {
    double z_max = 4.0;
    double pass_fraction = 0.95;
    double slope_target = -1.0;
    double slope_tolerance = 0.3;
    double scaling_factor = 2.0;
};

struct MomentSuiteConfig {
    int dimension = 200;
    int realizations = 400;
    std::vector<double> times{0.5, 1.0, 2.0, 4.0, 8.0, 12.0};
    int higher_realizations = 1000;
    std::vector<int> higher_dimensions{50, 100, 200};
    double higher_time = 2.5;
};

struct BandConfig {
    std::string shape = "gaussian";
    double width = 0.2;
    std::vector<double> omega;
    std::vector<double> weight;
};

struct OracleConfig {
    double start = -20.0;
    double stop = 20.0;
    int points = 401;
    int dimension = 1000;
    BandConfig band;
};

struct SampleConfig {
    int bins = 60;
    double window = 1.8;  // deviation checked on |E| < window * lambda
};

struct ExperimentConfig {
    std::string name = "experiment";
    EnsembleSpec ensemble;
    PiConfig pi;
    ObservableConfig observable;
    TimeGrid time_grid;
    int realizations = 200;
    unsigned threads = 0;
    OutputConfig output;
    ComparisonConfig compare;
    GateConfig gates;
    MomentSuiteConfig moments;
    OracleConfig oracle;
    SampleConfig sample;

    void validate() const;
    io::Format format() const { return io::parse_format(output.format); }
    analytics::CorrConvention corr_convention() const { return analytics::parse_corr_convention(compare.corr_convention); }
};

namespace detail {

using json = io::json;

// Reads optional fields of one JSON object, remembering which keys were seen
// so unknown keys can be reported.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "expected an object, got " + std::string(j_.type_name()));
    }

    std::string at(const std::string& key) const { return path_ + "/" + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void read(const std::string& key, double& out) {
        if (auto p = find(key)) out = number(*p, at(key));
    }
    void read(const std::string& key, int& out) {
        if (auto p = find(key)) out = integer(*p, at(key));
    }
    void read(const std::string& key, unsigned& out) {
        if (auto p = find(key)) {
            const int v = integer(*p, at(key));
            if (v < 0) throw ConfigError(at(key), "must be nonnegative");
            out = static_cast<unsigned>(v);
        }
    }
    void read(const std::string& key, std::uint64_t& out) {
        if (auto p = find(key)) {
            if (!p->is_number_integer() || (p->is_number_integer() && !p->is_number_unsigned() && p->get<std::int64_t>() < 0))
                throw ConfigError(at(key), "expected an unsigned 64-bit integer");
            out = p->get<std::uint64_t>();
        }
    }
    void read(const std::string& key, bool& out) {
        if (auto p = find(key)) {
            if (!p->is_boolean()) throw ConfigError(at(key), "expected true or false, got " + std::string(p->type_name()));
            out = p->get<bool>();
        }
    }
    void read(const std::string& key, std::string& out) {
        if (auto p = find(key)) {
            if (!p->is_string()) throw ConfigError(at(key), "expected a string, got " + std::string(p->type_name()));
            out = p->get<std::string>();
        }
    }
    void read(const std::string& key, std::vector<double>& out) {
        if (auto p = find(key)) {
            if (!p->is_array()) throw ConfigError(at(key), "expected an array of numbers");
            out.clear();
            for (std::size_t i = 0; i < p->size(); ++i) out.push_back(number((*p)[i], at(key) + "/" + std::to_string(i)));
        }
    }
    void read(const std::string& key, std::vector<int>& out) {
        if (auto p = find(key)) {
            if (!p->is_array()) throw ConfigError(at(key), "expected an array of integers");
            out.clear();
            for (std::size_t i = 0; i < p->size(); ++i) out.push_back(integer((*p)[i], at(key) + "/" + std::to_string(i)));
        }
    }

    template <class Fn>
    void section(const std::string& key, Fn&& fn) {
        if (auto p = find(key)) {
            Fields sub(*p, at(key));
            fn(sub);
            sub.finish();
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(at(it.key()), "unknown field");
    }

private:
    static double number(const json& v, const std::string& path) {
        if (!v.is_number()) throw ConfigError(path, "expected a number, got " + std::string(v.type_name()));
        return v.get<double>();
    }
    static int integer(const json& v, const std::string& path) {
        if (!v.is_number_integer()) throw ConfigError(path, "expected an integer, got " + std::string(v.type_name()));
        const auto x = v.get<std::int64_t>();
        if (x < INT32_MIN || x > INT32_MAX) throw ConfigError(path, "integer out of range");
        return static_cast<int>(x);
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class Fn>
void checked(const std::string& path, Fn&& fn) {
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace detail

inline void ExperimentConfig::validate() const {
    using detail::checked;
    if (name.empty() || name.find_first_of("/\\") != std::string::npos)
        throw ConfigError("/name", "must be a nonempty file-name-safe string");
    checked("/ensemble", [&] { ensemble.validate(); });
    checked("/pi/kind", [&] { parse_pi_kind(pi.kind); });
    if (pi.kind == "power_law" && !(pi.alpha > 0.0 && pi.alpha <= 1.0))
        throw ConfigError("/pi/alpha", "must lie in (0, 1]");
    if (pi.kind == "custom" && static_cast<int>(pi.weights.size()) != ensemble.dimension)
        throw ConfigError("/pi/weights", "needs exactly ensemble.dimension entries");
    checked("/observable/kind", [&] { parse_observable_kind(observable.kind); });
    if (observable.subspace > ensemble.dimension)
        throw ConfigError("/observable/subspace", "exceeds ensemble.dimension");
    if (observable.kind == "diagonal" && static_cast<int>(observable.values.size()) != ensemble.dimension)
        throw ConfigError("/observable/values", "needs exactly ensemble.dimension entries");
    if (observable.kind == "custom") throw ConfigError("/observable/kind", "custom matrices are library-only");
    if (time_grid.points < 1) throw ConfigError("/time_grid/points", "must be >= 1");
    if (!(time_grid.stop >= time_grid.start)) throw ConfigError("/time_grid/stop", "must be >= start");
    if (realizations < 2) throw ConfigError("/realizations", "must be >= 2");
    checked("/output/format", [&] { io::parse_format(output.format); });
    if (output.prefix.find_first_of("/\\") != std::string::npos)
        throw ConfigError("/output/prefix", "must not contain path separators");
    if (compare.mean_model != "leading_order" && compare.mean_model != "invariant")
        throw ConfigError("/compare/mean_model", "expected leading_order or invariant");
    checked("/compare/corr_convention", [&] { analytics::parse_corr_convention(compare.corr_convention); });
    if (compare.variance_scaling && compare.variance_dimensions.size() < 2)
        throw ConfigError("/compare/variance_dimensions", "needs at least two dimensions");
    for (std::size_t i = 0; i < compare.variance_dimensions.size(); ++i)
        if (compare.variance_dimensions[i] < 2)
            throw ConfigError("/compare/variance_dimensions/" + std::to_string(i), "must be >= 2");
    if (compare.plateau_points < 2 || !(compare.plateau_stop > compare.plateau_start))
        throw ConfigError("/compare/plateau_stop", "plateau window needs stop > start and >= 2 points");
    if (!(gates.z_max > 0.0)) throw ConfigError("/gates/z_max", "must be positive");
    if (!(gates.pass_fraction > 0.0 && gates.pass_fraction <= 1.0))
        throw ConfigError("/gates/pass_fraction", "must lie in (0, 1]");
    if (!(gates.slope_tolerance > 0.0)) throw ConfigError("/gates/slope_tolerance", "must be positive");
    if (!(gates.scaling_factor > 1.0)) throw ConfigError("/gates/scaling_factor", "must exceed 1");
    if (moments.dimension < 2) throw ConfigError("/moments/dimension", "must be >= 2");
    if (moments.realizations < 100) throw ConfigError("/moments/realizations", "must be >= 100");
    if (moments.higher_realizations < 1000) throw ConfigError("/moments/higher_realizations", "must be >= 1000");
    if (moments.times.empty()) throw ConfigError("/moments/times", "must not be empty");
    for (std::size_t i = 0; i < moments.higher_dimensions.size(); ++i)
        if (moments.higher_dimensions[i] < 4)
            throw ConfigError("/moments/higher_dimensions/" + std::to_string(i), "must be >= 4");
    if (oracle.points < 1 || !(oracle.stop >= oracle.start)) throw ConfigError("/oracle/points", "empty oracle grid");
    if (oracle.dimension < 2) throw ConfigError("/oracle/dimension", "must be >= 2");
    if (oracle.band.shape != "gaussian" && oracle.band.shape != "rectangular" && oracle.band.shape != "custom")
        throw ConfigError("/oracle/band/shape", "expected gaussian, rectangular or custom");
    if (sample.bins < 1) throw ConfigError("/sample/bins", "must be >= 1");
    if (!(sample.window > 0.0 && sample.window < 2.0)) throw ConfigError("/sample/window", "must lie in (0, 2)");
}

inline ExperimentConfig config_from_json(const io::json& j) {
    ExperimentConfig c;
    detail::Fields f(j, "");
    f.read("name", c.name);
    f.section("ensemble", [&](detail::Fields& s) {
        std::string kind(to_string(c.ensemble.kind));
        s.read("kind", kind);
        detail::checked(s.at("kind"), [&] { c.ensemble.kind = parse_ensemble_kind(kind); });
        s.read("dimension", c.ensemble.dimension);
        s.read("spectral_scale", c.ensemble.spectral_scale);
        s.read("master_seed", c.ensemble.master_seed);
    });
    f.section("pi", [&](detail::Fields& s) {
        s.read("kind", c.pi.kind);
        s.read("alpha", c.pi.alpha);
        s.read("weights", c.pi.weights);
    });
    f.section("observable", [&](detail::Fields& s) {
        s.read("kind", c.observable.kind);
        s.read("subspace", c.observable.subspace);
        s.read("offset", c.observable.offset);
        s.read("spread", c.observable.spread);
        s.read("values", c.observable.values);
    });
    f.section("time_grid", [&](detail::Fields& s) {
        s.read("start", c.time_grid.start);
        s.read("stop", c.time_grid.stop);
        s.read("points", c.time_grid.points);
        s.read("shift", c.time_grid.shift);
    });
    f.read("realizations", c.realizations);
    f.read("threads", c.threads);
    f.section("output", [&](detail::Fields& s) {
        s.read("directory", c.output.directory);
        s.read("format", c.output.format);
        s.read("prefix", c.output.prefix);
    });
    f.section("compare", [&](detail::Fields& s) {
        s.read("mean", c.compare.mean);
        s.read("variance_scaling", c.compare.variance_scaling);
        s.read("moments", c.compare.moments);
        s.read("gue_vs_goe", c.compare.gue_vs_goe);
        s.read("eth", c.compare.eth);
        s.read("include_corr", c.compare.include_corr);
        s.read("mean_model", c.compare.mean_model);
        s.read("corr_convention", c.compare.corr_convention);
        s.read("variance_dimensions", c.compare.variance_dimensions);
        s.read("variance_time", c.compare.variance_time);
        s.read("plateau_start", c.compare.plateau_start);
        s.read("plateau_stop", c.compare.plateau_stop);
        s.read("plateau_points", c.compare.plateau_points);
    });
    f.section("gates", [&](detail::Fields& s) {
        s.read("z_max", c.gates.z_max);
        s.read("pass_fraction", c.gates.pass_fraction);
        s.read("slope_target", c.gates.slope_target);
        s.read("slope_tolerance", c.gates.slope_tolerance);
        s.read("scaling_factor", c.gates.scaling_factor);
    });
    f.section("moments", [&](detail::Fields& s) {
        s.read("dimension", c.moments.dimension);
        s.read("realizations", c.moments.realizations);
        s.read("times", c.moments.times);
        s.read("higher_realizations", c.moments.higher_realizations);
        s.read("higher_dimensions", c.moments.higher_dimensions);
        s.read("higher_time", c.moments.higher_time);
    });
    f.section("oracle", [&](detail::Fields& s) {
        s.read("start", c.oracle.start);
        s.read("stop", c.oracle.stop);
        s.read("points", c.oracle.points);
        s.read("dimension", c.oracle.dimension);
        s.section("band", [&](detail::Fields& b) {
            b.read("shape", c.oracle.band.shape);
            b.read("width", c.oracle.band.width);
            b.read("omega", c.oracle.band.omega);
            b.read("weight", c.oracle.band.weight);
        });
    });
    f.section("sample", [&](detail::Fields& s) {
        s.read("bins", c.sample.bins);
        s.read("window", c.sample.window);
    });
    f.finish();
    c.validate();
    return c;
}

inline io::json to_json(const ExperimentConfig& c) {
    using json = io::json;
    return json{
        {"name", c.name},
        {"ensemble",
         {{"kind", std::string(to_string(c.ensemble.kind))},
          {"dimension", c.ensemble.dimension},
          {"spectral_scale", c.ensemble.spectral_scale},
          {"master_seed", c.ensemble.master_seed}}},
        {"pi", {{"kind", c.pi.kind}, {"alpha", c.pi.alpha}, {"weights", c.pi.weights}}},
        {"observable",
         {{"kind", c.observable.kind},
          {"subspace", c.observable.subspace},
          {"offset", c.observable.offset},
          {"spread", c.observable.spread},
          {"values", c.observable.values}}},
        {"time_grid",
         {{"start", c.time_grid.start},
          {"stop", c.time_grid.stop},
          {"points", c.time_grid.points},
          {"shift", c.time_grid.shift}}},
        {"realizations", c.realizations},
        {"threads", c.threads},
        {"output", {{"directory", c.output.directory}, {"format", c.output.format}, {"prefix", c.output.prefix}}},
        {"compare",
         {{"mean", c.compare.mean},
          {"variance_scaling", c.compare.variance_scaling},
          {"moments", c.compare.moments},
          {"gue_vs_goe", c.compare.gue_vs_goe},
          {"eth", c.compare.eth},
          {"include_corr", c.compare.include_corr},
          {"mean_model", c.compare.mean_model},
          {"corr_convention", c.compare.corr_convention},
          {"variance_dimensions", c.compare.variance_dimensions},
          {"variance_time", c.compare.variance_time},
          {"plateau_start", c.compare.plateau_start},
          {"plateau_stop", c.compare.plateau_stop},
          {"plateau_points", c.compare.plateau_points}}},
        {"gates",
         {{"z_max", c.gates.z_max},
          {"pass_fraction", c.gates.pass_fraction},
          {"slope_target", c.gates.slope_target},
          {"slope_tolerance", c.gates.slope_tolerance},
          {"scaling_factor", c.gates.scaling_factor}}},
        {"moments",
         {{"dimension", c.moments.dimension},
          {"realizations", c.moments.realizations},
          {"times", c.moments.times},
          {"higher_realizations", c.moments.higher_realizations},
          {"higher_dimensions", c.moments.higher_dimensions},
          {"higher_time", c.moments.higher_time}}},
        {"oracle",
         {{"start", c.oracle.start},
          {"stop", c.oracle.stop},
          {"points", c.oracle.points},
          {"dimension", c.oracle.dimension},
          {"band",
           {{"shape", c.oracle.band.shape},
            {"width", c.oracle.band.width},
            {"omega", c.oracle.band.omega},
            {"weight", c.oracle.band.weight}}}}},
        {"sample", {{"bins", c.sample.bins}, {"window", c.sample.window}}},
    };
}

inline ExperimentConfig parse_config(const std::string& text) {
    io::json j;
    try {
        j = io::json::parse(text);
    } catch (const io::json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(io::read_text(path)); }

template <class Scalar>
PiSpec<Scalar> pi_spec(const PiConfig& c) {
    PiSpec<Scalar> s;
    s.kind = parse_pi_kind(c.kind);
    s.alpha = c.alpha;
    s.weights = c.weights;
    return s;
}

template <class Scalar>
ObservableSpec<Scalar> observable_spec(const ObservableConfig& c) {
    ObservableSpec<Scalar> s;
    s.kind = parse_observable_kind(c.kind);
    s.subspace = c.subspace;
    s.offset = c.offset;
    s.spread = c.spread;
    s.values = c.values;
    return s;
}

inline analytics::BandProfile band_profile(const BandConfig& c) {
    analytics::BandProfile p;
    if (c.shape == "gaussian") p = analytics::BandProfile::gaussian(c.width);
    else if (c.shape == "rectangular") p = analytics::BandProfile::rectangular(c.width);
    else p = analytics::BandProfile::custom(c.omega, c.weight);
    detail::checked("/oracle/band", [&] { p.validate(); });
    return p;
}

}  // namespace rmtherm
