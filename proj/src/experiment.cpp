#include "scatent/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "scatent/errors.hpp"
#include "scatent/purity.hpp"
#include "scatent/transforms.hpp"

namespace scatent {

namespace {

using json = nlohmann::json;

constexpr std::size_t kMaxScanPoints = 100000;

const char* kColumns[] = {"scan_value", "T",           "R",           "p_exact",           "p_const_amp",
                          "p_qubit",    "p_reflection", "schulman_residual", "ie_purity", "p_tra",
                          "p_ref",      "mode_overlap", "variation_t", "variation_r",       "grid_n"};

void reject_unknown_keys(const json& object, const char* where, std::initializer_list<const char*> allowed)
{
    for (const auto& item : object.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* key) { return item.key() == key; });
        if (!known) {
            throw ConfigError(std::string("unknown key '") + item.key() + "' in " + where);
        }
    }
}

const json& require_object(const json& parent, const char* key)
{
    const json& v = parent.at(key);
    if (!v.is_object()) {
        throw ConfigError(std::string("'") + key + "' must be an object");
    }
    return v;
}

double read_number(const json& object, const char* key, double fallback)
{
    if (!object.contains(key)) {
        return fallback;
    }
    const json& v = object.at(key);
    if (!v.is_number()) {
        throw ConfigError(std::string("'") + key + "' must be a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ConfigError(std::string("'") + key + "' must be finite");
    }
    return x;
}

double require_number(const json& object, const char* key, const char* where)
{
    if (!object.contains(key)) {
        throw ConfigError(std::string("missing '") + key + "' in " + where);
    }
    return read_number(object, key, 0.0);
}

std::size_t read_count(const json& object, const char* key, std::size_t fallback)
{
    if (!object.contains(key)) {
        return fallback;
    }
    const json& v = object.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

std::string read_string(const json& object, const char* key, const std::string& fallback)
{
    if (!object.contains(key)) {
        return fallback;
    }
    const json& v = object.at(key);
    if (!v.is_string()) {
        throw ConfigError(std::string("'") + key + "' must be a string");
    }
    return v.get<std::string>();
}

PotentialModel parse_potential(const json& p)
{
    const std::string type = read_string(p, "type", "");
    if (type == "hard_wall") {
        reject_unknown_keys(p, "potential", {"type"});
        return HardWall{};
    }
    if (type == "delta") {
        reject_unknown_keys(p, "potential", {"type", "strength"});
        return DeltaBarrier{read_number(p, "strength", 5.0)};
    }
    if (type == "square") {
        reject_unknown_keys(p, "potential", {"type", "height", "width"});
        return SquareBarrier{require_number(p, "height", "square potential"),
                             require_number(p, "width", "square potential")};
    }
    if (type == "double_delta") {
        reject_unknown_keys(p, "potential", {"type", "strength", "separation"});
        return DoubleDelta{require_number(p, "strength", "double_delta potential"),
                           require_number(p, "separation", "double_delta potential")};
    }
    throw ConfigError("potential type must be one of hard_wall, delta, square, double_delta (got '" + type + "')");
}

ScanAxis parse_axis(const std::string& name)
{
    if (name == "mass_ratio") return ScanAxis::mass_ratio;
    if (name == "sigma_ratio") return ScanAxis::sigma_ratio;
    if (name == "potential_strength") return ScanAxis::potential_strength;
    if (name == "k") return ScanAxis::k;
    throw ConfigError("scan axis must be one of mass_ratio, sigma_ratio, potential_strength, k (got '" + name + "')");
}

OutputFormat parse_format(const std::string& name)
{
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw ConfigError("output format must be csv or json (got '" + name + "')");
}

std::size_t scan_count(const ScanConfig& s)
{
    // Tolerate rounding so that e.g. 1 to 3 in steps of 0.1 includes 3.
    const double span = (s.stop - s.start) / s.step;
    return static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
}

std::string fmt(double x)
{
    if (!std::isfinite(x)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string fmt_json(double x) { return std::isfinite(x) ? fmt(x) : "null"; }

std::string quoted(const std::string& s) { return json(s).dump(); }

unsigned worker_count(unsigned requested, std::size_t jobs)
{
    unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

double optional_or_nan(const std::optional<double>& v)
{
    return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> row_values(const ResultRow& r)
{
    return {r.scan_value,
            r.transmission,
            r.reflection,
            r.p_exact,
            r.p_const_amp,
            r.p_qubit,
            r.p_reflection,
            r.schulman_residual,
            r.ie_purity,
            r.p_tra,
            r.p_ref,
            r.mode_overlap,
            optional_or_nan(r.variation_t),
            optional_or_nan(r.variation_r),
            static_cast<double>(r.grid_n)};
}

ResultRow compute_row(const ExperimentConfig& config, double scan_value)
{
    const GaussianProductState g = in_state(config);
    ScatterOptions opts = scatter_options(config);
    opts.threads = 1;

    const OutState out = out_state(g, config.potential, opts);
    PurityOptions popts;
    popts.require_normalized = false;

    ResultRow row;
    row.scan_value = scan_value;
    row.transmission = out.transmission;
    row.reflection = out.reflection;
    row.p_exact = purity_numeric(out.total(), popts).purity;
    row.p_tra = out.transmission > 0.0 ? purity_numeric(out.phi_tra, popts).purity : 0.0;
    row.p_ref = out.reflection > 0.0 ? purity_numeric(out.phi_ref, popts).purity : 0.0;
    row.mode_overlap = out.mode_overlap;
    row.p_const_amp = constant_amplitude_purity(g, out.transmission, out.reflection);
    row.p_qubit = qubit_model_purity(out.transmission, out.reflection);
    row.p_reflection = reflection_purity(g);
    row.schulman_residual = schulman_residual(g);
    row.ie_purity = ie_purity(g);

    const VariationDiagnostic d = amplitude_variation_diagnostic(config.potential, g, opts);
    if (d.t_defined) row.variation_t = d.t_variation;
    if (d.r_defined) row.variation_r = d.r_variation;
    row.grid_n = config.grid_n;
    return row;
}

}  // namespace

const char* to_string(ScanAxis axis) noexcept
{
    switch (axis) {
        case ScanAxis::mass_ratio: return "mass_ratio";
        case ScanAxis::sigma_ratio: return "sigma_ratio";
        case ScanAxis::potential_strength: return "potential_strength";
        case ScanAxis::k: return "k";
    }
    return "unknown";
}

ExperimentConfig parse_config(const std::string& json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }

    ExperimentConfig c;
    try {
        reject_unknown_keys(doc, "config", {"state", "potential", "grid", "scan", "amplitudes", "output", "threads"});
        if (doc.contains("state")) {
            const json& s = require_object(doc, "state");
            reject_unknown_keys(s, "state", {"k", "a", "sigma1", "sigma2", "m1", "m2"});
            c.state.k = read_number(s, "k", c.state.k);
            c.state.a = read_number(s, "a", c.state.a);
            c.state.sigma1 = read_number(s, "sigma1", c.state.sigma1);
            c.state.sigma2 = read_number(s, "sigma2", c.state.sigma2);
            c.state.m1 = read_number(s, "m1", c.state.m1);
            c.state.m2 = read_number(s, "m2", c.state.m2);
        }
        if (doc.contains("potential")) {
            c.potential = parse_potential(require_object(doc, "potential"));
        }
        if (doc.contains("grid")) {
            const json& g = require_object(doc, "grid");
            reject_unknown_keys(g, "grid", {"n", "window", "coverage"});
            c.grid_n = read_count(g, "n", c.grid_n);
            c.window = read_number(g, "window", c.window);
            const std::string coverage = read_string(g, "coverage", "error");
            if (coverage == "warn") {
                c.coverage = CoveragePolicy::warn;
            } else if (coverage != "error") {
                throw ConfigError("grid.coverage must be error or warn (got '" + coverage + "')");
            }
        }
        if (doc.contains("scan") && !doc.at("scan").is_null()) {
            const json& s = require_object(doc, "scan");
            reject_unknown_keys(s, "scan", {"axis", "start", "stop", "step"});
            ScanConfig scan;
            scan.axis = parse_axis(read_string(s, "axis", ""));
            scan.start = require_number(s, "start", "scan");
            scan.stop = require_number(s, "stop", "scan");
            scan.step = require_number(s, "step", "scan");
            c.scan = scan;
        }
        if (doc.contains("amplitudes")) {
            const json& a = require_object(doc, "amplitudes");
            reject_unknown_keys(a, "amplitudes", {"q_min", "q_max", "count"});
            if (a.contains("q_min")) c.amplitudes.q_min = read_number(a, "q_min", 0.0);
            if (a.contains("q_max")) c.amplitudes.q_max = read_number(a, "q_max", 0.0);
            c.amplitudes.count = read_count(a, "count", c.amplitudes.count);
        }
        if (doc.contains("output")) {
            const json& o = require_object(doc, "output");
            reject_unknown_keys(o, "output", {"path", "format"});
            c.output_path = read_string(o, "path", "");
            c.format = parse_format(read_string(o, "format", "csv"));
        }
        c.threads = static_cast<unsigned>(read_count(doc, "threads", 0));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

void validate(const ExperimentConfig& c)
{
    const StateConfig& s = c.state;
    if (!(s.sigma1 > 0.0) || !(s.sigma2 > 0.0)) throw ConfigError("state.sigma1 and state.sigma2 must be positive");
    if (!(s.m1 > 0.0) || !(s.m2 > 0.0)) throw ConfigError("state.m1 and state.m2 must be positive");
    if (!std::isfinite(s.k) || !std::isfinite(s.a)) throw ConfigError("state.k and state.a must be finite");
    if (c.grid_n < 16) throw ConfigError("grid.n must be at least 16");
    if (!(c.window > 0.0) || !std::isfinite(c.window)) throw ConfigError("grid.window must be positive");
    try {
        scatent::validate(c.potential);
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("potential: ") + e.what());
    }
    if (c.scan) {
        const ScanConfig& sc = *c.scan;
        if (!(sc.step > 0.0)) throw ConfigError("scan.step must be positive");
        if (!(sc.stop >= sc.start)) throw ConfigError("scan range must be ascending (start <= stop)");
        if (scan_count(sc) > kMaxScanPoints) throw ConfigError("scan has too many points");
        if (sc.axis == ScanAxis::potential_strength && std::holds_alternative<HardWall>(c.potential)) {
            throw ConfigError("potential_strength scan needs a potential with a strength parameter");
        }
        if ((sc.axis == ScanAxis::mass_ratio || sc.axis == ScanAxis::sigma_ratio) && !(sc.start > 0.0)) {
            throw ConfigError("ratio scans must start above zero");
        }
    }
    if (c.amplitudes.count < 2) throw ConfigError("amplitudes.count must be at least 2");
    if (c.amplitudes.q_min && !(*c.amplitudes.q_min > 0.0)) throw ConfigError("amplitudes.q_min must be positive");
    if (c.amplitudes.q_min && c.amplitudes.q_max && !(*c.amplitudes.q_max > *c.amplitudes.q_min)) {
        throw ConfigError("amplitudes.q_max must exceed q_min");
    }
}

std::vector<double> scan_values(const ExperimentConfig& config)
{
    std::vector<double> values;
    if (!config.scan) {
        return values;
    }
    const ScanConfig& s = *config.scan;
    const std::size_t n = scan_count(s);
    values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        values.push_back(std::min(s.start + static_cast<double>(i) * s.step, std::max(s.stop, s.start)));
    }
    return values;
}

ExperimentConfig at_scan_point(const ExperimentConfig& config, double value)
{
    ExperimentConfig c = config;
    c.scan.reset();
    if (!config.scan) {
        return c;
    }
    switch (config.scan->axis) {
        case ScanAxis::mass_ratio: c.state.m2 = c.state.m1 * value; break;
        case ScanAxis::sigma_ratio: c.state.sigma2 = c.state.sigma1 * value; break;
        case ScanAxis::k: c.state.k = value; break;
        case ScanAxis::potential_strength:
            std::visit(
                [&](auto& model) {
                    using T = std::decay_t<decltype(model)>;
                    if constexpr (std::is_same_v<T, DeltaBarrier> || std::is_same_v<T, DoubleDelta>) {
                        model.strength = value;
                    } else if constexpr (std::is_same_v<T, SquareBarrier>) {
                        model.height = value;
                    } else {
                        throw ConfigError("potential_strength scan needs a potential with a strength parameter");
                    }
                },
                c.potential);
            break;
    }
    return c;
}

GaussianProductState in_state(const ExperimentConfig& config)
{
    const StateConfig& s = config.state;
    return GaussianProductState::scattering(s.k, s.a, s.sigma1, s.sigma2, s.m1, s.m2);
}

ScatterOptions scatter_options(const ExperimentConfig& config)
{
    ScatterOptions o;
    o.n = config.grid_n;
    o.window = config.window;
    o.coverage = config.coverage;
    o.threads = worker_count(config.threads, 1u << 20);
    return o;
}

std::vector<ResultRow> run(const ExperimentConfig& config)
{
    std::vector<double> values = scan_values(config);
    const bool single = values.empty();
    if (single) {
        values.push_back(std::numeric_limits<double>::quiet_NaN());
    }

    std::vector<ResultRow> rows(values.size());
    std::vector<std::exception_ptr> errors(values.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            try {
                const ExperimentConfig point = single ? config : at_scan_point(config, values[i]);
                rows[i] = compute_row(point, values[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const unsigned workers = worker_count(config.threads, values.size());
        for (unsigned w = 1; w < workers; ++w) {
            pool.emplace_back(work);
        }
        work();
    }
    // Report the failure of the lowest scan value, independent of scheduling.
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

std::vector<CheckResult> check(const ExperimentConfig& config)
{
    ExperimentConfig base = config;
    base.scan.reset();
    const GaussianProductState g = in_state(base);
    const ScatterOptions opts = scatter_options(base);
    std::vector<CheckResult> results;

    const auto failed = [&](const char* name, double tol, const std::exception& e) {
        results.push_back({name, false, std::numeric_limits<double>::quiet_NaN(), tol, e.what()});
    };

    const BoundaryReport b = check_boundary_conditions(g, opts);
    {
        std::string detail;
        if (!b.approaching) detail = "mean relative momentum is not positive";
        else if (!b.overlap_ok) detail = "momentum supports overlap";
        else if (!b.negative_q_ok) detail = "in-state has weight at non-positive relative momentum";
        results.push_back({"boundary", b.ok(), b.overlap, opts.overlap_tolerance, detail});
    }

    // Unitarity of the closed-form S-matrix over the in-state's q range.
    {
        const double dq = std::hypot(g.masses().mu2() * g.sigma1(), g.masses().mu1() * g.sigma2());
        const double lo = std::max(std::abs(g.k1()) * 1e-3, base.state.k - base.window * dq);
        const double hi = std::max(lo * 2.0, base.state.k + base.window * dq);
        double worst = 0.0;
        try {
            for (std::size_t i = 0; i < 1000; ++i) {
                const double q = lo + (hi - lo) * static_cast<double>(i) / 999.0;
                const AmplitudePair a = amplitudes(base.potential, q, g.masses().reduced());
                worst = std::max(worst, std::abs(a.transmission() + a.reflection() - 1.0));
            }
            results.push_back({"unitarity", worst < 1e-10, worst, 1e-10, ""});
        } catch (const Error& e) {
            failed("unitarity", 1e-10, e);
        }
    }

    try {
        const OutState out = out_state(g, base.potential, opts);
        const double norm_residual = std::abs(out.transmission + out.reflection - 1.0);
        results.push_back({"norm", norm_residual < opts.norm_tolerance, norm_residual, opts.norm_tolerance, ""});
        results.push_back({"orthogonality", out.mode_overlap < opts.orthogonality_tolerance, out.mode_overlap,
                           opts.orthogonality_tolerance, ""});
        try {
            const SplitPurity sp = split_purity(out, opts);
            const double r = std::abs(sp.residual());
            results.push_back({"split", r < 1e-7, r, 1e-7, "p_total=" + fmt(sp.p_total)});
            const double excess = std::max({sp.p_tra - out.transmission * out.transmission,
                                            sp.p_ref - out.reflection * out.reflection, sp.p_total - 1.0, 0.0});
            results.push_back({"bounds", excess <= 1e-8 && sp.p_total > 0.0, excess, 1e-8, ""});
        } catch (const Error& e) {
            failed("split", 1e-7, e);
        }
    } catch (const Error& e) {
        failed("norm", opts.norm_tolerance, e);
    }

    try {
        const IeInvariance ie = ie_purity_invariance_check(g, base.potential, opts);
        const double r = std::abs(ie.residual());
        results.push_back({"ie_invariance", r < 1e-6, r, 1e-6, "p_ie=" + fmt(ie.p_ie_in)});
    } catch (const Error& e) {
        failed("ie_invariance", 1e-6, e);
    }
    return results;
}

std::vector<AmplitudeRow> amplitude_table(const ExperimentConfig& config)
{
    const double k = std::abs(config.state.k);
    const double q_min = config.amplitudes.q_min.value_or(k > 0.0 ? k / 100.0 : 0.01);
    const double q_max = config.amplitudes.q_max.value_or(k > 0.0 ? 2.0 * k : 1.0);
    if (!(q_max > q_min)) {
        throw ConfigError("amplitudes.q_max must exceed q_min");
    }
    const double m = Masses{config.state.m1, config.state.m2}.reduced();
    const std::size_t n = config.amplitudes.count;
    std::vector<AmplitudeRow> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = q_min + (q_max - q_min) * static_cast<double>(i) / static_cast<double>(n - 1);
        const AmplitudePair a = amplitudes(config.potential, q, m);
        rows.push_back({q, a.t, a.r});
    }
    return rows;
}

const std::vector<std::string>& result_columns()
{
    static const std::vector<std::string> columns(std::begin(kColumns), std::end(kColumns));
    return columns;
}

std::string format_results(const std::vector<ResultRow>& rows, OutputFormat format)
{
    const auto& cols = result_columns();
    std::ostringstream out;
    if (format == OutputFormat::csv) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out << (c ? "," : "") << cols[c];
        }
        out << '\n';
        for (const auto& row : rows) {
            const auto v = row_values(row);
            for (std::size_t c = 0; c < v.size(); ++c) {
                out << (c ? "," : "") << fmt(v[c]);
            }
            out << '\n';
        }
        return out.str();
    }
    out << "{\"schema_version\": " << kResultSchemaVersion << ", \"rows\": [";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto v = row_values(rows[i]);
        out << (i ? ",\n  {" : "\n  {");
        for (std::size_t c = 0; c < v.size(); ++c) {
            out << (c ? ", " : "") << quoted(cols[c]) << ": " << fmt_json(v[c]);
        }
        out << '}';
    }
    out << "\n]}\n";
    return out.str();
}

std::string format_checks(const std::vector<CheckResult>& checks, OutputFormat format)
{
    std::ostringstream out;
    if (format == OutputFormat::csv) {
        out << "check,status,residual,tolerance,detail\n";
        for (const auto& c : checks) {
            out << c.name << ',' << (c.passed ? "PASS" : "FAIL") << ',' << fmt(c.residual) << ','
                << fmt(c.tolerance) << ',' << quoted(c.detail) << '\n';
        }
        return out.str();
    }
    out << "{\"checks\": [";
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto& c = checks[i];
        out << (i ? ",\n  " : "\n  ") << "{\"check\": " << quoted(c.name) << ", \"passed\": "
            << (c.passed ? "true" : "false") << ", \"residual\": " << fmt_json(c.residual)
            << ", \"tolerance\": " << fmt_json(c.tolerance) << ", \"detail\": " << quoted(c.detail) << '}';
    }
    out << "\n]}\n";
    return out.str();
}

std::string format_amplitudes(const std::vector<AmplitudeRow>& rows, OutputFormat format)
{
    std::ostringstream out;
    if (format == OutputFormat::csv) {
        out << "q,t_re,t_im,r_re,r_im,T,R\n";
        for (const auto& r : rows) {
            out << fmt(r.q) << ',' << fmt(r.t.real()) << ',' << fmt(r.t.imag()) << ',' << fmt(r.r.real()) << ','
                << fmt(r.r.imag()) << ',' << fmt(std::norm(r.t)) << ',' << fmt(std::norm(r.r)) << '\n';
        }
        return out.str();
    }
    out << "{\"amplitudes\": [";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out << (i ? ",\n  " : "\n  ") << "{\"q\": " << fmt_json(r.q) << ", \"t_re\": " << fmt_json(r.t.real())
            << ", \"t_im\": " << fmt_json(r.t.imag()) << ", \"r_re\": " << fmt_json(r.r.real())
            << ", \"r_im\": " << fmt_json(r.r.imag()) << ", \"T\": " << fmt_json(std::norm(r.t))
            << ", \"R\": " << fmt_json(std::norm(r.r)) << '}';
    }
    out << "\n]}\n";
    return out.str();
}

}  // namespace scatent
