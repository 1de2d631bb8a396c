#include "opk/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "opk/certify.hpp"
#include "opk/error.hpp"
#include "opk/io.hpp"

namespace opk::cli {

namespace {

using io::Json;

struct RunConfig {
    std::string command;
    std::string input;
    std::string output;
    std::uint64_t seed = 0;
    std::string format = "json";
    unsigned jobs = 1;
    bool no_timestamp = false;
    std::vector<std::string> tol_overrides;
    Tolerances tol;

    // Subcommand options.
    std::string demo_which;
    std::vector<double> demo_w{1.0};
    std::size_t grid_n = 512;
    double demo_box = 4.0;
    ProbeOptions probe;
    std::string function = "exp(-t)";
    std::string mode = "cm";
    int ell = 3;
    int nmax = 6;
};

struct Outcome {
    Json input;
    Json result;
    int exit_code = kOk;
    std::string csv;  // set when a matrix is to be written as CSV
};

[[noreturn]] void bad_input(const std::string &what) { throw Error(ErrorCode::InvalidDescriptor, what); }

Json load_input(const RunConfig &cfg, bool required) {
    if (cfg.input.empty()) {
        if (required) bad_input("--input is required for '" + cfg.command + "'");
        return Json();
    }
    std::ifstream in(cfg.input);
    if (!in) bad_input("cannot open input file '" + cfg.input + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error &e) {
        bad_input("malformed JSON in '" + cfg.input + "': " + e.what());
    }
}

std::vector<Point> points_from_json(const Json &j, std::size_t m, const std::string &path) {
    if (!j.is_array()) bad_input("field '" + path + "': expected an array of points");
    std::vector<Point> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        Point p = io::point_from_json(j[i], path + "[" + std::to_string(i) + "]");
        if (p.size() != m) bad_input("field '" + path + "[" + std::to_string(i) + "]': point dimension differs from m");
        out.push_back(std::move(p));
    }
    return out;
}

Json points_to_json(const std::vector<Point> &points) {
    Json out = Json::array();
    for (const auto &p : points) out.push_back(p);
    return out;
}

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::string csv_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);  // prints -0 as 0
    return buf;
}

// Quoted "re,im" cells; the first row and column carry the layout labels.
std::string matrix_csv(const HermitianMatrix &a, const std::vector<std::string> &labels) {
    std::ostringstream os;
    os << "\"row\"";
    for (const auto &l : labels) os << ",\"" << l << "\"";
    os << "\n";
    for (std::size_t i = 0; i < a.dim(); ++i) {
        os << "\"" << labels[i] << "\"";
        for (std::size_t j = 0; j < a.dim(); ++j) {
            os << ",\"" << csv_number(a(i, j).real()) << "," << csv_number(a(i, j).imag()) << "\"";
        }
        os << "\n";
    }
    return os.str();
}

OperatorKernel kernel_field(const Json &in) { return io::kernel_from_json(io::require_field(in, "kernel", ""), "kernel"); }

// ------------------------------------------------------------------ commands

Outcome cmd_eval(const RunConfig &cfg) {
    const Json in = load_input(cfg, true);
    io::require_keys(in, {"kernel", "x", "y", "t", "alpha", "beta", "method"}, "");
    const OperatorKernel k = kernel_field(in);
    Outcome o;
    o.input["kernel"] = io::to_json(k);
    if (in.contains("t")) {
        if (in.contains("x") || in.contains("y") || in.contains("alpha") || in.contains("beta")) {
            bad_input("field 't': cannot be combined with x, y, alpha or beta");
        }
        const double t = io::number_from_json(in["t"], "t");
        o.input["t"] = t;
        o.result["value"] = io::to_json(radial_function_eval(k, t));
        return o;
    }
    const Point x = io::point_from_json(io::require_field(in, "x", ""), "x");
    const Point y = io::point_from_json(io::require_field(in, "y", ""), "y");
    o.input["x"] = x;
    o.input["y"] = y;
    if (in.contains("alpha") || in.contains("beta")) {
        const MultiIndex zero = MultiIndex::zero(k.ambient_dim());
        const MultiIndex alpha = in.contains("alpha") ? io::multi_index_from_json(in["alpha"], "alpha") : zero;
        const MultiIndex beta = in.contains("beta") ? io::multi_index_from_json(in["beta"], "beta") : zero;
        if (alpha.size() != k.ambient_dim() || beta.size() != k.ambient_dim()) {
            bad_input("field 'alpha'/'beta': multi-index length differs from m");
        }
        DerivMethod method = DerivMethod::Analytic;
        std::string method_name = "analytic";
        if (in.contains("method")) {
            if (!in["method"].is_string()) bad_input("field 'method': expected a string");
            method_name = in["method"].get<std::string>();
            if (method_name == "finite_difference") {
                method = DerivMethod::FiniteDifference;
            } else if (method_name != "analytic") {
                bad_input("field 'method': expected 'analytic' or 'finite_difference'");
            }
        }
        o.input["alpha"] = io::to_json(alpha);
        o.input["beta"] = io::to_json(beta);
        o.input["method"] = method_name;
        o.result["value"] = io::to_json(kernel_deriv_eval(k, alpha, beta, x, y, method));
        return o;
    }
    if (in.contains("method")) bad_input("field 'method': only valid with alpha or beta");
    o.result["value"] = io::to_json(kernel_eval(k, x, y));
    return o;
}

Outcome gram_outcome(const RunConfig &cfg, const HermitianMatrix &g, std::vector<std::string> labels,
                     const std::string &layout, Outcome o) {
    o.result["dim"] = g.dim();
    o.result["layout"] = layout;
    o.result["labels"] = labels;
    o.result["min_eigenvalue"] = min_eigenvalue(g);
    o.result["trace"] = trace(g);
    if (cfg.format == "csv") {
        o.csv = matrix_csv(g, labels);
    } else {
        o.result["matrix"] = io::to_json(g);
    }
    return o;
}

Outcome cmd_gram(const RunConfig &cfg) {
    const Json in = load_input(cfg, true);
    io::require_keys(in, {"kernel", "points"}, "");
    const OperatorKernel k = kernel_field(in);
    const auto points = points_from_json(io::require_field(in, "points", ""), k.ambient_dim(), "points");
    const BlockGram g = gram(k, points);
    Outcome o;
    o.input["kernel"] = io::to_json(k);
    o.input["points"] = points_to_json(points);
    std::vector<std::string> labels;
    for (std::size_t mu = 0; mu < points.size(); ++mu)
        for (std::size_t i = 0; i < k.matrix_dim(); ++i) labels.push_back("p" + std::to_string(mu) + ":" + std::to_string(i));
    const std::string layout = "points=" + std::to_string(points.size()) + ";ell=" + std::to_string(k.matrix_dim()) +
                               ";row=point*" + std::to_string(k.matrix_dim()) + "+component";
    return gram_outcome(cfg, g.matrix, std::move(labels), layout, std::move(o));
}

Outcome cmd_deriv_gram(const RunConfig &cfg) {
    const Json in = load_input(cfg, true);
    io::require_keys(in, {"kernel", "points", "q"}, "");
    const OperatorKernel k = kernel_field(in);
    const auto points = points_from_json(io::require_field(in, "points", ""), k.ambient_dim(), "points");
    const long long q = io::integer_from_json(io::require_field(in, "q", ""), "q");
    if (q < 0 || q > kMaxDerivOrder / 2) bad_input("field 'q': must lie in [0, " + std::to_string(kMaxDerivOrder / 2) + "]");
    const DerivBlockGram g = deriv_gram(k, points, static_cast<int>(q));
    Outcome o;
    o.input["kernel"] = io::to_json(k);
    o.input["points"] = points_to_json(points);
    o.input["q"] = q;
    std::vector<std::string> labels;
    for (std::size_t mu = 0; mu < points.size(); ++mu)
        for (const auto &alpha : g.indices)
            for (std::size_t i = 0; i < k.matrix_dim(); ++i)
                labels.push_back("p" + std::to_string(mu) + alpha.label() + ":" + std::to_string(i));
    return gram_outcome(cfg, g.matrix, std::move(labels), g.layout(), std::move(o));
}

ProbeOptions probe_options(const RunConfig &cfg, const Json &in, const std::string &path) {
    ProbeOptions p = cfg.probe;
    p.seed = cfg.seed;
    p.jobs = cfg.jobs;
    p.tol = cfg.tol.probe;
    if (in.is_null()) return p;
    io::require_keys(in, {"n", "trials", "box"}, path);
    if (in.contains("n")) {
        const long long n = io::integer_from_json(in["n"], path + ".n");
        if (n < 2 || n > 256) bad_input("field '" + path + ".n': must lie in [2, 256]");
        p.n = static_cast<std::size_t>(n);
    }
    if (in.contains("trials")) {
        const long long t = io::integer_from_json(in["trials"], path + ".trials");
        if (t < 1 || t > 100000) bad_input("field '" + path + ".trials': must lie in [1, 100000]");
        p.trials = static_cast<std::size_t>(t);
    }
    if (in.contains("box")) {
        p.box = io::number_from_json(in["box"], path + ".box");
        if (!(p.box > 0.0)) bad_input("field '" + path + ".box': must be positive");
    }
    return p;
}

Json probe_options_json(const ProbeOptions &p) { return Json{{"n", p.n}, {"trials", p.trials}, {"box", p.box}}; }

Outcome cmd_classify(const RunConfig &cfg) {
    const Json in = load_input(cfg, true);
    io::require_keys(in, {"kernel", "probe"}, "");
    const OperatorKernel k = kernel_field(in);
    if (!k.is_radial()) bad_input("field 'kernel.family': classify needs a radial family");
    const ProbeOptions p = probe_options(cfg, in.contains("probe") ? in["probe"] : Json(), "probe");
    const ClassificationReport r = classify_and_report(k.measure(), k.profile(), k.ambient_dim(), p, cfg.tol);
    Outcome o;
    o.input["kernel"] = io::to_json(k);
    o.input["probe"] = probe_options_json(p);
    o.result = io::to_json(r);
    if (!r.consistent) {
        o.exit_code = kNumericalFailure;
    } else if (r.classification.verdict == RadialVerdict::NotStrictlyPD) {
        o.exit_code = kNegativeVerdict;
    }
    return o;
}

Outcome cmd_demo(const RunConfig &cfg) {
    const Json in = load_input(cfg, false);
    std::string which = cfg.demo_which;
    std::vector<double> w = cfg.demo_w;
    std::size_t grid_n = cfg.grid_n;
    double box = cfg.demo_box;
    if (!in.is_null()) {
        io::require_keys(in, {"which", "w", "grid_n", "box"}, "");
        if (in.contains("which")) {
            if (!in["which"].is_string()) bad_input("field 'which': expected a string");
            which = in["which"].get<std::string>();
        }
        if (in.contains("w")) w = io::point_from_json(in["w"], "w");
        if (in.contains("grid_n")) {
            const long long g = io::integer_from_json(in["grid_n"], "grid_n");
            if (g < 0) bad_input("field 'grid_n': must be nonnegative");
            grid_n = static_cast<std::size_t>(g);
        }
        if (in.contains("box")) box = io::number_from_json(in["box"], "box");
    }
    Outcome o;
    o.input["which"] = which;
    CounterexampleResult r;
    if (which == "shifted-gaussian") {
        o.input["w"] = w;
        r = demo_counterexample_shifted_gaussian(w, cfg.seed, cfg.tol);
    } else if (which == "radial-bump") {
        o.input["grid_n"] = grid_n;
        o.input["box"] = box;
        if (grid_n > 4096) bad_input("field 'grid_n': must be at most 4096");
        r = demo_counterexample_radial_bump(grid_n, box, cfg.seed, cfg.tol);
    } else {
        bad_input("field 'which': expected 'shifted-gaussian' or 'radial-bump', got '" + which + "'");
    }
    o.result = io::to_json(r);
    if (!r.reproduced) o.exit_code = kNegativeVerdict;
    return o;
}

double sup_error_sin_cos(const RkhsElement &f) {
    double err = 0.0;
    for (double y : linspace(-1.0, 1.0, 1001)) {
        const CVector v = rkhs_eval(f, std::vector<double>{y});
        err = std::max({err, std::abs(v[0] - std::sin(y)), std::abs(v[1] - std::cos(y))});
    }
    return err;
}

// Gaussian {(1, I_2)} on R, targets (sin x, cos x) at n uniform centers on [-1, 1].
Outcome interp_experiment() {
    const OperatorKernel k = OperatorKernel::radial(
        RadialProfile::gaussian(), OperatorMeasure(2, {{1.0, HermitianMatrix::identity(2)}}), 1);
    Outcome o;
    o.input["experiment"] = "sin-cos";
    o.input["kernel"] = io::to_json(k);
    Json runs = Json::array();
    std::map<std::size_t, double> errors;
    for (std::size_t n : {5, 10, 20}) {
        std::vector<InterpolationDatum> data;
        for (double x : linspace(-1.0, 1.0, n)) data.push_back({{x}, {std::sin(x), std::cos(x)}});
        const InterpolationResult r = interpolate(k, data);
        errors[n] = sup_error_sin_cos(r.element);
        runs.push_back(Json{{"n", n}, {"ridge", r.ridge}, {"residual", r.residual}, {"sup_error", errors[n]}});
    }
    o.result["runs"] = runs;
    o.result["grid"] = Json{{"start", -1.0}, {"stop", 1.0}, {"n", 1001}};
    o.result["ratio_n5_over_n20"] = errors[5] / errors[20];
    return o;
}

Outcome cmd_interp(const RunConfig &cfg) {
    const Json in = load_input(cfg, false);
    if (in.is_null()) return interp_experiment();
    io::require_keys(in, {"kernel", "data", "ridge"}, "");
    const OperatorKernel k = kernel_field(in);
    const Json &data = io::require_field(in, "data", "");
    if (!data.is_array()) bad_input("field 'data': expected an array");
    double ridge = -1.0;
    if (in.contains("ridge")) {
        ridge = io::number_from_json(in["ridge"], "ridge");
        if (ridge < 0.0) bad_input("field 'ridge': must be >= 0");
    }
    std::vector<HermiteDatum> rows;
    bool hermite = false;
    Json data_out = Json::array();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::string p = "data[" + std::to_string(i) + "]";
        io::require_keys(data[i], {"x", "alpha", "target"}, p);
        HermiteDatum d;
        d.x = io::point_from_json(io::require_field(data[i], "x", p), p + ".x");
        d.alpha = data[i].contains("alpha") ? io::multi_index_from_json(data[i]["alpha"], p + ".alpha")
                                            : MultiIndex::zero(k.ambient_dim());
        d.target = io::cvector_from_json(io::require_field(data[i], "target", p), p + ".target");
        if (d.x.size() != k.ambient_dim() || d.alpha.size() != k.ambient_dim()) bad_input("field '" + p + "': dimension differs from m");
        hermite = hermite || d.alpha.order() > 0;
        data_out.push_back(Json{{"x", d.x}, {"alpha", io::to_json(d.alpha)}, {"target", io::to_json(d.target)}});
        rows.push_back(std::move(d));
    }
    InterpolationResult r = [&] {
        if (hermite) return hermite_interpolate(k, rows, ridge);
        std::vector<InterpolationDatum> plain;
        for (const auto &d : rows) plain.push_back({d.x, d.target});
        return interpolate(k, plain, ridge);
    }();
    Outcome o;
    o.input["kernel"] = io::to_json(k);
    o.input["data"] = data_out;
    if (ridge >= 0.0) o.input["ridge"] = ridge;
    Json coeffs = Json::array();
    for (const auto &a : r.element.atoms()) {
        coeffs.push_back(Json{{"x", a.x}, {"alpha", io::to_json(a.alpha)}, {"c", io::to_json(a.v)}});
    }
    o.result["method"] = hermite ? "hermite" : "values";
    o.result["ridge"] = r.ridge;
    o.result["residual"] = r.residual;
    o.result["coefficients"] = coeffs;
    return o;
}

ScalarFunction named_function(const std::string &name) {
    if (name == "exp(-t)") return [](double t) { return std::exp(-t); };
    if (name == "1/(1+t)") return [](double t) { return 1.0 / (1.0 + t); };
    if (name == "2+sin(t)") return [](double t) { return 2.0 + std::sin(t); };
    if (name == "exp(-sqrt(t))") return [](double t) { return std::exp(-std::sqrt(t)); };
    if (name == "1/sqrt(1+t)") return [](double t) { return 1.0 / std::sqrt(1.0 + t); };
    bad_input("field 'function': unknown function '" + name +
              "' (known: exp(-t), 1/(1+t), 2+sin(t), exp(-sqrt(t)), 1/sqrt(1+t))");
}

Outcome cmd_monotone(const RunConfig &cfg) {
    const Json in = load_input(cfg, false);
    std::string function = cfg.function;
    std::string mode = cfg.mode;
    int ell = cfg.ell;
    int nmax = cfg.nmax;
    double start = 0.1, stop = 10.0, h = 1e-2;
    std::size_t n = 100;
    std::vector<std::pair<double, double>> williamson;
    bool use_williamson = false;
    if (!in.is_null()) {
        io::require_keys(in, {"function", "williamson", "mode", "ell", "nmax", "grid", "h"}, "");
        if (in.contains("function") && in.contains("williamson")) bad_input("field 'function': exclusive with 'williamson'");
        if (in.contains("function")) {
            if (!in["function"].is_string()) bad_input("field 'function': expected a string");
            function = in["function"].get<std::string>();
        }
        if (in.contains("williamson")) {
            use_williamson = true;
            const Json &w = in["williamson"];
            if (!w.is_array()) bad_input("field 'williamson': expected an array of [r, lambda] pairs");
            for (std::size_t i = 0; i < w.size(); ++i) {
                const std::string p = "williamson[" + std::to_string(i) + "]";
                if (!w[i].is_array() || w[i].size() != 2) bad_input("field '" + p + "': expected [r, lambda]");
                williamson.emplace_back(io::number_from_json(w[i][0], p + "[0]"), io::number_from_json(w[i][1], p + "[1]"));
            }
        }
        if (in.contains("mode")) {
            if (!in["mode"].is_string()) bad_input("field 'mode': expected a string");
            mode = in["mode"].get<std::string>();
        }
        if (in.contains("ell")) ell = static_cast<int>(io::integer_from_json(in["ell"], "ell"));
        if (in.contains("nmax")) nmax = static_cast<int>(io::integer_from_json(in["nmax"], "nmax"));
        if (in.contains("h")) h = io::number_from_json(in["h"], "h");
        if (in.contains("grid")) {
            const Json &g = in["grid"];
            io::require_keys(g, {"start", "stop", "n"}, "grid");
            start = io::number_from_json(io::require_field(g, "start", "grid"), "grid.start");
            stop = io::number_from_json(io::require_field(g, "stop", "grid"), "grid.stop");
            const long long gn = io::integer_from_json(io::require_field(g, "n", "grid"), "grid.n");
            if (gn < 2 || gn > 100000) bad_input("field 'grid.n': must lie in [2, 100000]");
            n = static_cast<std::size_t>(gn);
        }
    }
    if (mode != "cm" && mode != "ell_cm") bad_input("field 'mode': expected 'cm' or 'ell_cm'");
    if (nmax < 0 || nmax > 32) bad_input("field 'nmax': must lie in [0, 32]");
    if (ell < 2 || ell > 32) bad_input("field 'ell': must lie in [2, 32]");
    if (!(h > 0.0)) bad_input("field 'h': must be positive");

    Outcome o;
    const ScalarFunction f = use_williamson ? williamson_construct(williamson, ell) : named_function(function);
    if (use_williamson) {
        Json atoms = Json::array();
        for (const auto &[r, l] : williamson) atoms.push_back(Json::array({r, l}));
        o.input["williamson"] = atoms;
    } else {
        o.input["function"] = function;
    }
    o.input["mode"] = mode;
    if (mode == "cm") {
        o.input["nmax"] = nmax;
    } else {
        o.input["ell"] = ell;
    }
    o.input["grid"] = Json{{"start", start}, {"stop", stop}, {"n", n}};
    o.input["h"] = h;

    const std::vector<double> grid = linspace(start, stop, n);
    bool passed = false;
    if (mode == "cm") {
        const MonotoneReport r = completely_monotone_check(f, grid, nmax, h);
        o.result = io::to_json(r);
        passed = r.passed;
    } else {
        const EllCmReport r = ell_cm_check(f, ell, grid, h);
        o.result = io::to_json(r);
        passed = r.passed;
    }
    if (!passed) o.exit_code = kNegativeVerdict;
    return o;
}

Outcome cmd_probe(const RunConfig &cfg) {
    const Json in = load_input(cfg, true);
    io::require_keys(in, {"kernel", "n", "trials", "box"}, "");
    const OperatorKernel k = kernel_field(in);
    Json opts = Json::object();
    for (const char *key : {"n", "trials", "box"})
        if (in.contains(key)) opts[key] = in[key];
    const ProbeOptions p = probe_options(cfg, opts, "");
    const ProbeReport r = probe_strict_pd(k, p);
    Outcome o;
    o.input["kernel"] = io::to_json(k);
    const Json echoed = probe_options_json(p);
    for (auto it = echoed.begin(); it != echoed.end(); ++it) o.input[it.key()] = it.value();
    o.result = io::to_json(r);
    if (r.violation_found()) o.exit_code = kNegativeVerdict;
    return o;
}

// ------------------------------------------------------------------- driver

void write_text(const std::string &path, const std::string &text, std::ostream &out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) bad_input("cannot open output file '" + path + "'");
    f << text;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::IllConditioned:
        case ErrorCode::InternalError: return kNumericalFailure;
        default: return kInputError;
    }
}

int dispatch(RunConfig &cfg, std::ostream &out) {
    for (const auto &spec : cfg.tol_overrides) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) bad_input("--tol expects NAME=VALUE, got '" + spec + "'");
        const std::string value = spec.substr(eq + 1);
        char *end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        if (value.empty() || *end != '\0') bad_input("--tol value for '" + spec.substr(0, eq) + "' is not a number");
        cfg.tol.set(spec.substr(0, eq), v);
    }
    if (cfg.format == "csv" && cfg.command != "gram" && cfg.command != "deriv-gram") {
        bad_input("--format csv applies only to gram and deriv-gram");
    }
    if (cfg.format == "csv" && cfg.output.empty()) bad_input("--format csv requires --output (the sidecar goes to OUTPUT.json)");

    Outcome o;
    if (cfg.command == "eval") o = cmd_eval(cfg);
    else if (cfg.command == "gram") o = cmd_gram(cfg);
    else if (cfg.command == "deriv-gram") o = cmd_deriv_gram(cfg);
    else if (cfg.command == "classify") o = cmd_classify(cfg);
    else if (cfg.command == "demo") o = cmd_demo(cfg);
    else if (cfg.command == "interp") o = cmd_interp(cfg);
    else if (cfg.command == "monotone") o = cmd_monotone(cfg);
    else if (cfg.command == "probe") o = cmd_probe(cfg);
    else bad_input("unknown command '" + cfg.command + "'");

    Json report;
    report["command"] = cfg.command;
    report["version"] = kVersion;
    report["seed"] = cfg.seed;
    report["tolerances"] = io::to_json(cfg.tol);
    report["input"] = o.input;
    report["result"] = o.result;
    report["exit_code"] = o.exit_code;
    if (!cfg.no_timestamp) report["timestamp"] = timestamp_utc();

    if (!o.csv.empty()) {
        write_text(cfg.output, o.csv, out);
        write_text(cfg.output + ".json", report.dump(2) + "\n", out);
    } else {
        write_text(cfg.output, report.dump(2) + "\n", out);
    }
    return o.exit_code;
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    RunConfig cfg;
    CLI::App app{"Operator-valued kernel toolkit", "opk"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);
    app.add_option("--input", cfg.input, "Input descriptor (JSON)");
    app.add_option("--output", cfg.output, "Output path (default stdout)");
    app.add_option("--seed", cfg.seed, "Random seed");
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--jobs", cfg.jobs, "Worker threads for probe trials")->check(CLI::Range(1u, 256u));
    app.add_flag("--no-timestamp", cfg.no_timestamp, "Omit the timestamp from reports");
    app.add_option("--tol", cfg.tol_overrides, "Tolerance override NAME=VALUE")->take_all();

    auto add_probe_flags = [&](CLI::App *sub) {
        sub->add_option("--n", cfg.probe.n, "Points per design")->check(CLI::Range(std::size_t{2}, std::size_t{256}));
        sub->add_option("--trials", cfg.probe.trials, "Number of designs")->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
        sub->add_option("--box", cfg.probe.box, "Half-width of the sampling box")->check(CLI::PositiveNumber);
    };

    app.add_subcommand("eval", "Evaluate K(x, y), its derivatives or F(t)");
    app.add_subcommand("gram", "Block Gram matrix at a point design");
    app.add_subcommand("deriv-gram", "Derivative block Gram matrix");
    add_probe_flags(app.add_subcommand("classify", "Exact radial classification with probes"));
    auto *demo = app.add_subcommand("demo", "Counterexample constructions");
    demo->add_option("which", cfg.demo_which, "shifted-gaussian | radial-bump");
    demo->add_option("--w", cfg.demo_w, "Shift vector for shifted-gaussian");
    demo->add_option("--grid-n", cfg.grid_n, "Grid size for radial-bump");
    demo->add_option("--box", cfg.demo_box, "Half-width of the radial-bump grid");
    app.add_subcommand("interp", "Interpolation (built-in sin/cos experiment without --input)");
    auto *mono = app.add_subcommand("monotone", "Complete / ell-times monotonicity checks");
    mono->add_option("--function", cfg.function, "Named test function");
    mono->add_option("--mode", cfg.mode, "cm | ell_cm");
    mono->add_option("--ell", cfg.ell, "Order for ell_cm mode");
    mono->add_option("--nmax", cfg.nmax, "Highest difference order for cm mode");
    add_probe_flags(app.add_subcommand("probe", "Random-design strict positive definiteness probe"));

    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    try {
        app.parse(args);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        return dispatch(cfg, out);
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
}

}  // namespace opk::cli
