#include "opk/io.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "opk/error.hpp"

namespace opk::io {

namespace {

[[noreturn]] void fail(const std::string &path, const std::string &what) {
    throw Error(ErrorCode::InvalidDescriptor, "field '" + path + "': " + what);
}

std::string at(const std::string &path, const char *key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string &path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json &require_array(const Json &j, const std::string &path) {
    if (!j.is_array()) fail(path, "expected an array");
    return j;
}

std::vector<double> numbers(const Json &j, const std::string &path) {
    require_array(j, path);
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_from_json(j[i], at(path, i)));
    return out;
}

std::vector<std::vector<double>> number_rows(const Json &j, const std::string &path) {
    require_array(j, path);
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(numbers(j[i], at(path, i)));
    return out;
}

Json points_json(const std::vector<Point> &points) {
    Json out = Json::array();
    for (const auto &p : points) out.push_back(p);
    return out;
}

}  // namespace

void require_keys(const Json &j, std::initializer_list<const char *> allowed, const std::string &path) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto &[key, value] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char *a) { return key == a; })) {
            fail(at(path, key.c_str()), "unknown field");
        }
    }
}

const Json &require_field(const Json &j, const char *key, const std::string &path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(at(path, key), "missing required field");
    return *it;
}

double number_from_json(const Json &j, const std::string &path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
}

long long integer_from_json(const Json &j, const std::string &path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long long>();
}

// ------------------------------------------------------------------ algebra

Json to_json(const CVector &v) {
    Json re = Json::array(), im = Json::array();
    for (const Complex &z : v) {
        re.push_back(z.real());
        im.push_back(z.imag());
    }
    return Json{{"re", re}, {"im", im}};
}

CVector cvector_from_json(const Json &j, const std::string &path) {
    require_keys(j, {"re", "im"}, path);
    const auto re = numbers(require_field(j, "re", path), at(path, "re"));
    std::vector<double> im(re.size(), 0.0);
    if (j.contains("im")) im = numbers(j["im"], at(path, "im"));
    if (im.size() != re.size()) fail(path, "re and im lengths differ");
    CVector out(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) out[i] = {re[i], im[i]};
    return out;
}

Json to_json(const CMatrix &a) {
    Json re = Json::array(), im = Json::array();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Json rr = Json::array(), ir = Json::array();
        for (std::size_t j = 0; j < a.cols(); ++j) {
            rr.push_back(a(i, j).real());
            ir.push_back(a(i, j).imag());
        }
        re.push_back(rr);
        im.push_back(ir);
    }
    return Json{{"re", re}, {"im", im}};
}

Json to_json(const HermitianMatrix &a) { return to_json(a.matrix()); }

HermitianMatrix hermitian_from_json(const Json &j, const std::string &path) {
    require_keys(j, {"re", "im"}, path);
    const auto re = number_rows(require_field(j, "re", path), at(path, "re"));
    const std::size_t n = re.size();
    std::vector<std::vector<double>> im(n, std::vector<double>(n, 0.0));
    if (j.contains("im")) im = number_rows(j["im"], at(path, "im"));
    if (n == 0) fail(path, "empty matrix");
    if (im.size() != n) fail(at(path, "im"), "row count differs from re");
    CMatrix a(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        if (re[r].size() != n || im[r].size() != n) fail(at(at(path, "re"), r), "matrix must be square");
        for (std::size_t c = 0; c < n; ++c) a(r, c) = {re[r][c], im[r][c]};
    }
    // Reject matrices that are far from Hermitian rather than silently symmetrizing them.
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (std::abs(a(r, c) - std::conj(a(c, r))) > 1e-12 * std::max(1.0, a.max_abs())) {
                fail(path, "matrix is not Hermitian");
            }
    return HermitianMatrix(a);
}

Json to_json(const MultiIndex &alpha) { return Json(alpha.components()); }

MultiIndex multi_index_from_json(const Json &j, const std::string &path) {
    require_array(j, path);
    std::vector<int> c;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const long long v = integer_from_json(j[i], at(path, i));
        if (v < 0 || v > 64) fail(at(path, i), "multi-index entries must lie in [0, 64]");
        c.push_back(static_cast<int>(v));
    }
    return MultiIndex(std::move(c));
}

Point point_from_json(const Json &j, const std::string &path) { return numbers(j, path); }

// ---------------------------------------------------------------- measures

Json to_json(const OperatorMeasure &measure) {
    Json atoms = Json::array();
    for (const auto &a : measure.atoms()) atoms.push_back(Json{{"omega", a.omega}, {"G", to_json(a.weight)}});
    for (double omega : measure.null_support()) {
        atoms.push_back(Json{{"omega", omega}, {"G", to_json(HermitianMatrix::zeros(measure.dim()))}});
    }
    return Json{{"dim", measure.dim()}, {"atoms", atoms}};
}

namespace {

std::size_t measure_dim(const Json &j, const std::string &path) {
    const long long dim = integer_from_json(require_field(j, "dim", path), at(path, "dim"));
    if (dim < 1 || dim > 64) fail(at(path, "dim"), "must lie in [1, 64]");
    return static_cast<std::size_t>(dim);
}

HermitianMatrix atom_matrix(const Json &atom, std::size_t dim, const std::string &path) {
    HermitianMatrix g = hermitian_from_json(require_field(atom, "G", path), at(path, "G"));
    if (g.dim() != dim) fail(at(path, "G"), "dimension differs from measure dim");
    return g;
}

}  // namespace

OperatorMeasure measure_from_json(const Json &j, const std::string &path) {
    require_keys(j, {"dim", "atoms"}, path);
    const std::size_t dim = measure_dim(j, path);
    const Json &atoms = require_array(require_field(j, "atoms", path), at(path, "atoms"));
    std::vector<OperatorAtom> out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string p = at(at(path, "atoms"), i);
        require_keys(atoms[i], {"omega", "G"}, p);
        out.push_back({number_from_json(require_field(atoms[i], "omega", p), at(p, "omega")), atom_matrix(atoms[i], dim, p)});
    }
    try {
        return OperatorMeasure(dim, std::move(out));
    } catch (const Error &e) {
        fail(path, e.what());
    }
}

// ------------------------------------------------------------------ kernels

Json to_json(const OperatorKernel &k) {
    Json out;
    switch (k.family()) {
    case KernelFamily::Radial: {
        Json family{{"kind", "gaussian"}};
        if (k.profile().kind == ProfileKind::Askey) family = Json{{"kind", "askey"}, {"ell", k.profile().askey_ell}};
        if (k.profile().kind == ProfileKind::Omega) family = Json{{"kind", "omega"}, {"m_source", k.profile().omega_m}};
        out["family"] = family;
        out["m"] = k.ambient_dim();
        out["measure"] = to_json(k.measure());
        break;
    }
    case KernelFamily::PlaneWave: {
        out["family"] = Json{{"kind", "plane_wave"}};
        out["m"] = k.ambient_dim();
        Json atoms = Json::array();
        for (const auto &a : k.plane_wave_atoms()) atoms.push_back(Json{{"xi", a.xi}, {"G", to_json(a.weight)}});
        out["measure"] = Json{{"dim", k.matrix_dim()}, {"atoms", atoms}};
        break;
    }
    case KernelFamily::ShiftedGaussian:
        out["family"] = Json{{"kind", "shifted_gaussian"}, {"w", k.shift()}};
        out["m"] = k.ambient_dim();
        break;
    }
    return out;
}

OperatorKernel kernel_from_json(const Json &j, const std::string &path) {
    require_keys(j, {"family", "m", "measure"}, path);
    const Json &family = require_field(j, "family", path);
    const std::string fpath = at(path, "family");
    const Json &kind_json = require_field(family, "kind", fpath);
    if (!kind_json.is_string()) fail(at(fpath, "kind"), "expected a string");
    const std::string kind = kind_json.get<std::string>();
    const long long m_raw = integer_from_json(require_field(j, "m", path), at(path, "m"));
    if (m_raw < 1 || m_raw > 16) fail(at(path, "m"), "must lie in [1, 16]");
    const auto m = static_cast<std::size_t>(m_raw);

    try {
        if (kind == "shifted_gaussian") {
            require_keys(family, {"kind", "w"}, fpath);
            if (j.contains("measure")) fail(at(path, "measure"), "shifted_gaussian kernels take no measure");
            const Point w = numbers(require_field(family, "w", fpath), at(fpath, "w"));
            if (w.size() != m) fail(at(fpath, "w"), "length differs from m");
            return OperatorKernel::shifted_gaussian(w);
        }
        const Json &mj = require_field(j, "measure", path);
        const std::string mpath = at(path, "measure");
        if (kind == "plane_wave") {
            require_keys(family, {"kind"}, fpath);
            require_keys(mj, {"dim", "atoms"}, mpath);
            const std::size_t dim = measure_dim(mj, mpath);
            const Json &atoms = require_array(require_field(mj, "atoms", mpath), at(mpath, "atoms"));
            std::vector<PlaneWaveAtom> waves;
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                const std::string p = at(at(mpath, "atoms"), i);
                require_keys(atoms[i], {"xi", "G"}, p);
                Point xi = numbers(require_field(atoms[i], "xi", p), at(p, "xi"));
                if (xi.size() != m) fail(at(p, "xi"), "length differs from m");
                waves.push_back({std::move(xi), atom_matrix(atoms[i], dim, p)});
            }
            return OperatorKernel::plane_wave(std::move(waves), m, dim);
        }
        RadialProfile profile;
        if (kind == "gaussian") {
            require_keys(family, {"kind"}, fpath);
            profile = RadialProfile::gaussian();
        } else if (kind == "askey") {
            require_keys(family, {"kind", "ell"}, fpath);
            const long long ell = integer_from_json(require_field(family, "ell", fpath), at(fpath, "ell"));
            if (ell < 2 || ell > 64) fail(at(fpath, "ell"), "must lie in [2, 64]");
            profile = RadialProfile::askey(static_cast<int>(ell));
        } else if (kind == "omega") {
            require_keys(family, {"kind", "m_source"}, fpath);
            const long long ms = integer_from_json(require_field(family, "m_source", fpath), at(fpath, "m_source"));
            if (ms < 1 || ms > 64) fail(at(fpath, "m_source"), "must lie in [1, 64]");
            profile = RadialProfile::omega(static_cast<int>(ms));
        } else {
            fail(at(fpath, "kind"), "unknown family '" + kind + "'");
        }
        return OperatorKernel::radial(profile, measure_from_json(mj, mpath), m);
    } catch (const Error &e) {
        if (e.code() == ErrorCode::InvalidDescriptor) throw;
        fail(path, e.what());
    }
}

// ---------------------------------------------------------- vector measures

Json to_json(const DerivVectorMeasure &eta) {
    Json comps = Json::array();
    std::vector<const MultiIndex *> order;
    for (const auto &[alpha, c] : eta.components()) order.push_back(&alpha);
    std::stable_sort(order.begin(), order.end(), [](auto *a, auto *b) { return graded_lex_less(*a, *b); });
    for (const MultiIndex *alpha : order) {
        Json atoms = Json::array();
        for (const auto &atom : eta.components().at(*alpha).atoms()) {
            atoms.push_back(Json{{"x", atom.x}, {"v", to_json(atom.v)}});
        }
        comps.push_back(Json{{"alpha", to_json(*alpha)}, {"atoms", atoms}});
    }
    return Json{{"q", eta.q()}, {"components", comps}};
}

DerivVectorMeasure deriv_measure_from_json(const Json &j, std::size_t m, std::size_t ell, const std::string &path) {
    require_keys(j, {"q", "components"}, path);
    const long long q = integer_from_json(require_field(j, "q", path), at(path, "q"));
    if (q < 0 || q > kMaxDerivOrder / 2) fail(at(path, "q"), "must lie in [0, " + std::to_string(kMaxDerivOrder / 2) + "]");
    DerivVectorMeasure eta(static_cast<int>(q), m, ell);
    const Json &comps = require_array(require_field(j, "components", path), at(path, "components"));
    for (std::size_t c = 0; c < comps.size(); ++c) {
        const std::string cp = at(at(path, "components"), c);
        require_keys(comps[c], {"alpha", "atoms"}, cp);
        const MultiIndex alpha = multi_index_from_json(require_field(comps[c], "alpha", cp), at(cp, "alpha"));
        const Json &atoms = require_array(require_field(comps[c], "atoms", cp), at(cp, "atoms"));
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const std::string ap = at(at(cp, "atoms"), i);
            require_keys(atoms[i], {"x", "v"}, ap);
            const Point x = point_from_json(require_field(atoms[i], "x", ap), at(ap, "x"));
            const CVector v = cvector_from_json(require_field(atoms[i], "v", ap), at(ap, "v"));
            try {
                eta.add(alpha, x, v);
            } catch (const Error &e) {
                fail(ap, e.what());
            }
        }
    }
    return eta;
}

// ------------------------------------------------------------------ reports

Json to_json(const Tolerances &t) {
    Json out = Json::object();
    for (const auto &[k, v] : t.as_map()) out[k] = v;
    return out;
}

Json to_json(const ProbeReport &r) {
    Json out;
    out["designs"] = r.design_count();
    out["n"] = r.options.n;
    out["box"] = r.options.box;
    out["seed"] = r.options.seed;
    out["tol"] = r.options.tol;
    out["min_eigenvalues"] = r.min_eigenvalues;
    out["global_min"] = r.global_min;
    if (r.violation) {
        out["verdict"] = "ViolationFound";
        out["violation"] = Json{{"trial", r.violation->trial},
                                {"points", points_json(r.violation->points)},
                                {"witness", to_json(r.violation->witness)},
                                {"value", r.violation->value},
                                {"scale", r.violation->scale}};
    } else {
        out["verdict"] = "NoViolationFound";
    }
    return out;
}

Json to_json(const CounterexampleResult &r) {
    Json out;
    out["name"] = r.name;
    out["reproduced"] = r.reproduced;
    out["mixed_form"] = r.mixed_form;
    out["reference_form"] = r.reference_form;
    out["relative_form"] = r.relative_form;
    out["reference_scale"] = r.reference_scale;
    Json projections = Json::array();
    for (const auto &p : r.projections) {
        projections.push_back(Json{{"label", p.label}, {"v", to_json(p.v)}, {"min_eigenvalue", p.min_eigenvalue}});
    }
    out["projections"] = projections;
    out["min_projection_eigenvalue"] = r.min_projection_eigenvalue;
    out["projection_scope"] = "strict positivity at the tested finite designs only; consistent with universal projections";
    out["projection_points"] = points_json(r.projection_points);
    Json params = Json::object();
    for (const auto &[k, v] : r.parameters) params[k] = v;
    out["parameters"] = params;
    return out;
}

Json to_json(const ClassificationReport &r) {
    Json out;
    out["profile"] = r.profile.name();
    out["m"] = r.m;
    out["verdict"] = to_string(r.classification.verdict);
    out["restricted_min_eigenvalue"] = r.classification.restricted_min_eigenvalue;
    out["tolerance"] = r.classification.tolerance;
    if (!r.classification.witness.empty()) out["witness"] = to_json(r.classification.witness);
    Json null_space = Json::array();
    for (const auto &v : r.classification.null_space) null_space.push_back(to_json(v));
    out["null_space"] = null_space;
    out["c0_membership"] = r.classification.c0_membership;
    out["supported_jet_order"] = r.supported_jet_order;
    out["finite_differences_only"] = r.finite_differences_only;
    if (r.witness_design_min_eigenvalue) {
        out["witness_design"] = Json{{"points", points_json({Point(r.m, 0.0), [&] {
                                                                   Point e(r.m, 0.0);
                                                                   e[0] = 1.0;
                                                                   return e;
                                                               }()})},
                                     {"min_eigenvalue", *r.witness_design_min_eigenvalue},
                                     {"scale", r.witness_design_scale}};
    }
    out["probe"] = to_json(r.probe);
    out["consistent"] = r.consistent;
    out["scope"] = "exact criterion for the atomic measure; probes are finite-design refutation attempts";
    if (!r.note.empty()) out["note"] = r.note;
    return out;
}

Json to_json(const MonotoneReport &r) {
    Json out{{"passed", r.passed}};
    if (!r.passed) {
        out["violation"] = Json{{"order", r.violation_order}, {"t", r.violation_t}, {"value", r.violation_value}};
    }
    return out;
}

Json to_json(const EllCmReport &r) {
    Json out{{"passed", r.passed}, {"nonnegative", r.nonnegative}, {"tail_bounded", r.tail_bounded}, {"convex", r.convex}};
    out["limit_check"] = "heuristic: a bounded tail on the grid stands in for the existence of the limit at infinity";
    if (!r.passed) out["violation"] = Json{{"t", r.violation_t}, {"condition", r.failed_condition}};
    return out;
}

}  // namespace opk::io
