#include "opk/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opk/error.hpp"

namespace opk {

// ------------------------------------------------------- vector measures

void VectorAtomMeasure::add(const Point &x, std::span<const Complex> v) {
    if (x.size() != m_) throw Error(ErrorCode::InvalidPoint, "atom point has wrong dimension");
    if (v.size() != ell_) throw Error(ErrorCode::InvalidVector, "atom vector has wrong length");
    for (auto &atom : atoms_) {
        if (atom.x == x) {
            for (std::size_t i = 0; i < ell_; ++i) atom.v[i] += v[i];
            return;
        }
    }
    atoms_.push_back({x, CVector(v.begin(), v.end())});
}

DerivVectorMeasure::DerivVectorMeasure(int q, std::size_t m, std::size_t ell) : q_(q), m_(m), ell_(ell) {
    if (q < 0) throw Error(ErrorCode::InvalidDescriptor, "q must be >= 0");
}

DerivVectorMeasure DerivVectorMeasure::from_values(const VectorAtomMeasure &eta) {
    DerivVectorMeasure out(0, eta.ambient_dim(), eta.matrix_dim());
    for (const auto &atom : eta.atoms()) out.add(MultiIndex::zero(eta.ambient_dim()), atom.x, atom.v);
    return out;
}

void DerivVectorMeasure::add(const MultiIndex &alpha, const Point &x, std::span<const Complex> v) {
    if (alpha.size() != m_) throw Error(ErrorCode::InvalidDescriptor, "multi-index has wrong dimension");
    if (alpha.order() > q_) {
        throw Error(ErrorCode::InvalidDescriptor, "component order " + std::to_string(alpha.order()) + " exceeds q");
    }
    auto [it, inserted] = components_.try_emplace(alpha, VectorAtomMeasure(m_, ell_));
    it->second.add(x, v);
}

bool DerivVectorMeasure::empty() const noexcept {
    return std::all_of(components_.begin(), components_.end(), [](const auto &c) { return c.second.empty(); });
}

std::size_t DerivVectorMeasure::atom_count() const noexcept {
    std::size_t n = 0;
    for (const auto &[alpha, c] : components_) n += c.atoms().size();
    return n;
}

// --------------------------------------------------------------- embedding

namespace {

// Stacked rows in graded-lex component order, then atom order.
struct Stacked {
    std::vector<GramRow> rows;
    CVector w;
};

Stacked stack(const DerivVectorMeasure &eta) {
    std::vector<const std::pair<const MultiIndex, VectorAtomMeasure> *> comps;
    for (const auto &c : eta.components()) comps.push_back(&c);
    std::stable_sort(comps.begin(), comps.end(),
                     [](const auto *a, const auto *b) { return graded_lex_less(a->first, b->first); });
    Stacked out;
    for (const auto *c : comps) {
        for (const auto &atom : c->second.atoms()) {
            out.rows.push_back({atom.x, c->first});
            out.w.insert(out.w.end(), atom.v.begin(), atom.v.end());
        }
    }
    return out;
}

void require_jets(const OperatorKernel &k, int order) {
    if (order > 0 && !k.has_analytic_jets()) {
        throw Error(ErrorCode::UnsupportedJet, "derivative components need analytic jets");
    }
    if (order > kMaxDerivOrder) throw Error(ErrorCode::UnsupportedJet, "order exceeds derivative cap");
}

void require_compatible(const OperatorKernel &k, const DerivVectorMeasure &eta) {
    if (eta.ambient_dim() != k.ambient_dim() || eta.matrix_dim() != k.matrix_dim()) {
        throw Error(ErrorCode::InvalidDescriptor, "vector measure dimensions do not match kernel");
    }
}

}  // namespace

RkhsElement::RkhsElement(OperatorKernel kernel, std::vector<ExpansionAtom> atoms)
    : kernel_(std::move(kernel)), atoms_(std::move(atoms)) {
    for (const auto &a : atoms_) require_jets(kernel_, a.alpha.order());
}

RkhsElement embed(const OperatorKernel &k, const DerivVectorMeasure &eta) {
    require_compatible(k, eta);
    require_jets(k, 2 * eta.q());
    std::vector<ExpansionAtom> atoms;
    for (const auto &[alpha, component] : eta.components())
        for (const auto &atom : component.atoms()) atoms.push_back({alpha, atom.x, atom.v});
    return {k, std::move(atoms)};
}

CVector rkhs_deriv_eval(const RkhsElement &f, const MultiIndex &beta, std::span<const double> y) {
    const OperatorKernel &k = f.kernel();
    CVector out(k.matrix_dim());
    for (const auto &atom : f.atoms()) {
        const CMatrix block = kernel_deriv_eval(k, atom.alpha, beta, atom.x, y);
        // block^H v
        for (std::size_t i = 0; i < out.size(); ++i)
            for (std::size_t j = 0; j < out.size(); ++j) out[i] += std::conj(block(j, i)) * atom.v[j];
    }
    return out;
}

CVector rkhs_eval(const RkhsElement &f, std::span<const double> y) {
    return rkhs_deriv_eval(f, MultiIndex::zero(f.kernel().ambient_dim()), y);
}

double quadratic_form_scale(const OperatorKernel &k, const DerivVectorMeasure &eta) {
    const Stacked s = stack(eta);
    double l1 = 0.0;
    for (const Complex &z : s.w) l1 += std::abs(z);
    double max_diag = 0.0;
    for (const auto &row : s.rows) {
        const CMatrix block = kernel_deriv_eval(k, row.alpha, row.alpha, row.x, row.x);
        for (std::size_t i = 0; i < block.rows(); ++i) max_diag = std::max(max_diag, std::abs(block(i, i)));
    }
    return max_diag * l1 * l1;
}

QuadraticFormResult quadratic_form_detailed(const OperatorKernel &k, const DerivVectorMeasure &eta) {
    require_compatible(k, eta);
    require_jets(k, 2 * eta.q());
    QuadraticFormResult out;
    if (eta.empty()) return out;

    const Stacked s = stack(eta);
    const HermitianMatrix m = deriv_gram_rows(k, s.rows);
    out.value = m.quadratic_form(s.w);
    double l1 = 0.0;
    for (const Complex &z : s.w) l1 += std::abs(z);
    double max_diag = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) max_diag = std::max(max_diag, std::abs(m(i, i)));
    out.scale = max_diag * l1 * l1;

    // Second route: pair the embedding against eta atomwise.
    const RkhsElement f = embed(k, eta);
    Complex pairing = 0.0;
    for (const auto &[beta, component] : eta.components())
        for (const auto &atom : component.atoms()) pairing += inner(rkhs_deriv_eval(f, beta, atom.x), atom.v);
    out.pairing_value = pairing.real();

    const double gap = std::abs(out.value - out.pairing_value);
    if (gap > 1e-12 * std::max(out.scale, 1e-300)) {
        throw Error(ErrorCode::InternalError, "quadratic form routes disagree by " + std::to_string(gap));
    }
    return out;
}

double quadratic_form(const OperatorKernel &k, const DerivVectorMeasure &eta) {
    return quadratic_form_detailed(k, eta).value;
}

// ----------------------------------------------------------- interpolation

namespace {

InterpolationResult solve_system(const OperatorKernel &k, const std::vector<GramRow> &rows,
                                 const std::vector<CVector> &targets, double ridge) {
    const std::size_t ell = k.matrix_dim();
    if (rows.empty()) return {RkhsElement(k, {}), std::max(0.0, ridge), 0.0};

    CVector rhs;
    for (const auto &t : targets) {
        if (t.size() != ell) throw Error(ErrorCode::InvalidVector, "target has wrong length");
        rhs.insert(rhs.end(), t.begin(), t.end());
    }
    const HermitianMatrix system = deriv_gram_rows(k, rows);
    if (ridge < 0.0) ridge = 1e-10 * trace(system) / static_cast<double>(system.dim());

    CMatrix lower;
    try {
        lower = cholesky_psd(system, ridge);
    } catch (const Error &e) {
        throw Error(ErrorCode::IllConditioned, std::string(e.what()) + "; increase the ridge");
    }
    const CVector coeffs = cholesky_solve(lower, rhs);

    std::vector<ExpansionAtom> atoms;
    atoms.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        atoms.push_back({rows[r].alpha, rows[r].x,
                         CVector(coeffs.begin() + static_cast<std::ptrdiff_t>(r * ell),
                                 coeffs.begin() + static_cast<std::ptrdiff_t>((r + 1) * ell))});
    }
    InterpolationResult out{RkhsElement(k, std::move(atoms)), ridge, 0.0};
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const CVector got = rkhs_deriv_eval(out.element, rows[r].alpha, rows[r].x);
        for (std::size_t i = 0; i < ell; ++i) out.residual = std::max(out.residual, std::abs(got[i] - targets[r][i]));
    }
    return out;
}

}  // namespace

InterpolationResult interpolate(const OperatorKernel &k, const std::vector<InterpolationDatum> &data, double ridge) {
    std::vector<Point> centers;
    for (const auto &d : data) centers.push_back(d.x);
    require_distinct(centers);
    std::vector<GramRow> rows;
    std::vector<CVector> targets;
    for (const auto &d : data) {
        if (d.x.size() != k.ambient_dim()) throw Error(ErrorCode::InvalidPoint, "center has wrong dimension");
        rows.push_back({d.x, MultiIndex::zero(k.ambient_dim())});
        targets.push_back(d.target);
    }
    return solve_system(k, rows, targets, ridge);
}

InterpolationResult hermite_interpolate(const OperatorKernel &k, const std::vector<HermiteDatum> &data, double ridge) {
    std::vector<GramRow> rows;
    std::vector<CVector> targets;
    int max_order = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i].x.size() != k.ambient_dim() || data[i].alpha.size() != k.ambient_dim()) {
            throw Error(ErrorCode::InvalidPoint, "datum has wrong dimension");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (data[j].alpha == data[i].alpha && data[j].x == data[i].x) {
                throw Error(ErrorCode::DuplicatePoints, "repeated (point, alpha) pair at index " + std::to_string(i));
            }
        }
        max_order = std::max(max_order, data[i].alpha.order());
        rows.push_back({data[i].x, data[i].alpha});
        targets.push_back(data[i].target);
    }
    require_jets(k, 2 * max_order);
    return solve_system(k, rows, targets, ridge);
}

}  // namespace opk
