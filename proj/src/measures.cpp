#include "opk/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "opk/error.hpp"

namespace opk {

OperatorMeasure::OperatorMeasure(std::size_t dim, std::vector<OperatorAtom> atoms, double psd_tol) : dim_(dim) {
    if (dim == 0) throw Error(ErrorCode::InvalidMeasure, "measure dimension must be positive");
    std::map<double, HermitianMatrix> merged;
    for (auto &atom : atoms) {
        if (!std::isfinite(atom.omega) || atom.omega < 0.0) {
            throw Error(ErrorCode::InvalidMeasure, "support point must be finite and >= 0");
        }
        if (atom.weight.dim() != dim) throw Error(ErrorCode::InvalidMeasure, "atom matrix dimension mismatch");
        auto [it, inserted] = merged.try_emplace(atom.omega, atom.weight);
        if (!inserted) it->second = it->second + atom.weight;
    }
    for (auto &[omega, g] : merged) {
        if (g.matrix().max_abs() == 0.0) {
            null_support_.push_back(omega);
            continue;
        }
        const PsdCheck check = is_psd(g, psd_tol);
        if (!check.psd) {
            throw Error(ErrorCode::InvalidMeasure, "atom at omega=" + std::to_string(omega) +
                                                       " is not PSD (min eigenvalue " +
                                                       std::to_string(check.min_eigenvalue) + ")");
        }
        atoms_.push_back({omega, std::move(g)});
    }
}

OperatorMeasure OperatorMeasure::scaled(double c) const {
    OperatorMeasure out = *this;
    for (auto &atom : out.atoms_) atom.weight = atom.weight.scaled(c);
    return out;
}

ScalarMeasure::ScalarMeasure(std::vector<ScalarAtom> atoms) {
    std::map<double, double> merged;
    for (const auto &a : atoms) {
        if (!(a.weight >= 0.0) || !(a.omega >= 0.0)) throw Error(ErrorCode::InvalidMeasure, "negative scalar atom");
        merged[a.omega] += a.weight;
    }
    for (const auto &[omega, w] : merged) atoms_.push_back({omega, w});
}

double ScalarMeasure::total() const noexcept {
    double acc = 0.0;
    for (const auto &a : atoms_) acc += a.weight;
    return acc;
}

double ScalarMeasure::total_off_origin() const noexcept {
    double acc = 0.0;
    for (const auto &a : atoms_)
        if (a.omega > 0.0) acc += a.weight;
    return acc;
}

ScalarMeasure scalar_projection_measure(const OperatorMeasure &measure, std::span<const Complex> v) {
    if (v.size() != measure.dim()) throw Error(ErrorCode::InvalidVector, "vector length does not match measure");
    if (norm(v) == 0.0) throw Error(ErrorCode::InvalidVector, "projection vector must be nonzero");
    std::vector<ScalarAtom> atoms;
    atoms.reserve(measure.atoms().size());
    for (const auto &atom : measure.atoms()) {
        // PSD atoms give weights >= -eps; clamp the rounding residue
        atoms.push_back({atom.omega, std::max(0.0, atom.weight.quadratic_form(v))});
    }
    return ScalarMeasure(std::move(atoms));
}

RNDecomposition radon_nikodym(const OperatorMeasure &measure) {
    RNDecomposition out;
    std::vector<ScalarAtom> trace_atoms;
    for (const auto &atom : measure.atoms()) {
        const double tr = trace(atom.weight);
        if (!(tr > 0.0)) {
            out.null_atoms.push_back(atom.omega);
            continue;
        }
        trace_atoms.push_back({atom.omega, tr});
        out.densities.push_back(atom.weight.scaled(1.0 / tr));
    }
    for (double omega : measure.null_support()) out.null_atoms.push_back(omega);
    std::sort(out.null_atoms.begin(), out.null_atoms.end());
    out.trace_measure = ScalarMeasure(std::move(trace_atoms));
    return out;
}

HermitianMatrix total_operator(const OperatorMeasure &measure, bool restrict_positive_support) {
    CMatrix acc(measure.dim(), measure.dim());
    for (const auto &atom : measure.atoms()) {
        if (restrict_positive_support && !(atom.omega > 0.0)) continue;
        acc += atom.weight.matrix();
    }
    return HermitianMatrix(acc);
}

const char *to_string(RadialVerdict v) noexcept {
    switch (v) {
        case RadialVerdict::StrictlyPDAndUniversal: return "StrictlyPD_and_Universal";
        case RadialVerdict::NotStrictlyPD: return "NotStrictlyPD";
    }
    return "Unknown";
}

RadialClassification classify_radial(const OperatorMeasure &measure, ProfileKind family, double tol) {
    (void)family;  // the criterion is shared by every radial family
    RadialClassification out;
    const HermitianMatrix restricted = total_operator(measure, true);
    const HermitianMatrix full = total_operator(measure, false);
    const EigenDecomposition eig = eigen_hermitian(restricted);
    out.restricted_min_eigenvalue = eig.eigenvalues.front();
    out.tolerance = tol * std::max(1.0, trace(full));
    out.verdict = out.restricted_min_eigenvalue > out.tolerance ? RadialVerdict::StrictlyPDAndUniversal
                                                                : RadialVerdict::NotStrictlyPD;
    if (out.verdict == RadialVerdict::NotStrictlyPD) {
        out.witness = eig.eigenvector(0);
        for (std::size_t k = 0; k < eig.eigenvalues.size() && eig.eigenvalues[k] <= out.tolerance; ++k) {
            out.null_space.push_back(eig.eigenvector(k));
        }
    }
    out.c0_membership = c0_membership(measure);
    return out;
}

bool c0_membership(const OperatorMeasure &measure) noexcept {
    return std::all_of(measure.atoms().begin(), measure.atoms().end(),
                       [](const OperatorAtom &a) { return a.omega > 0.0; });
}

}  // namespace opk
