#pragma once

// JSON descriptors and report serialization. Field order is stable; unknown
// fields are rejected with InvalidDescriptor naming the offending path.

#include <string>

#include <json.hpp>

#include "opk/certify.hpp"
#include "opk/kernel.hpp"
#include "opk/measures.hpp"
#include "opk/profiles.hpp"
#include "opk/rkhs.hpp"

namespace opk::io {

using Json = nlohmann::ordered_json;

[[nodiscard]] Json to_json(const CVector &v);
[[nodiscard]] CVector cvector_from_json(const Json &j, const std::string &path);
[[nodiscard]] Json to_json(const CMatrix &a);
[[nodiscard]] Json to_json(const HermitianMatrix &a);
[[nodiscard]] HermitianMatrix hermitian_from_json(const Json &j, const std::string &path);

[[nodiscard]] Json to_json(const MultiIndex &alpha);
[[nodiscard]] MultiIndex multi_index_from_json(const Json &j, const std::string &path);
[[nodiscard]] Point point_from_json(const Json &j, const std::string &path);

/// {"dim": l, "atoms": [{"omega": w, "G": {"re": [[...]], "im": [[...]]}}]}
[[nodiscard]] Json to_json(const OperatorMeasure &measure);
[[nodiscard]] OperatorMeasure measure_from_json(const Json &j, const std::string &path = "measure");

/// {"family": {...}, "m": m, "measure": {...}}; plane-wave measures use "xi" in place of "omega".
[[nodiscard]] Json to_json(const OperatorKernel &k);
[[nodiscard]] OperatorKernel kernel_from_json(const Json &j, const std::string &path = "kernel");

/// {"q": q, "components": [{"alpha": [...], "atoms": [{"x": [...], "v": {"re": [...], "im": [...]}}]}]}
[[nodiscard]] Json to_json(const DerivVectorMeasure &eta);
[[nodiscard]] DerivVectorMeasure deriv_measure_from_json(const Json &j, std::size_t m, std::size_t ell,
                                                         const std::string &path = "eta");

[[nodiscard]] Json to_json(const ProbeReport &r);
[[nodiscard]] Json to_json(const CounterexampleResult &r);
[[nodiscard]] Json to_json(const ClassificationReport &r);
[[nodiscard]] Json to_json(const MonotoneReport &r);
[[nodiscard]] Json to_json(const EllCmReport &r);
[[nodiscard]] Json to_json(const Tolerances &t);

/// Throws InvalidDescriptor if j is not an object or has keys outside allowed.
void require_keys(const Json &j, std::initializer_list<const char *> allowed, const std::string &path);
[[nodiscard]] const Json &require_field(const Json &j, const char *key, const std::string &path);
[[nodiscard]] double number_from_json(const Json &j, const std::string &path);
[[nodiscard]] long long integer_from_json(const Json &j, const std::string &path);

}  // namespace opk::io
