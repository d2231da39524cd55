#pragma once
#include <json.hpp>

#include "wiretap/amplifier.hpp"
#include "wiretap/bounds.hpp"
#include "wiretap/code.hpp"
#include "wiretap/sim.hpp"

namespace wiretap {

using Json = nlohmann::ordered_json;

// Exact values are rational strings; floats carry "approx": true and a tolerance.
Json exact_json(const Rational& q);
Json approx_json(long double v, long double tol = 1e-9L);
Json entropy_json(const EntropyValue& e, long double tol = 1e-9L);
Json rationals_json(const std::vector<Rational>& v);

Json outer_bound_json(const Network& net, const OuterBound& ob, bool with_witness);
Json certificate_json(const CertificateReport& c);
Json code_evaluation_json(const CodeEvaluation& ev);
Json sim_json(const SimCode& sim, const SimMetrics& m);
Json weak_verification_json(const WeakVerification& v);
Json amplified_code_json(const AmplifiedCode& code);
Json amplified_evaluation_json(const AmplifiedEvaluation& ev);

}  // namespace wiretap
