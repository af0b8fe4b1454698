// JSON encodings of the module results. Non-finite reals are written as the
// strings "inf", "-inf" and "nan" so every report parses back losslessly.

#ifndef PUCCI_FORGE_REPORT_HPP
#define PUCCI_FORGE_REPORT_HPP

#include <json.hpp>

#include "pucci_forge/candidates.hpp"
#include "pucci_forge/operator_reconstruction.hpp"
#include "pucci_forge/ratio_search.hpp"
#include "pucci_forge/viscosity_check.hpp"

namespace pucci {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

Json real_json(double v);
/// Inverse of real_json; accepts numbers and the three special strings.
double json_real(const Json& j);

Json to_json(const CandidateSpec& c);
Json to_json(const SpacePoint& p);
Json to_json(const SymMatrix<double>& m);
Json to_json(const RatioValue& r);
Json to_json(const PairState& s);
Json to_json(const CampaignConfig& cfg);
Json to_json(const CampaignReport& rep);
Json to_json(const SurfaceScanReport& rep);
Json to_json(const MeasurableVerdict& v);
Json to_json(const EllipticityWindow& w);
Json to_json(const OperatorSample& s);
Json to_json(const AuditResult& a);
Json to_json(const FdCheckReport& r);

}  // namespace pucci

#endif  // PUCCI_FORGE_REPORT_HPP
