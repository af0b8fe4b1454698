#include "pucci_forge/report.hpp"

#include <cmath>
#include <string>

namespace pucci {

Json real_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double json_real(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw InvalidInput("expected a real number, got " + j.dump());
}

Json to_json(const CandidateSpec& c) {
  Json j;
  j["id"] = std::string(c.name());
  j["dim"] = c.dim;
  j["kind"] = c.elliptic() ? "elliptic" : "parabolic";
  if (c.id == CandidateId::Measurable2D) j["alpha"] = c.alpha;
  j["singular_set"] = c.singular_set();
  return j;
}

Json to_json(const SpacePoint& p) {
  Json x = Json::array();
  for (int i = 0; i < p.x.size(); ++i) x.push_back(real_json(p.x(i)));
  return Json{{"t", real_json(p.t)}, {"x", x}};
}

Json to_json(const SymMatrix<double>& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.dim(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < m.dim(); ++k) row.push_back(real_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const RatioValue& r) {
  const char* kind = r.kind == RatioKind::Finite ? "finite" : r.kind == RatioKind::Infinite ? "infinite" : "undefined";
  return Json{{"kind", kind},
              {"value", real_json(r.value)},
              {"numerator", real_json(r.numerator)},
              {"denominator", real_json(r.denominator)}};
}

Json to_json(const PairState& s) {
  return Json{{"p", to_json(s.p)}, {"q", to_json(s.q)}, {"ratio", to_json(s.ratio)}};
}

Json to_json(const CampaignConfig& cfg) {
  return Json{{"starts", cfg.starts},
              {"iters", cfg.iters_per_start},
              {"step0", cfg.step0},
              {"noise0", cfg.noise0},
              {"divergence-threshold", cfg.divergence_threshold},
              {"collapse-floor", cfg.collapse_floor},
              {"exclusion-radius", cfg.exclusion_radius},
              {"seed", cfg.rng_seed},
              {"seeded", cfg.seeded}};
}

Json to_json(const CampaignReport& rep) {
  Json starts = Json::array();
  for (const auto& s : rep.per_start) {
    starts.push_back(Json{{"index", s.index},
                          {"max_ratio", real_json(s.max_ratio)},
                          {"diverged", s.diverged},
                          {"diverged_at", s.diverged_at},
                          {"reperturbations", s.reperturbations},
                          {"best_pair", to_json(s.best_pair)},
                          {"final_pair", to_json(s.final_pair)}});
  }
  return Json{{"estimated_c", real_json(rep.estimated_c)},
              {"max_finite_ratio", real_json(rep.max_finite_ratio)},
              {"divergence_fraction", rep.divergence_fraction},
              {"diverged_starts", rep.diverged_starts},
              {"per_start", starts}};
}

Json to_json(const EllipticityWindow& w) { return Json{{"lambda", w.lambda}, {"Lambda", w.Lambda}}; }

Json to_json(const SurfaceScanReport& rep) {
  auto ext = [](const Extremum& e) { return Json{{"min", real_json(e.min)}, {"max", real_json(e.max)}}; };
  Json j{{"alpha", rep.alpha},
         {"grid_n", rep.grid_n},
         {"ut", ext(rep.ut)},
         {"ur_over_r", ext(rep.ur_over_r)},
         {"urr", ext(rep.urr)}};
  j["admissible_window"] = rep.admissible_window ? to_json(*rep.admissible_window) : Json(nullptr);
  return j;
}

Json to_json(const MeasurableVerdict& v) {
  return Json{{"pass", v.pass},
              {"min_margin", real_json(v.worst_margins.worst())},
              {"worst_m_plus", real_json(v.worst_margins.m_plus)},
              {"worst_m_minus", real_json(v.worst_margins.m_minus)},
              {"witness", to_json(v.witness)}};
}

Json to_json(const OperatorSample& s) {
  return Json{{"M", to_json(s.M)},
              {"f_value", real_json(s.f_value)},
              {"upper_bound", real_json(s.upper_bound)},
              {"support_index", s.support_index},
              {"support_point", to_json(s.support_point)},
              {"upper_anchor", s.upper_anchor},
              {"sample_size", s.sample_size}};
}

Json to_json(const AuditResult& a) {
  return Json{{"trials", a.trials}, {"worst_violation", real_json(a.worst_violation)}};
}

Json to_json(const FdCheckReport& r) {
  return Json{{"points", r.points},
              {"h", r.h},
              {"max_relative_error", real_json(r.max_relative_error)},
              {"worst_point", to_json(r.worst_point)}};
}

}  // namespace pucci
