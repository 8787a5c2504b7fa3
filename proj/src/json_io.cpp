#include "json_io.hpp"

namespace cwpotts {

nlohmann::json spec_json(const ModelSpec& spec)
{
    return {{"p", spec.p}, {"q", spec.q}, {"beta", spec.beta}, {"h", spec.h}};
}

nlohmann::json point_class_json(const PointClass& cls)
{
    nlohmann::json vectors = nlohmann::json::array();
    for (const auto& v : cls.witness.vectors)
        vectors.push_back(v.vec());
    return {{"tag", tag_name(cls.tag)},
            {"requested", spec_json(cls.requested)},
            {"effective", spec_json(cls.effective)},
            {"snapped", cls.snapped},
            {"warnings", cls.warnings},
            {"witness",
             {{"s_values", cls.witness.s_values},
              {"f_values", cls.witness.f_values},
              {"vectors", vectors},
              {"vector_s", cls.witness.vector_s},
              {"ordering_by_first_coord", cls.witness.ordering_by_first_coord},
              {"ordering_by_p_norm", cls.witness.ordering_by_p_norm}}}};
}

nlohmann::json landmarks_json(int p, int q, const Landmarks& lm)
{
    return {{"p", p},
            {"q", q},
            {"beta_c", lm.beta_c},
            {"beta_tilde", lm.special.beta_tilde},
            {"h_tilde", lm.special.h_tilde},
            {"s_pq", lm.special.s_pq},
            {"type", lm.special.type == SpecialType::I ? "I" : "II"}};
}

nlohmann::json estimation_json(const EstimationResult& r)
{
    return {{"estimate", r.estimate},
            {"observed_statistic", r.observed_statistic},
            {"residual", r.residual},
            {"bracket", {r.bracket_lo, r.bracket_hi}},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"boundary_flag", r.boundary}};
}

nlohmann::json confidence_json(const ConfidenceSet& cs)
{
    nlohmann::json j = {{"lower", cs.lower},
                        {"upper", cs.upper},
                        {"appended", cs.appended},
                        {"method", method_name(cs.method)},
                        {"level", cs.level}};
    if (cs.p_value)
        j["p_value"] = *cs.p_value;
    return j;
}

}  // namespace cwpotts
