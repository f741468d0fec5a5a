#pragma once

// JSON forms for the value types that cross the CLI boundary. Kept out of the
// core headers so the library proper does not drag the JSON dependency in.

#include <string>

#include <json.hpp>

#include "analytics.hpp"
#include "pmf.hpp"

namespace treepark {

inline nlohmann::json pmf_to_json(const Pmf& p) {
    nlohmann::json j;
    j["K"] = p.K();
    j["mass"] = p.mass;
    j["tail"] = p.tail;
    return j;
}

inline Pmf pmf_from_json(const nlohmann::json& j) {
    Pmf p;
    p.mass = j.at("mass").get<std::vector<double>>();
    p.tail = j.at("tail").get<double>();
    if (p.mass.size() != j.at("K").get<std::size_t>() + 1)
        throw std::invalid_argument("pmf json: K does not match mass length");
    p.validate("pmf json");
    return p;
}

inline nlohmann::json ext_real_to_json(const ExtReal& x) {
    if (!x.finite) return "inf";
    return x.value;
}

inline nlohmann::json alpha_profile_to_json(const AlphaProfile& pr) {
    nlohmann::json j;
    j["alpha"] = pr.alpha;
    j["regime"] = regime_name(pr.regime);
    j["p"] = pr.p;
    if (pr.switch_point) j["s_switch"] = *pr.switch_point;
    j["mean_X"] = ext_real_to_json(pr.ex);
    j["mean_Y"] = ext_real_to_json(pr.ey);
    j["limit_prob"] = pr.limit_prob;
    return j;
}

}  // namespace treepark
