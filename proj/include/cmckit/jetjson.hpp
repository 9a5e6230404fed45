#pragma once

#include <json.hpp>

#include "jetpoly.hpp"

namespace cmckit {

using json = nlohmann::ordered_json;

// Rationals travel as [num, den] with decimal-string entries so that
// round-trips are bit-exact at any size.
inline json toJson(const mpq_class& q) {
    return json::array({q.get_num().get_str(), q.get_den().get_str()});
}

inline mpq_class mpqFromJson(const json& j) {
    auto asStr = [](const json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
    };
    mpq_class q(mpz_class(asStr(j.at(0))), mpz_class(asStr(j.at(1))));
    q.canonicalize();
    return q;
}

inline json toJson(const GaussQ& c) {
    return json{{"re", toJson(c.re)}, {"im", toJson(c.im)}};
}

inline GaussQ gaussFromJson(const json& j) {
    return GaussQ(mpqFromJson(j.at("re")), mpqFromJson(j.at("im")));
}

inline json toJson(const JetPolynomial& p) {
    json terms = json::array();
    for (const auto& [m, c] : p.terms()) {
        json t;
        t["coeff"] = toJson(c);
        t["gamma"] = m.gammaExp;
        t["r"] = m.rExp;
        json gens = json::object();
        for (const auto& [g, e] : m.exps) gens[g.name()] = e;
        t["gens"] = gens;
        terms.push_back(std::move(t));
    }
    return json{{"terms", std::move(terms)}};
}

inline Generator generatorFromName(const std::string& name) {
    auto split = [&name](size_t pre) { return std::stoi(name.substr(pre)); };
    if (name.rfind("zb", 0) == 0) return zbGen(split(2));
    if (name.rfind("wb", 0) == 0) return wbGen(split(2));
    if (name.rfind("z", 0) == 0) return zGen(split(1));
    if (name.rfind("w", 0) == 0) return wGen(split(1));
    throw std::invalid_argument("unknown generator name: " + name);
}

inline JetPolynomial jetFromJson(const json& j) {
    JetPolynomial p;
    for (const auto& t : j.at("terms")) {
        Monomial m(t.at("gamma").get<int>(), t.at("r").get<int>());
        for (const auto& [name, e] : t.at("gens").items())
            m.exps.emplace_back(generatorFromName(name), e.get<int>());
        std::sort(m.exps.begin(), m.exps.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        p.addTerm(m, gaussFromJson(t.at("coeff")));
    }
    return p;
}

} // namespace cmckit
