#pragma once

#include "kripke.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace mlgame {

// Model files: {"edges":[[from,to]], "point":w, "valuation":{p:[w]}, "worlds":[w]}.
// nlohmann's default object keeps keys sorted; every array is emitted sorted.

inline nlohmann::json to_json(const pointed_model& p)
{
    const auto& m = p.model();
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [from, to] : m.edge_list())
        edges.push_back({from, to});
    nlohmann::json valuation = nlohmann::json::object();
    for (const auto& [prop, worlds] : m.valuation())
        valuation[prop] = worlds;
    return {{"worlds", m.worlds()},
            {"edges", std::move(edges)},
            {"valuation", std::move(valuation)},
            {"point", p.point_name()}};
}

inline nlohmann::json to_json(const model_set& s)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : s)
        out.push_back(to_json(p));
    return out;
}

inline pointed_model pointed_model_from_json(const nlohmann::json& j)
{
    try {
        auto worlds = j.at("worlds").get<std::vector<world_id>>();
        std::vector<std::pair<world_id, world_id>> edges;
        for (const auto& e : j.value("edges", nlohmann::json::array())) {
            if (!e.is_array() || e.size() != 2)
                throw model_error("edge must be a [from, to] pair");
            edges.emplace_back(e[0].get<world_id>(), e[1].get<world_id>());
        }
        auto valuation = j.value("valuation", nlohmann::json::object())
                             .get<std::map<std::string, std::vector<world_id>>>();
        auto model = make_model(std::move(worlds), edges, valuation);
        return pointed_model(model, j.at("point").get<world_id>());
    } catch (const nlohmann::json::exception& e) {
        throw model_error(std::string("malformed model: ") + e.what());
    }
}

inline model_set model_set_from_json(const nlohmann::json& j)
{
    if (j.is_object())
        return model_set{pointed_model_from_json(j)};
    if (!j.is_array())
        throw model_error("model set must be a JSON array of models");
    std::vector<pointed_model> out;
    for (const auto& m : j)
        out.push_back(pointed_model_from_json(m));
    return model_set(std::move(out));
}

inline nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw model_error("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw model_error("'" + path + "': " + e.what());
    }
}

} // namespace mlgame
