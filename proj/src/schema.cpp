#include "dagfault/schema.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

namespace dagfault {

using nlohmann::json;

std::string to_string(VariableKind k) {
    switch (k) {
        case VariableKind::manipulated: return "manipulated";
        case VariableKind::continuous_measurement: return "continuous_measurement";
        case VariableKind::sampled_measurement: return "sampled_measurement";
    }
    return "unknown";
}

VariableKind variable_kind_from_string(const std::string& s) {
    if (s == "manipulated") return VariableKind::manipulated;
    if (s == "continuous_measurement") return VariableKind::continuous_measurement;
    if (s == "sampled_measurement") return VariableKind::sampled_measurement;
    throw Error("unknown variable kind: " + s);
}

Index VariableSchema::find(const std::string& id) const {
    for (Index i = 0; i < size(); ++i)
        if (variables[static_cast<std::size_t>(i)].id == id) return i;
    return -1;
}

void VariableSchema::validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& v : variables)
        if (!seen.insert(v.id).second)
            throw Error("duplicate variable id in schema: " + v.id);
}

namespace {

VariableSchema build_tep52() {
    VariableSchema s;
    s.name = "tep52";
    auto mv = [&](int n, const char* d, const char* u) {
        s.variables.push_back({"XMV." + std::to_string(n), d, u, VariableKind::manipulated});
    };
    auto cm = [&](int n, const char* d, const char* u) {
        s.variables.push_back({"XMEAS." + std::to_string(n), d, u, VariableKind::continuous_measurement});
    };
    auto sm = [&](int n, const char* d, const char* u) {
        s.variables.push_back({"XMEAS." + std::to_string(n), d, u, VariableKind::sampled_measurement});
    };

    mv(1, "D feed flow (stream 2)", "kg h-1");
    mv(2, "E feed flow (stream 3)", "kg h-1");
    mv(3, "A feed flow (stream 1)", "kscmh");
    mv(4, "A and C feed flow (stream 4)", "kscmh");
    mv(5, "Compressor recycle valve", "%");
    mv(6, "Purge valve (stream 9)", "%");
    mv(7, "Separator pot liquid flow (stream 10)", "m3 h-1");
    mv(8, "Stripper liquid product flow (stream 11)", "m3 h-1");
    mv(9, "Stripper steam valve", "%");
    mv(10, "Reactor cooling water flow", "m3 h-1");
    mv(11, "Condenser cooling water flow", "m3 h-1");

    cm(1, "A feed (stream 1)", "kscmh");
    cm(2, "D feed (stream 2)", "kg h-1");
    cm(3, "E feed (stream 3)", "kg h-1");
    cm(4, "A and C feed (stream 4)", "kscmh");
    cm(5, "Recycle flow (stream 8)", "kscmh");
    cm(6, "Reactor feed rate (stream 6)", "kscmh");
    cm(7, "Reactor pressure", "kPa gauge");
    cm(8, "Reactor level", "%");
    cm(9, "Reactor temperature", "degC");
    cm(10, "Purge rate (stream 9)", "kscmh");
    cm(11, "Product separator temperature", "degC");
    cm(12, "Product separator level", "%");
    cm(13, "Product separator pressure", "kPa gauge");
    cm(14, "Product separator underflow (stream 10)", "m3 h-1");
    cm(15, "Stripper level", "%");
    cm(16, "Stripper pressure", "kPa gauge");
    cm(17, "Stripper underflow (stream 11)", "m3 h-1");
    cm(18, "Stripper temperature", "degC");
    cm(19, "Stripper steam flow", "kg h-1");
    cm(20, "Compressor work", "kW");
    cm(21, "Reactor cooling water outlet temp.", "degC");
    cm(22, "Separator cooling water outlet temp.", "degC");

    sm(23, "Reactor feed analysis (stream 6): A", "mol%");
    sm(24, "Reactor feed analysis (stream 6): B", "mol%");
    sm(25, "Reactor feed analysis (stream 6): C", "mol%");
    sm(26, "Reactor feed analysis (stream 6): D", "mol%");
    sm(27, "Reactor feed analysis (stream 6): E", "mol%");
    sm(28, "Reactor feed analysis (stream 6): F", "mol%");
    sm(29, "Purge gas analysis (stream 9): A", "mol%");
    sm(30, "Purge gas analysis (stream 9): B", "mol%");
    sm(31, "Purge gas analysis (stream 9): C", "mol%");
    sm(32, "Purge gas analysis (stream 9): D", "mol%");
    sm(33, "Purge gas analysis (stream 9): E", "mol%");
    sm(34, "Purge gas analysis (stream 9): F", "mol%");
    sm(35, "Purge gas analysis (stream 9): G", "mol%");
    sm(36, "Purge gas analysis (stream 9): H", "mol%");
    sm(37, "Product analysis (stream 11): D", "mol%");
    sm(38, "Product analysis (stream 11): E", "mol%");
    sm(39, "Product analysis (stream 11): F", "mol%");
    sm(40, "Product analysis (stream 11): G", "mol%");
    sm(41, "Product analysis (stream 11): H", "mol%");

    s.validate();
    return s;
}

}  // namespace

const VariableSchema& tep52_schema() {
    static const VariableSchema s = build_tep52();
    return s;
}

std::string schema_to_json(const VariableSchema& schema) {
    json j;
    j["name"] = schema.name;
    j["variables"] = json::array();
    for (const auto& v : schema.variables) {
        j["variables"].push_back({{"id", v.id},
                                  {"description", v.description},
                                  {"units", v.units},
                                  {"kind", to_string(v.kind)}});
    }
    return j.dump(2) + "\n";
}

void save_schema_json(const VariableSchema& schema, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << schema_to_json(schema);
}

VariableSchema load_schema_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema file: " + path);
    json j = json::parse(in);
    VariableSchema s;
    s.name = j.at("name").get<std::string>();
    for (const auto& v : j.at("variables")) {
        s.variables.push_back({v.at("id").get<std::string>(),
                               v.at("description").get<std::string>(),
                               v.at("units").get<std::string>(),
                               variable_kind_from_string(v.at("kind").get<std::string>())});
    }
    s.validate();
    return s;
}

}  // namespace dagfault
