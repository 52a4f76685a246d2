#ifndef DAGFAULT_SCHEMA_HPP_
#define DAGFAULT_SCHEMA_HPP_

#include <string>
#include <vector>

#include "dagfault/types.hpp"

namespace dagfault {

enum class VariableKind { manipulated, continuous_measurement, sampled_measurement };

std::string to_string(VariableKind k);
VariableKind variable_kind_from_string(const std::string& s);

struct VariableInfo {
    std::string id;           // e.g. "XMV.10", "XMEAS.17"
    std::string description;
    std::string units;
    VariableKind kind = VariableKind::continuous_measurement;
};

struct VariableSchema {
    std::string name;
    std::vector<VariableInfo> variables;

    Index size() const { return static_cast<Index>(variables.size()); }

    /// Index of a variable id, -1 if absent.
    Index find(const std::string& id) const;

    /// Throws Error if ids are not unique.
    void validate() const;
};

/// The built-in Tennessee Eastman schema: 11 manipulated (XMV.1-11),
/// 22 continuous measurements (XMEAS.1-22) and 19 sampled measurements
/// (XMEAS.23-41), 52 variables in total.
const VariableSchema& tep52_schema();

/// JSON (de)serialization; format matches the shipped tep52.schema.json.
VariableSchema load_schema_json(const std::string& path);
void save_schema_json(const VariableSchema& schema, const std::string& path);
std::string schema_to_json(const VariableSchema& schema);

}  // namespace dagfault

#endif  // DAGFAULT_SCHEMA_HPP_
