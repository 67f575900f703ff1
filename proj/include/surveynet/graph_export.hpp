#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <surveynet/relational.hpp>
#include <surveynet/sna.hpp>

namespace surveynet {

/// Per-node data carried into graph exports. `label` is whatever the caller wants shown
/// (pseudonymised by the service).
struct NodeInfo {
    std::string label;
    std::string sex;
    std::optional<std::string> audit_zone;
    std::optional<Rational> audit_score;
};

/// 1..4 for "Zone I".."Zone IV", 0 when unknown.
int audit_zone_index(const std::optional<std::string>& zone);

/// Circle size grows with AUDIT zone: 10 for unknown, then 14, 18, 22, 26.
double node_size(int zone_index);

/// Light grey for girls, dark grey for boys, mid grey otherwise.
std::string sex_color(const std::string& sex);

struct GraphExportInput {
    const AnalysisResult* analysis = nullptr;
    const EdgeList* edges = nullptr;
    std::map<std::string, NodeInfo> nodes;          // by original node id
    std::map<std::string, std::string> exported_id; // original id -> id written out; identity if absent
};

/// Node-link document: nodes carry id, label, sex, audit_zone, audit_score, the three centralities,
/// community and the visual encoding; edges carry source, target, weight and relation.
nlohmann::json node_link_document(const GraphExportInput& input);

/// GEXF 1.2 with the same attributes and viz:size / viz:color.
std::string write_gexf(const GraphExportInput& input);

} // namespace surveynet
