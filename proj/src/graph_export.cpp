#include <surveynet/graph_export.hpp>

#include <cctype>
#include <cstdio>

#include <surveynet/error.hpp>
#include <surveynet/json_io.hpp>

namespace surveynet {

namespace {

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string number(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

const std::string& exported(const GraphExportInput& input, const std::string& id) {
    auto it = input.exported_id.find(id);
    return it == input.exported_id.end() ? id : it->second;
}

void check(const GraphExportInput& input) {
    if (input.analysis == nullptr || input.edges == nullptr)
        throw Error(ErrorCode::InvalidArgument, "graph export needs an analysis and an edge list");
}

struct Rgb {
    int r, g, b;
};

Rgb parse_hex(const std::string& color) {
    Rgb out{};
    std::sscanf(color.c_str(), "#%02x%02x%02x", &out.r, &out.g, &out.b);
    return out;
}

} // namespace

int audit_zone_index(const std::optional<std::string>& zone) {
    if (!zone)
        return 0;
    static const char* zones[] = {"Zone I", "Zone II", "Zone III", "Zone IV"};
    for (int i = 0; i < 4; ++i)
        if (*zone == zones[i])
            return i + 1;
    return 0;
}

double node_size(int zone_index) {
    return 10.0 + 4.0 * zone_index;
}

std::string sex_color(const std::string& sex) {
    std::string s;
    for (char c : sex)
        s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "f" || s == "female" || s == "girl" || s == "mujer" || s == "chica")
        return "#d3d3d3";
    if (s == "m" || s == "male" || s == "boy" || s == "hombre" || s == "chico")
        return "#505050";
    return "#a0a0a0";
}

nlohmann::json node_link_document(const GraphExportInput& input) {
    check(input);
    const auto& a = *input.analysis;
    Json nodes = Json::array();
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        const auto& id = a.nodes[i];
        auto info_it = input.nodes.find(id);
        const NodeInfo info = info_it == input.nodes.end() ? NodeInfo{} : info_it->second;
        const int zone = audit_zone_index(info.audit_zone);
        Json node{{"id", exported(input, id)},
                  {"label", info.label.empty() ? exported(input, id) : info.label},
                  {"sex", info.sex},
                  {"audit_zone", info.audit_zone ? Json(*info.audit_zone) : Json(nullptr)},
                  {"audit_zone_index", zone},
                  {"audit_score", info.audit_score ? rational_to_json(*info.audit_score) : Json(nullptr)},
                  {"popularity", a.popularity.values.at(i)},
                  {"mediation", a.mediation.values.at(i)},
                  {"influence", a.influence.values.at(i)},
                  {"community", a.partition.community.at(i)},
                  {"size", node_size(zone)},
                  {"color", sex_color(info.sex)}};
        nodes.push_back(std::move(node));
    }
    Json edges = Json::array();
    for (const auto& e : input.edges->edges)
        edges.push_back(Json{{"source", exported(input, e.source)},
                             {"target", exported(input, e.target)},
                             {"weight", rational_to_json(e.weight)},
                             {"relation", input.edges->relation}});
    return Json{{"directed", true},
                {"relation", a.relation},
                {"wave", a.wave_id},
                {"modularity", a.partition.modularity},
                {"encoding", {{"size", "audit_zone"}, {"color", "sex"}}},
                {"nodes", std::move(nodes)},
                {"links", std::move(edges)}};
}

std::string write_gexf(const GraphExportInput& input) {
    check(input);
    const auto& a = *input.analysis;
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<gexf xmlns=\"http://www.gexf.net/1.2draft\" xmlns:viz=\"http://www.gexf.net/1.2draft/viz\" "
           "version=\"1.2\">\n";
    out += "  <meta><creator>surveynet</creator><description>" + xml_escape(a.relation + " network, wave " + a.wave_id) +
           "</description></meta>\n";
    out += "  <graph mode=\"static\" defaultedgetype=\"directed\">\n";
    out += "    <attributes class=\"node\">\n"
           "      <attribute id=\"sex\" title=\"sex\" type=\"string\"/>\n"
           "      <attribute id=\"audit_zone\" title=\"audit_zone\" type=\"string\"/>\n"
           "      <attribute id=\"audit_score\" title=\"audit_score\" type=\"string\"/>\n"
           "      <attribute id=\"popularity\" title=\"popularity\" type=\"double\"/>\n"
           "      <attribute id=\"mediation\" title=\"mediation\" type=\"double\"/>\n"
           "      <attribute id=\"influence\" title=\"influence\" type=\"double\"/>\n"
           "      <attribute id=\"community\" title=\"community\" type=\"integer\"/>\n"
           "    </attributes>\n";
    out += "    <attributes class=\"edge\">\n"
           "      <attribute id=\"relation\" title=\"relation\" type=\"string\"/>\n"
           "    </attributes>\n";
    out += "    <nodes>\n";
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        const auto& id = a.nodes[i];
        auto info_it = input.nodes.find(id);
        const NodeInfo info = info_it == input.nodes.end() ? NodeInfo{} : info_it->second;
        const int zone = audit_zone_index(info.audit_zone);
        const auto& out_id = exported(input, id);
        const auto rgb = parse_hex(sex_color(info.sex));
        out += "      <node id=\"" + xml_escape(out_id) + "\" label=\"" +
               xml_escape(info.label.empty() ? out_id : info.label) + "\">\n";
        out += "        <attvalues>\n";
        auto att = [&](const char* key, const std::string& value) {
            out += "          <attvalue for=\"" + std::string(key) + "\" value=\"" + xml_escape(value) + "\"/>\n";
        };
        att("sex", info.sex);
        att("audit_zone", info.audit_zone.value_or(""));
        att("audit_score", info.audit_score ? to_string(*info.audit_score) : "");
        att("popularity", number(a.popularity.values.at(i)));
        att("mediation", number(a.mediation.values.at(i)));
        att("influence", number(a.influence.values.at(i)));
        att("community", std::to_string(a.partition.community.at(i)));
        out += "        </attvalues>\n";
        out += "        <viz:size value=\"" + number(node_size(zone)) + "\"/>\n";
        out += "        <viz:color r=\"" + std::to_string(rgb.r) + "\" g=\"" + std::to_string(rgb.g) + "\" b=\"" +
               std::to_string(rgb.b) + "\"/>\n";
        out += "      </node>\n";
    }
    out += "    </nodes>\n    <edges>\n";
    std::size_t edge_id = 0;
    for (const auto& e : input.edges->edges) {
        out += "      <edge id=\"" + std::to_string(edge_id++) + "\" source=\"" + xml_escape(exported(input, e.source)) +
               "\" target=\"" + xml_escape(exported(input, e.target)) + "\" weight=\"" +
               number(to_double(e.weight)) + "\">\n";
        out += "        <attvalues><attvalue for=\"relation\" value=\"" + xml_escape(input.edges->relation) +
               "\"/></attvalues>\n";
        out += "      </edge>\n";
    }
    out += "    </edges>\n  </graph>\n</gexf>\n";
    return out;
}

} // namespace surveynet
