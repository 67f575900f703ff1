#include <surveynet/report.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include <surveynet/error.hpp>
#include <surveynet/instruments.hpp>
#include <surveynet/json_io.hpp>

#include "default_templates.hpp"

namespace surveynet {

namespace {

std::string fixed(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

std::string join_names(const std::vector<std::string>& ids, const ReportContext& context) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty())
            out += ", ";
        auto it = context.names.find(id);
        out += it == context.names.end() ? id : it->second;
    }
    return out.empty() ? context.templates.get("list.none") : out;
}

std::string name_of(const std::string& id, const ReportContext& context) {
    auto it = context.names.find(id);
    return it == context.names.end() ? id : it->second;
}

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]])
            ++j;
        const double average = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            r[order[k]] = average;
        i = j + 1;
    }
    return r;
}

Json highlight_json(const Highlight& h) {
    return Json{{"measure", h.measure}, {"value", h.value}, {"percentile", h.percentile}, {"level", h.level}};
}

Highlight highlight_from(const Json& j) {
    return Highlight{j.at("measure").get<std::string>(), j.at("value").get<double>(), j.at("percentile").get<int>(),
                     j.at("level").get<std::string>()};
}

template <class T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

Json optional_rational(const std::optional<Rational>& v) {
    return v ? rational_to_json(*v) : Json(nullptr);
}

std::optional<Rational> rational_or_null(const Json& j) {
    if (j.is_null())
        return std::nullopt;
    return rational_from_json(j);
}

std::optional<std::string> string_or_null(const Json& j) {
    if (j.is_null())
        return std::nullopt;
    return j.get<std::string>();
}

} // namespace

ReportTemplates ReportTemplates::defaults() {
    static const ReportTemplates shipped = parse(detail::kDefaultTemplates);
    return shipped;
}

ReportTemplates ReportTemplates::parse(const std::string& document, const std::string& locale) {
    Json doc;
    try {
        doc = Json::parse(document);
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("report templates: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains(locale) || !doc.at(locale).is_object())
        throw Error(ErrorCode::NotFound, "report templates: no locale " + locale);
    ReportTemplates out;
    for (const auto& [name, text] : doc.at(locale).items()) {
        if (!text.is_string())
            throw Error(ErrorCode::InvalidArgument, "report templates: " + name + " is not a string");
        out.templates_[name] = text.get<std::string>();
    }
    return out;
}

const std::string& ReportTemplates::get(const std::string& name) const {
    auto it = templates_.find(name);
    if (it == templates_.end())
        throw Error(ErrorCode::NotFound, "report template " + name + " is not defined");
    return it->second;
}

std::string ReportTemplates::render(const std::string& name, const std::map<std::string, std::string>& values) const {
    const std::string& text = get(name);
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{') {
            out += text[i];
            continue;
        }
        const auto close = text.find('}', i);
        if (close == std::string::npos)
            throw Error(ErrorCode::UnknownPlaceholder, "template " + name + ": unterminated placeholder");
        const std::string slot = text.substr(i + 1, close - i - 1);
        auto it = values.find(slot);
        if (it == values.end())
            throw Error(ErrorCode::UnknownPlaceholder, "template " + name + ": no value for {" + slot + "}");
        out += it->second;
        i = close;
    }
    return out;
}

int percentile_rank(const std::vector<double>& values, std::size_t index) {
    if (index >= values.size())
        throw Error(ErrorCode::InvalidArgument, "percentile index out of range");
    if (values.size() == 1)
        return 50;
    std::size_t lower = 0;
    for (double v : values)
        if (v < values[index])
            ++lower;
    return static_cast<int>(std::lround(100.0 * static_cast<double>(lower) / static_cast<double>(values.size() - 1)));
}

std::string level_key(int percentile, const PercentileBands& bands) {
    if (percentile >= bands.very_high)
        return "level.very_high";
    if (percentile >= bands.high)
        return "level.high";
    if (percentile >= bands.moderate)
        return "level.moderate";
    return "level.low";
}

std::string audit_scale_name() { return std::string(kAuditId) + ".total"; }

IndividualReport individual_report(const ScoreReport* scores, const AnalysisResult& analysis,
                                   const Sociomatrix& matrix, const std::string& node,
                                   const ReportContext& context) {
    if (scores == nullptr || scores->respondent_id != node)
        throw Error(ErrorCode::NoData, "no submitted response for " + node);
    const auto index = analysis.index_of(node);
    if (!index)
        throw Error(ErrorCode::NotFound, node + " is not in the analysed network");

    IndividualReport report;
    report.respondent_id = node;
    report.wave_id = analysis.wave_id;
    report.relation = analysis.relation;
    report.display_name = name_of(node, context);

    std::map<std::string, std::string> values{{"name", report.display_name}, {"relation", analysis.relation}};
    for (const CentralityVector* c : {&analysis.popularity, &analysis.mediation, &analysis.influence}) {
        Highlight h;
        h.measure = c->measure;
        h.value = c->values[*index];
        h.percentile = percentile_rank(c->values, *index);
        h.level = context.templates.get(level_key(h.percentile, context.bands));
        values[c->measure + "_percentile"] = std::to_string(h.percentile);
        values[c->measure + "_level"] = h.level;
        report.highlights.push_back(std::move(h));
    }
    values["popularity"] = std::to_string(static_cast<long long>(std::llround(analysis.popularity.values[*index])));

    const auto& community = analysis.partition.community;
    report.community = community.at(*index) + 1;
    report.community_size =
        static_cast<std::size_t>(std::count(community.begin(), community.end(), community[*index]));
    values["community"] = std::to_string(report.community);
    values["community_peers"] = std::to_string(report.community_size - 1);

    report.mediators = suggest_mediators(matrix, node, context.top_k);
    report.influencers = suggest_influencers(matrix, node, context.top_k, &analysis.influence);
    values["mediators"] = join_names(report.mediators, context);
    values["influencers"] = join_names(report.influencers, context);
    report.network_paragraph = context.templates.render("network", values);

    if (const ScoreEntry* audit = scores->find(audit_scale_name())) {
        const ZoneAdvice advice = audit_zone(audit->score);
        report.audit_score = audit->score;
        report.audit_zone = advice.zone;
        report.intervention = advice.intervention;
        values["audit_score"] = to_string(audit->score);
        values["audit_zone"] = advice.zone;
        values["intervention"] = advice.intervention;
        report.consumption_paragraph = context.templates.render("consumption", values);
    } else {
        report.consumption_paragraph = context.templates.render("consumption.missing", values);
    }
    return report;
}

std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw Error(ErrorCode::InvalidArgument, "spearman: series lengths differ");
    if (x.size() < 2)
        return std::nullopt;
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0)
        return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

GroupReport group_report(const AnalysisResult& analysis, const std::vector<ScoreReport>& scores,
                         const ReportContext& context) {
    if (scores.size() < 2)
        throw Error(ErrorCode::InsufficientData, "a group report needs at least two submitted responses");
    GroupReport report;
    report.wave_id = analysis.wave_id;
    report.relation = analysis.relation;
    report.respondents = analysis.nodes.size();
    report.ties = static_cast<std::size_t>(
        std::llround(std::accumulate(analysis.popularity.values.begin(), analysis.popularity.values.end(), 0.0)));
    report.modularity = analysis.partition.modularity;

    std::map<std::string, const ScoreReport*> by_node;
    for (const auto& s : scores)
        by_node[s.respondent_id] = &s;

    const auto& community = analysis.partition.community;
    const std::size_t count = analysis.partition.community_count();
    for (std::size_t c = 0; c < count; ++c) {
        CommunityRow row;
        row.community = c + 1;
        Rational total = 0;
        std::size_t scored = 0;
        for (std::size_t i = 0; i < community.size(); ++i) {
            if (community[i] != c)
                continue;
            ++row.size;
            auto it = by_node.find(analysis.nodes[i]);
            if (it == by_node.end())
                continue;
            if (const ScoreEntry* audit = it->second->find(audit_scale_name())) {
                total += audit->score;
                ++scored;
            }
        }
        if (scored > 0)
            row.mean_audit = total / Rational(static_cast<long long>(scored));
        report.communities.push_back(row);
    }

    std::vector<std::string> partners{std::string(kFasId) + ".total", std::string(kSelfEfficacyId) + ".total"};
    for (const auto& s : scores)
        for (const auto& e : s.entries)
            if (e.scale.rfind(std::string(kKidscreenId) + ".", 0) == 0 &&
                std::find(partners.begin(), partners.end(), e.scale) == partners.end())
                partners.push_back(e.scale);
    for (const auto& scale : partners) {
        std::vector<double> x, y;
        for (const auto& s : scores) {
            const ScoreEntry* audit = s.find(audit_scale_name());
            const ScoreEntry* other = s.find(scale);
            if (audit && other) {
                x.push_back(to_double(audit->score));
                y.push_back(to_double(other->score));
            }
        }
        if (x.empty())
            continue;
        report.correlations.push_back(CorrelationNote{scale, spearman(x, y), x.size()});
    }

    report.summary = context.templates.render(
        "group.summary", {{"relation", report.relation},
                          {"respondents", std::to_string(report.respondents)},
                          {"ties", std::to_string(report.ties)},
                          {"communities", std::to_string(report.communities.size())},
                          {"modularity", fixed(report.modularity, 3)}});
    for (const auto& row : report.communities) {
        const std::map<std::string, std::string> v{
            {"community", std::to_string(row.community)},
            {"size", std::to_string(row.size)},
            {"mean_audit", row.mean_audit ? to_decimal(*row.mean_audit, 2) : std::string()}};
        report.summary += "\n" + context.templates.render(row.mean_audit ? "group.community" : "group.community.no_audit", v);
    }
    for (const auto& note : report.correlations) {
        const std::map<std::string, std::string> v{{"scale", note.scale},
                                                   {"pairs", std::to_string(note.pairs)},
                                                   {"rho", note.spearman ? fixed(*note.spearman, 3) : std::string()}};
        report.summary += "\n" + context.templates.render(note.spearman ? "group.correlation" : "group.correlation.na", v);
    }
    return report;
}

ReportFormat report_format_from_string(const std::string& name) {
    if (name == "text")
        return ReportFormat::PlainText;
    if (name == "json")
        return ReportFormat::Structured;
    throw Error(ErrorCode::UnknownFormat, "unknown report format " + name);
}

std::string render_report(const IndividualReport& r, ReportFormat format) {
    if (format == ReportFormat::PlainText)
        return r.network_paragraph + "\n\n" + r.consumption_paragraph + "\n";
    Json highlights = Json::array();
    for (const auto& h : r.highlights)
        highlights.push_back(highlight_json(h));
    Json j{{"kind", "individual"},
           {"respondent", r.respondent_id},
           {"wave", r.wave_id},
           {"display_name", r.display_name},
           {"relation", r.relation},
           {"network", r.network_paragraph},
           {"consumption", r.consumption_paragraph},
           {"audit_zone", optional_json(r.audit_zone)},
           {"audit_score", optional_rational(r.audit_score)},
           {"intervention", optional_json(r.intervention)},
           {"highlights", highlights},
           {"community", r.community},
           {"community_size", r.community_size},
           {"mediators", r.mediators},
           {"influencers", r.influencers}};
    return j.dump(2);
}

std::string render_report(const GroupReport& r, ReportFormat format) {
    if (format == ReportFormat::PlainText)
        return r.summary + "\n";
    Json communities = Json::array();
    for (const auto& c : r.communities)
        communities.push_back(
            Json{{"community", c.community}, {"size", c.size}, {"mean_audit", optional_rational(c.mean_audit)}});
    Json correlations = Json::array();
    for (const auto& c : r.correlations)
        correlations.push_back(Json{{"scale", c.scale}, {"spearman", optional_json(c.spearman)}, {"pairs", c.pairs}});
    Json j{{"kind", "group"},           {"wave", r.wave_id},         {"relation", r.relation},
           {"respondents", r.respondents}, {"ties", r.ties},            {"modularity", r.modularity},
           {"summary", r.summary},      {"communities", communities}, {"correlations", correlations}};
    return j.dump(2);
}

IndividualReport parse_individual_report(const std::string& structured) {
    try {
        const Json j = Json::parse(structured);
        IndividualReport r;
        r.respondent_id = j.at("respondent").get<std::string>();
        r.wave_id = j.at("wave").get<std::string>();
        r.display_name = j.at("display_name").get<std::string>();
        r.relation = j.at("relation").get<std::string>();
        r.network_paragraph = j.at("network").get<std::string>();
        r.consumption_paragraph = j.at("consumption").get<std::string>();
        r.audit_zone = string_or_null(j.at("audit_zone"));
        r.audit_score = rational_or_null(j.at("audit_score"));
        r.intervention = string_or_null(j.at("intervention"));
        for (const auto& h : j.at("highlights"))
            r.highlights.push_back(highlight_from(h));
        r.community = j.at("community").get<std::size_t>();
        r.community_size = j.at("community_size").get<std::size_t>();
        r.mediators = j.at("mediators").get<std::vector<std::string>>();
        r.influencers = j.at("influencers").get<std::vector<std::string>>();
        return r;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("individual report: ") + e.what());
    }
}

GroupReport parse_group_report(const std::string& structured) {
    try {
        const Json j = Json::parse(structured);
        GroupReport r;
        r.wave_id = j.at("wave").get<std::string>();
        r.relation = j.at("relation").get<std::string>();
        r.respondents = j.at("respondents").get<std::size_t>();
        r.ties = j.at("ties").get<std::size_t>();
        r.modularity = j.at("modularity").get<double>();
        r.summary = j.at("summary").get<std::string>();
        for (const auto& c : j.at("communities"))
            r.communities.push_back(CommunityRow{c.at("community").get<std::size_t>(), c.at("size").get<std::size_t>(),
                                                 rational_or_null(c.at("mean_audit"))});
        for (const auto& c : j.at("correlations")) {
            std::optional<double> rho;
            if (!c.at("spearman").is_null())
                rho = c.at("spearman").get<double>();
            r.correlations.push_back(CorrelationNote{c.at("scale").get<std::string>(), rho, c.at("pairs").get<std::size_t>()});
        }
        return r;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("group report: ") + e.what());
    }
}

} // namespace surveynet
