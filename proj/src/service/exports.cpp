#include <surveynet/service/exports.hpp>

#include <surveynet/csv.hpp>
#include <surveynet/error.hpp>
#include <surveynet/graph_export.hpp>
#include <surveynet/json_io.hpp>

namespace surveynet::service {

namespace {

using surveynet::to_string;

using Kind = PseudonymMap::Kind;

const RelationalInstance* instance_for(const WaveSnapshot& snapshot, const std::string& template_id) {
    for (const auto& inst : snapshot.instances)
        if (inst.template_id == template_id)
            return &inst;
    return nullptr;
}

ReportContext pseudonymous_context(const WaveSnapshot& snapshot, PseudonymMap& pseudonyms) {
    ReportContext context;
    for (const auto& id : snapshot.wave.roster)
        context.names[id] = pseudonyms.token(Kind::Respondent, id);
    return context;
}

std::string scores_csv(const WaveSnapshot& snapshot, PseudonymMap& pseudonyms) {
    std::string out = csv::format_row({"respondent", "scale", "score", "band"});
    for (const auto& id : snapshot.wave.roster) {
        auto it = snapshot.scores.find(id);
        if (it == snapshot.scores.end())
            continue;
        const std::string& token = pseudonyms.token(Kind::Respondent, id);
        for (const auto& e : it->second.entries)
            out += csv::format_row({token, e.scale, to_string(e.score), e.band.value_or("")});
    }
    return out;
}

std::string edges_csv(const NetworkView& view, PseudonymMap& pseudonyms) {
    EdgeList renamed = view.edges;
    for (auto& e : renamed.edges) {
        e.source = pseudonyms.token(Kind::Respondent, e.source);
        if (view.tmpl.mode == NetworkMode::OneMode)
            e.target = pseudonyms.token(Kind::Respondent, e.target);
    }
    return edges_to_csv(renamed);
}

std::string answer_cell(const Question& q, const Answer& a, PseudonymMap& pseudonyms) {
    std::string raw;
    if (const auto* selected = a.selected()) {
        for (std::size_t i = 0; i < selected->size(); ++i) {
            const std::size_t index = (*selected)[i];
            raw += (i ? ";" : "") + (index < q.options.size() ? to_string(q.options[index].value) : std::string("?"));
        }
    } else if (const auto* number = a.number()) {
        raw = to_string(*number);
    } else {
        raw = *a.free_text();
    }
    return q.anonymize ? pseudonyms.token(Kind::Field, raw) : raw;
}

std::string responses_csv(const WaveSnapshot& snapshot, PseudonymMap& pseudonyms) {
    const auto items = questionnaire_items(snapshot.published);
    std::vector<std::string> header{"respondent", "status"};
    for (const auto& item : items)
        header.push_back(item.instance_id);
    struct RelCol {
        const RelationalTemplate* tmpl;
        std::string alter;
    };
    std::vector<RelCol> rel_cols;
    const auto templates = questionnaire_templates(snapshot.published);
    for (const auto& t : templates) {
        const auto* inst = instance_for(snapshot, t.id);
        if (inst == nullptr)
            continue;
        const bool one_mode = t.mode == NetworkMode::OneMode;
        std::vector<std::string> alters;
        if (one_mode)
            alters = inst->roster;
        else
            for (const auto& e : t.entities)
                alters.push_back(e.id);
        for (const auto& alter : alters) {
            rel_cols.push_back({&snapshot.published.elements.templates.at(t.id), alter});
            header.push_back(relational_item_id(t.id, one_mode ? pseudonyms.token(Kind::Respondent, alter) : alter));
        }
    }
    std::string out = csv::format_row(header);
    for (const auto& id : snapshot.wave.roster) {
        auto it = snapshot.responses.find(id);
        if (it == snapshot.responses.end())
            continue;
        const auto& answers = it->second.answers;
        std::vector<std::string> row{pseudonyms.token(Kind::Respondent, id), std::string(to_string(it->second.status))};
        for (const auto& item : items) {
            auto a = answers.find(item.instance_id);
            row.push_back(a == answers.end() ? "" : answer_cell(item.question, a->second, pseudonyms));
        }
        for (const auto& col : rel_cols) {
            auto a = answers.find(relational_item_id(col.tmpl->id, col.alter));
            std::string cell;
            if (a != answers.end())
                if (const auto* selected = a->second.selected(); selected && selected->size() == 1 &&
                                                                  selected->front() < col.tmpl->tie_scale.size())
                    cell = to_string(col.tmpl->tie_scale[selected->front()].value);
            row.push_back(cell);
        }
        out += csv::format_row(row);
    }
    return out;
}

GraphExportInput graph_input(const WaveSnapshot& snapshot, const NetworkView& view, PseudonymMap& pseudonyms) {
    GraphExportInput input{&view.analysis, &view.edges, {}, {}};
    for (const auto& id : view.analysis.nodes) {
        const std::string& token = pseudonyms.token(Kind::Respondent, id);
        input.exported_id[id] = token;
        NodeInfo info{token, {}, std::nullopt, std::nullopt};
        if (auto r = snapshot.respondents.find(id); r != snapshot.respondents.end())
            if (auto sex = r->second.attributes.find("sex"); sex != r->second.attributes.end())
                info.sex = sex->second;
        if (auto s = snapshot.scores.find(id); s != snapshot.scores.end())
            if (const ScoreEntry* audit = s->second.find(audit_scale_name())) {
                info.audit_score = audit->score;
                info.audit_zone = audit->band;
            }
        input.nodes[id] = info;
    }
    return input;
}

Json report_to_json(const IndividualReport& r) { return Json::parse(render_report(r, ReportFormat::Structured)); }

std::string reports_json(const WaveSnapshot& snapshot, const NetworkView& view, PseudonymMap& pseudonyms) {
    Json individuals = Json::array();
    for (const auto& id : snapshot.wave.roster) {
        if (!snapshot.scores.count(id) || !view.analysis.index_of(id))
            continue;
        individuals.push_back(report_to_json(pseudonymous_report(snapshot, view, id, pseudonyms)));
    }
    Json doc{{"wave", snapshot.wave.id}, {"relation", view.analysis.relation}, {"individuals", individuals}};
    if (auto group = wave_group_report(snapshot, view))
        doc["group"] = Json::parse(render_report(*group, ReportFormat::Structured));
    else
        doc["group"] = nullptr;
    return doc.dump(2) + "\n";
}

} // namespace

std::vector<std::string> wave_relations(const WaveSnapshot& snapshot) {
    std::vector<std::string> out;
    for (const auto& t : questionnaire_templates(snapshot.published))
        out.push_back(t.relation);
    return out;
}

NetworkView analyse_network(const WaveSnapshot& snapshot, const std::string& relation, std::stop_token stop) {
    const auto templates = questionnaire_templates(snapshot.published);
    if (templates.empty())
        throw Error(ErrorCode::NoData, "questionnaire " + snapshot.published.def.id + " has no relational items");
    const RelationalTemplate* chosen = nullptr;
    for (const auto& t : templates)
        if (relation.empty() || t.relation == relation) {
            chosen = &t;
            break;
        }
    if (chosen == nullptr)
        throw Error(ErrorCode::NotFound, "wave " + snapshot.wave.id + " has no relation " + relation);
    const auto* inst = instance_for(snapshot, chosen->id);
    if (inst == nullptr)
        throw Error(ErrorCode::NoData, "relation " + chosen->relation + " was not instantiated");
    NetworkView view;
    view.tmpl = *chosen;
    view.edges = extract_edges(*chosen, *inst, snapshot.responses);
    if (chosen->mode == NetworkMode::OneMode) {
        view.matrix = build_matrix(view.edges, inst->roster);
        view.analysis = analyze(view.matrix, chosen->relation, snapshot.wave.id, stop);
    } else {
        std::vector<std::string> columns;
        for (const auto& e : chosen->entities)
            columns.push_back(e.id);
        view.matrix = build_matrix(view.edges, inst->roster, columns);
        view.analysis.relation = chosen->relation;
        view.analysis.wave_id = snapshot.wave.id;
        view.analysis.nodes = inst->roster;
    }
    return view;
}

std::string_view to_string(Artifact artifact) {
    switch (artifact) {
    case Artifact::ScoresCsv: return "scores-csv";
    case Artifact::EdgesCsv: return "edges-csv";
    case Artifact::GraphNodeLink: return "graph-node-link";
    case Artifact::Gexf: return "gexf";
    case Artifact::Reports: return "reports";
    case Artifact::ResponsesCsv: return "responses-csv";
    }
    return "?";
}

Artifact artifact_from_string(std::string_view text) {
    for (auto a : {Artifact::ScoresCsv, Artifact::EdgesCsv, Artifact::GraphNodeLink, Artifact::Gexf, Artifact::Reports,
                   Artifact::ResponsesCsv})
        if (to_string(a) == text)
            return a;
    throw Error(ErrorCode::UnknownFormat, "unknown export format " + std::string(text));
}

nlohmann::json network_document(const WaveSnapshot& snapshot, const NetworkView& view, PseudonymMap& pseudonyms) {
    if (view.tmpl.mode != NetworkMode::OneMode)
        throw Error(ErrorCode::TwoModeInput, "graph views need a one-mode relation");
    return node_link_document(graph_input(snapshot, view, pseudonyms));
}

IndividualReport pseudonymous_report(const WaveSnapshot& snapshot, const NetworkView& view,
                                     const std::string& respondent_id, PseudonymMap& pseudonyms) {
    if (view.tmpl.mode != NetworkMode::OneMode)
        throw Error(ErrorCode::TwoModeInput, "individual reports need a one-mode relation");
    auto s = snapshot.scores.find(respondent_id);
    const ScoreReport* scores = s == snapshot.scores.end() ? nullptr : &s->second;
    IndividualReport report = individual_report(scores, view.analysis, view.matrix, respondent_id,
                                                pseudonymous_context(snapshot, pseudonyms));
    const std::string& token = pseudonyms.token(Kind::Respondent, respondent_id);
    report.respondent_id = token;
    for (auto& m : report.mediators)
        m = pseudonyms.token(Kind::Respondent, m);
    for (auto& m : report.influencers)
        m = pseudonyms.token(Kind::Respondent, m);
    return report;
}

std::optional<GroupReport> wave_group_report(const WaveSnapshot& snapshot, const NetworkView& view) {
    if (view.tmpl.mode != NetworkMode::OneMode)
        throw Error(ErrorCode::TwoModeInput, "group reports need a one-mode relation");
    std::vector<ScoreReport> scores;
    for (const auto& id : snapshot.wave.roster)
        if (auto it = snapshot.scores.find(id); it != snapshot.scores.end())
            scores.push_back(it->second);
    if (scores.size() < 2)
        return std::nullopt;
    return group_report(view.analysis, scores);
}

std::string export_artifact(const WaveSnapshot& snapshot, Artifact artifact, PseudonymMap& pseudonyms,
                            const std::string& relation, std::stop_token stop) {
    switch (artifact) {
    case Artifact::ScoresCsv:
        return scores_csv(snapshot, pseudonyms);
    case Artifact::ResponsesCsv:
        return responses_csv(snapshot, pseudonyms);
    case Artifact::EdgesCsv:
        return edges_csv(analyse_network(snapshot, relation, stop), pseudonyms);
    case Artifact::GraphNodeLink:
        return network_document(snapshot, analyse_network(snapshot, relation, stop), pseudonyms).dump(2) + "\n";
    case Artifact::Gexf: {
        const auto view = analyse_network(snapshot, relation, stop);
        if (view.tmpl.mode != NetworkMode::OneMode)
            throw Error(ErrorCode::TwoModeInput, "graph views need a one-mode relation");
        return write_gexf(graph_input(snapshot, view, pseudonyms));
    }
    case Artifact::Reports:
        return reports_json(snapshot, analyse_network(snapshot, relation, stop), pseudonyms);
    }
    throw Error(ErrorCode::UnknownFormat, "unknown export format");
}

} // namespace surveynet::service
