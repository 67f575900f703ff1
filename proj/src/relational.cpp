#include <surveynet/relational.hpp>

#include <algorithm>
#include <set>

#include <surveynet/csv.hpp>
#include <surveynet/error.hpp>

namespace surveynet {

namespace {

std::vector<AlterItem> alter_items_for(const RelationalTemplate& tmpl, const std::vector<std::string>& roster,
                                       const std::string& self) {
    std::vector<AlterItem> items;
    if (tmpl.mode == NetworkMode::OneMode) {
        for (const auto& alter : roster)
            if (alter != self)
                items.push_back({alter, relational_item_id(tmpl.id, alter)});
    } else {
        for (const auto& entity : tmpl.entities)
            items.push_back({entity.id, relational_item_id(tmpl.id, entity.id)});
    }
    return items;
}

} // namespace

std::string_view to_string(NetworkMode mode) {
    return mode == NetworkMode::OneMode ? "one-mode" : "two-mode";
}

NetworkMode network_mode_from_string(std::string_view text) {
    if (text == "one-mode")
        return NetworkMode::OneMode;
    if (text == "two-mode")
        return NetworkMode::TwoMode;
    throw Error(ErrorCode::InvalidArgument, "unknown network mode '" + std::string(text) + "'");
}

std::vector<AnswerOption> default_tie_scale() {
    return {{"No tie", Rational(0)}, {"Acquaintance", Rational(1)}, {"Partner", Rational(2)}, {"Friend", Rational(3)}};
}

std::vector<Finding> validate_template(const RelationalTemplate& tmpl) {
    std::vector<Finding> out;
    if (tmpl.id.empty() || tmpl.id.find_first_of("[],") != std::string::npos)
        out.push_back({tmpl.id, "template-id", "relational template id '" + tmpl.id + "' is empty or contains [ ] ,"});
    if (tmpl.relation.empty())
        out.push_back({tmpl.id, "template-relation", "relational template " + tmpl.id + " has no relation name"});
    if (tmpl.tie_scale.size() < 2)
        out.push_back({tmpl.id, "tie-scale-size", "relational template " + tmpl.id + " needs at least 2 tie levels"});
    for (std::size_t i = 1; i < tmpl.tie_scale.size(); ++i)
        if (!(tmpl.tie_scale[i - 1].value < tmpl.tie_scale[i].value))
            out.push_back({tmpl.id, "tie-scale-order",
                           "relational template " + tmpl.id + " tie weights must be strictly increasing"});
    if (!tmpl.tie_scale.empty() && tmpl.tie_scale.front().value < 0)
        out.push_back({tmpl.id, "tie-scale-negative", "relational template " + tmpl.id + " has a negative tie weight"});
    if (tmpl.mode == NetworkMode::TwoMode) {
        std::set<std::string> ids;
        for (const auto& e : tmpl.entities)
            if (!ids.insert(e.id).second)
                out.push_back({tmpl.id, "duplicate-entity", "relational template " + tmpl.id + " repeats entity " + e.id});
    } else if (!tmpl.entities.empty()) {
        out.push_back({tmpl.id, "entities-one-mode", "one-mode template " + tmpl.id + " cannot list entities"});
    }
    return out;
}

std::string relational_item_id(const std::string& template_id, const std::string& alter_id) {
    return template_id + "[" + alter_id + "]";
}

std::optional<std::pair<std::string, std::string>> parse_relational_item_id(const std::string& id) {
    auto open = id.find('[');
    if (open == std::string::npos || open == 0 || id.size() < open + 3 || id.back() != ']')
        return std::nullopt;
    std::string alter = id.substr(open + 1, id.size() - open - 2);
    if (alter.find_first_of("[]") != std::string::npos)
        return std::nullopt;
    return std::make_pair(id.substr(0, open), alter);
}

RelationalInstance instantiate(const RelationalTemplate& tmpl, const Wave& wave,
                               const std::map<std::string, std::string>& display_names) {
    if (tmpl.mode == NetworkMode::OneMode && wave.roster.size() < 2)
        throw Error(ErrorCode::NoAlters, "template " + tmpl.id + ": one-mode roster needs at least two people");
    if (tmpl.mode == NetworkMode::TwoMode && (tmpl.entities.empty() || wave.roster.empty()))
        throw Error(ErrorCode::NoAlters, "template " + tmpl.id + ": two-mode template needs entities and respondents");
    RelationalInstance instance;
    instance.template_id = tmpl.id;
    instance.wave_id = wave.id;
    instance.roster = wave.roster;
    for (const auto& person : wave.roster) {
        instance.items[person] = alter_items_for(tmpl, wave.roster, person);
        if (tmpl.mode == NetworkMode::OneMode) {
            auto it = display_names.find(person);
            instance.display_names[person] = it != display_names.end() ? it->second : person;
        }
    }
    if (tmpl.mode == NetworkMode::TwoMode)
        for (const auto& entity : tmpl.entities)
            instance.display_names[entity.id] = entity.label.empty() ? entity.id : entity.label;
    return instance;
}

std::string render_prompt(const RelationalTemplate& tmpl, const RelationalInstance& instance,
                          const std::string& alter_id) {
    auto it = instance.display_names.find(alter_id);
    const std::string& name = it != instance.display_names.end() ? it->second : alter_id;
    std::string out = tmpl.prompt;
    const std::string slot = "{alter}";
    for (auto pos = out.find(slot); pos != std::string::npos; pos = out.find(slot, pos + name.size()))
        out.replace(pos, slot.size(), name);
    return out;
}

RosterEditResult apply_roster_edit(const RelationalTemplate& tmpl, RelationalInstance instance,
                                   std::map<std::string, ResponseSet> responses, const RosterEdit& edit,
                                   bool wave_closed) {
    if (wave_closed)
        throw Error(ErrorCode::WaveClosed, "wave " + instance.wave_id + " is closed; the roster is frozen");
    RosterEditResult result;
    const auto& id = edit.respondent_id;
    const bool present = std::find(instance.roster.begin(), instance.roster.end(), id) != instance.roster.end();
    switch (edit.kind) {
    case RosterEdit::Kind::Add: {
        if (present)
            throw Error(ErrorCode::InvalidArgument, id + " is already in the roster");
        instance.roster.push_back(id);
        if (tmpl.mode == NetworkMode::OneMode) {
            for (auto& [person, items] : instance.items)
                items.push_back({id, relational_item_id(tmpl.id, id)});
            instance.display_names[id] = edit.display_name.empty() ? id : edit.display_name;
        }
        instance.items[id] = alter_items_for(tmpl, instance.roster, id);
        break;
    }
    case RosterEdit::Kind::Remove: {
        if (!present)
            throw Error(ErrorCode::NotInRoster, id + " is not in the roster");
        instance.roster.erase(std::find(instance.roster.begin(), instance.roster.end(), id));
        instance.items.erase(id);
        if (tmpl.mode == NetworkMode::OneMode) {
            const std::string item_id = relational_item_id(tmpl.id, id);
            for (auto& [person, items] : instance.items)
                std::erase_if(items, [&](const AlterItem& item) { return item.alter_id == id; });
            for (auto& [person, response] : responses)
                response.answers.erase(item_id);
            instance.display_names.erase(id);
        }
        if (auto it = responses.find(id); it != responses.end()) {
            result.retired.push_back(std::move(it->second));
            responses.erase(it);
        }
        break;
    }
    case RosterEdit::Kind::Rename: {
        if (!present)
            throw Error(ErrorCode::NotInRoster, id + " is not in the roster");
        if (tmpl.mode == NetworkMode::OneMode)
            instance.display_names[id] = edit.display_name;
        break;
    }
    }
    result.instance = std::move(instance);
    result.responses = std::move(responses);
    return result;
}

EdgeList extract_edges(const RelationalTemplate& tmpl, const RelationalInstance& instance,
                       const std::map<std::string, ResponseSet>& responses) {
    EdgeList out;
    out.relation = tmpl.relation;
    out.wave_id = instance.wave_id;
    for (const auto& source : instance.roster) {
        auto response = responses.find(source);
        if (response == responses.end() || response->second.status != CompletionStatus::Submitted)
            continue;
        auto items = instance.items.find(source);
        if (items == instance.items.end())
            continue;
        for (const auto& item : items->second) {
            auto answer = response->second.answers.find(item.instance_id);
            if (answer == response->second.answers.end())
                continue;
            const auto* selected = answer->second.selected();
            if (selected == nullptr || selected->size() != 1 || selected->front() >= tmpl.tie_scale.size())
                continue;
            const Rational& weight = tmpl.tie_scale[selected->front()].value;
            if (weight > 0)
                out.edges.push_back({source, item.alter_id, weight});
        }
    }
    return out;
}

std::string edges_to_csv(const EdgeList& edges) {
    std::string out = csv::format_row({"source", "target", "weight", "relation", "wave"});
    for (const auto& e : edges.edges)
        out += csv::format_row({e.source, e.target, to_string(e.weight), edges.relation, edges.wave_id});
    return out;
}

EdgeList edges_from_csv(const std::string& text) {
    auto rows = csv::parse(text);
    if (rows.empty() || rows.front() != csv::Row{"source", "target", "weight", "relation", "wave"})
        throw Error(ErrorCode::InvalidArgument, "edge CSV must start with header source,target,weight,relation,wave");
    EdgeList out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 5)
            throw Error(ErrorCode::InvalidArgument, "edge CSV row " + std::to_string(i + 1) + " needs 5 fields");
        if (i == 1) {
            out.relation = row[3];
            out.wave_id = row[4];
        } else if (row[3] != out.relation || row[4] != out.wave_id) {
            throw Error(ErrorCode::InvalidArgument, "edge CSV mixes relations or waves at row " + std::to_string(i + 1));
        }
        try {
            out.edges.push_back({row[0], row[1], parse_rational(row[2])});
        } catch (const std::invalid_argument& e) {
            throw Error(ErrorCode::InvalidArgument, "edge CSV row " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return out;
}

} // namespace surveynet
