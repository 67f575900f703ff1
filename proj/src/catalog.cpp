#include <surveynet/catalog.hpp>

#include <set>

#include <surveynet/formula.hpp>

namespace surveynet {

namespace {

std::string join_messages(const std::vector<Finding>& findings) {
    std::string out;
    for (const auto& f : findings) {
        if (!out.empty())
            out += "; ";
        out += f.message;
    }
    return out;
}

std::vector<Finding> validate_group(const QuestionGroup& group, const Catalog& catalog) {
    std::vector<Finding> out;
    if (group.members.empty())
        out.push_back({group.id, "empty-group", "group " + group.id + " has no members"});
    std::set<std::string> scoreable;
    std::set<std::string> free_text;
    std::map<std::string, ValueRange> ranges;
    for (const auto& member : group.members) {
        auto q = catalog.questions.find(member);
        if (q == catalog.questions.end()) {
            out.push_back({group.id, "unresolved-element", "unresolved element " + member});
            continue;
        }
        if (q->second.kind == QuestionKind::FreeText)
            free_text.insert(member);
        else
            scoreable.insert(member);
        if (auto r = question_value_range(q->second))
            ranges[member] = *r;
    }
    try {
        auto formula = parse_formula(group.formula, scoreable, free_text);
        if (group.bands) {
            auto range = attainable_range(*formula.root, ranges);
            auto bands = validate_band_table(group.id, *group.bands, range ? &range->lower : nullptr,
                                             range ? &range->upper : nullptr);
            out.insert(out.end(), bands.begin(), bands.end());
        }
    } catch (const FormulaError& e) {
        switch (e.code()) {
        case ErrorCode::UnknownItem:
            out.push_back({group.id, "formula-non-member",
                           "group " + group.id + ": formula references non-member (" + e.what() + ")"});
            break;
        case ErrorCode::FreeTextReference:
            out.push_back({group.id, "formula-free-text", "group " + group.id + ": " + e.what()});
            break;
        default:
            out.push_back({group.id, "formula-syntax", "group " + group.id + ": " + e.what()});
        }
    }
    return out;
}

template <typename Map>
Catalog& copy_into(Catalog& snapshot, const Map& source, Map Catalog::*member, const std::string& id) {
    if (auto it = source.find(id); it != source.end())
        (snapshot.*member)[id] = it->second;
    return snapshot;
}

} // namespace

Catalog Catalog::with_builtins() {
    Catalog catalog;
    for (auto& inst : builtin_instruments()) {
        std::string id = inst.id;
        catalog.instruments.emplace(std::move(id), std::move(inst));
    }
    return catalog;
}

std::vector<Finding> validate_questionnaire(const QuestionnaireDef& def, const Catalog& catalog) {
    std::vector<Finding> out;
    if (def.id.empty())
        out.push_back({"", "questionnaire-id", "questionnaire without id"});
    std::set<std::pair<ElementKind, std::string>> seen;
    std::set<std::string> item_ids;
    auto claim_item = [&](const std::string& element, const std::string& item_id) {
        if (!item_ids.insert(item_id).second)
            out.push_back({element, "duplicate-item", "question " + item_id + " is asked more than once"});
    };
    for (const auto& ref : def.elements) {
        if (!seen.insert({ref.kind, ref.id}).second) {
            out.push_back({ref.id, "duplicate-element", "duplicate element " + ref.id});
            continue;
        }
        auto unresolved = [&] { out.push_back({ref.id, "unresolved-element", "unresolved element " + ref.id}); };
        switch (ref.kind) {
        case ElementKind::Instrument: {
            auto it = catalog.instruments.find(ref.id);
            if (it == catalog.instruments.end()) {
                unresolved();
                break;
            }
            try {
                check_instrument(it->second);
            } catch (const Error& e) {
                out.push_back({ref.id, "instrument-invalid", e.what()});
            }
            for (const auto& item : it->second.items)
                claim_item(ref.id, ref.id + "." + item.id);
            break;
        }
        case ElementKind::Question: {
            auto it = catalog.questions.find(ref.id);
            if (it == catalog.questions.end()) {
                unresolved();
                break;
            }
            auto findings = validate_question(it->second);
            out.insert(out.end(), findings.begin(), findings.end());
            if (it->second.kind == QuestionKind::RelationalTemplate)
                out.push_back({ref.id, "relational-question-element",
                               "question " + ref.id + " is relational; embed it as a relational-template element"});
            claim_item(ref.id, ref.id);
            break;
        }
        case ElementKind::Group: {
            auto it = catalog.groups.find(ref.id);
            if (it == catalog.groups.end()) {
                unresolved();
                break;
            }
            auto findings = validate_group(it->second, catalog);
            out.insert(out.end(), findings.begin(), findings.end());
            for (const auto& member : it->second.members) {
                auto q = catalog.questions.find(member);
                if (q == catalog.questions.end())
                    continue;
                auto qf = validate_question(q->second);
                out.insert(out.end(), qf.begin(), qf.end());
                claim_item(ref.id, member);
            }
            break;
        }
        case ElementKind::RelationalTemplate: {
            auto it = catalog.templates.find(ref.id);
            if (it == catalog.templates.end()) {
                unresolved();
                break;
            }
            auto findings = validate_template(it->second);
            out.insert(out.end(), findings.begin(), findings.end());
            break;
        }
        }
    }
    return out;
}

std::vector<ItemInstance> questionnaire_items(const PublishedQuestionnaire& published) {
    std::vector<ItemInstance> out;
    const auto& elements = published.elements;
    for (const auto& ref : published.def.elements) {
        switch (ref.kind) {
        case ElementKind::Instrument:
            for (const auto& item : elements.instruments.at(ref.id).items)
                out.push_back({ref.id + "." + item.id, item, ref.id});
            break;
        case ElementKind::Question:
            out.push_back({ref.id, elements.questions.at(ref.id), ""});
            break;
        case ElementKind::Group:
            for (const auto& member : elements.groups.at(ref.id).members)
                out.push_back({member, elements.questions.at(member), ref.id});
            break;
        case ElementKind::RelationalTemplate:
            break;
        }
    }
    return out;
}

std::vector<RelationalTemplate> questionnaire_templates(const PublishedQuestionnaire& published) {
    std::vector<RelationalTemplate> out;
    for (const auto& ref : published.def.elements)
        if (ref.kind == ElementKind::RelationalTemplate)
            out.push_back(published.elements.templates.at(ref.id));
    return out;
}

PublishRejected::PublishRejected(std::vector<Finding> findings)
    : Error(ErrorCode::PublishRejected, "questionnaire has validation findings: " + join_messages(findings)),
      findings_(std::move(findings)) {}

std::int64_t QuestionnaireRegistry::publish(QuestionnaireDef def, const Catalog& catalog) {
    if (auto findings = validate_questionnaire(def, catalog); !findings.empty())
        throw PublishRejected(std::move(findings));
    PublishedQuestionnaire published;
    for (const auto& ref : def.elements) {
        switch (ref.kind) {
        case ElementKind::Instrument:
            copy_into(published.elements, catalog.instruments, &Catalog::instruments, ref.id);
            break;
        case ElementKind::Question:
            copy_into(published.elements, catalog.questions, &Catalog::questions, ref.id);
            break;
        case ElementKind::Group:
            copy_into(published.elements, catalog.groups, &Catalog::groups, ref.id);
            for (const auto& member : catalog.groups.at(ref.id).members)
                copy_into(published.elements, catalog.questions, &Catalog::questions, member);
            break;
        case ElementKind::RelationalTemplate:
            copy_into(published.elements, catalog.templates, &Catalog::templates, ref.id);
            break;
        }
    }
    auto& versions = versions_[def.id];
    def.version = static_cast<std::int64_t>(versions.size()) + 1;
    published.def = std::move(def);
    versions.push_back(std::move(published));
    return versions.back().def.version;
}

const PublishedQuestionnaire* QuestionnaireRegistry::find(const std::string& id, std::int64_t version) const {
    auto it = versions_.find(id);
    if (it == versions_.end() || version < 1 || version > static_cast<std::int64_t>(it->second.size()))
        return nullptr;
    return &it->second[static_cast<std::size_t>(version - 1)];
}

std::int64_t QuestionnaireRegistry::latest_version(const std::string& id) const {
    auto it = versions_.find(id);
    return it == versions_.end() ? 0 : static_cast<std::int64_t>(it->second.size());
}

void QuestionnaireRegistry::restore(PublishedQuestionnaire published) {
    auto& versions = versions_[published.def.id];
    const auto index = static_cast<std::size_t>(published.def.version - 1);
    if (published.def.version < 1)
        throw Error(ErrorCode::InvalidArgument, "cannot restore an unpublished questionnaire");
    if (versions.size() <= index)
        versions.resize(index + 1);
    versions[index] = std::move(published);
}

OpenedWave open_wave(const PublishedQuestionnaire& published, const RespondentGroup& group,
                     const std::string& wave_id, const std::string& label, std::int64_t timestamp,
                     const std::map<std::string, std::string>& display_names) {
    if (published.def.version < 1)
        throw Error(ErrorCode::NotPublished, "questionnaire " + published.def.id + " is not published");
    if (group.members.empty())
        throw Error(ErrorCode::EmptyGroup, "respondent group " + group.id + " is empty");
    OpenedWave opened;
    opened.wave.id = wave_id;
    opened.wave.questionnaire_id = published.def.id;
    opened.wave.questionnaire_version = published.def.version;
    opened.wave.group_id = group.id;
    opened.wave.roster = group.members;
    opened.wave.timestamp = timestamp;
    opened.wave.label = label;
    for (const auto& tmpl : questionnaire_templates(published))
        opened.instances.push_back(instantiate(tmpl, opened.wave, display_names));
    return opened;
}

} // namespace surveynet
