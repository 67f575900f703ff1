#include <surveynet/json_io.hpp>

#include <surveynet/error.hpp>

namespace surveynet {

namespace {

template <typename T>
void read_optional(const Json& j, const char* key, std::optional<T>& out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null())
        out = it->get<T>();
    else
        out.reset();
}

template <typename T>
void read_or(const Json& j, const char* key, T& out, T fallback) {
    if (auto it = j.find(key); it != j.end() && !it->is_null())
        out = it->get<T>();
    else
        out = std::move(fallback);
}

template <typename T>
std::map<std::string, T> read_id_map(const Json& j, const char* key) {
    std::map<std::string, T> out;
    if (auto it = j.find(key); it != j.end())
        for (const auto& element : *it) {
            T value = element.get<T>();
            std::string id = value.id;
            out.emplace(std::move(id), std::move(value));
        }
    return out;
}

template <typename T>
Json write_id_map(const std::map<std::string, T>& map) {
    Json out = Json::array();
    for (const auto& [id, value] : map)
        out.push_back(value);
    return out;
}

} // namespace

Json rational_to_json(const Rational& value) {
    if (boost::multiprecision::denominator(value) == 1) {
        const auto num = boost::multiprecision::numerator(value);
        if (num <= std::numeric_limits<std::int64_t>::max() && num >= std::numeric_limits<std::int64_t>::min())
            return num.convert_to<std::int64_t>();
    }
    return to_string(value);
}

Rational rational_from_json(const Json& j) {
    if (j.is_number_integer())
        return Rational(j.get<std::int64_t>());
    if (j.is_number())
        return from_double(j.get<double>());
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw Error(ErrorCode::InvalidArgument, e.what());
        }
    }
    throw Error(ErrorCode::InvalidArgument, "expected a number, got " + j.dump());
}

void to_json(Json& j, const AnswerOption& v) {
    j = Json{{"label", v.label}, {"value", rational_to_json(v.value)}};
}
void from_json(const Json& j, AnswerOption& v) {
    v.label = j.at("label").get<std::string>();
    v.value = rational_from_json(j.at("value"));
}

void to_json(Json& j, const Question& v) {
    j = Json{{"id", v.id},         {"prompt", v.prompt},       {"kind", to_string(v.kind)},
             {"options", v.options}, {"anonymize", v.anonymize}, {"required", v.required}};
}
void from_json(const Json& j, Question& v) {
    v.id = j.at("id").get<std::string>();
    read_or(j, "prompt", v.prompt, std::string{});
    v.kind = question_kind_from_string(j.value("kind", std::string("single-choice")));
    read_or(j, "options", v.options, std::vector<AnswerOption>{});
    read_or(j, "anonymize", v.anonymize, false);
    read_or(j, "required", v.required, true);
}

void to_json(Json& j, const Band& v) {
    j = Json{{"lower", rational_to_json(v.lower)},
             {"upper", rational_to_json(v.upper)},
             {"label", v.label},
             {"guidance", v.guidance}};
}
void from_json(const Json& j, Band& v) {
    v.lower = rational_from_json(j.at("lower"));
    v.upper = rational_from_json(j.at("upper"));
    v.label = j.at("label").get<std::string>();
    read_or(j, "guidance", v.guidance, std::string{});
}

void to_json(Json& j, const BandTable& v) {
    j = Json{{"bands", v.bands}, {"step", rational_to_json(v.step)}};
}
void from_json(const Json& j, BandTable& v) {
    v.bands = j.at("bands").get<std::vector<Band>>();
    v.step = j.contains("step") ? rational_from_json(j.at("step")) : Rational(1);
}

void to_json(Json& j, const QuestionGroup& v) {
    j = Json{{"id", v.id}, {"members", v.members}, {"formula", v.formula}};
    j["bands"] = v.bands ? Json(*v.bands) : Json(nullptr);
}
void from_json(const Json& j, QuestionGroup& v) {
    v.id = j.at("id").get<std::string>();
    v.members = j.at("members").get<std::vector<std::string>>();
    v.formula = j.at("formula").get<std::string>();
    read_optional(j, "bands", v.bands);
}

void to_json(Json& j, const ElementRef& v) {
    j = Json{{"kind", to_string(v.kind)}, {"id", v.id}};
}
void from_json(const Json& j, ElementRef& v) {
    v.kind = element_kind_from_string(j.at("kind").get<std::string>());
    v.id = j.at("id").get<std::string>();
}

void to_json(Json& j, const QuestionnaireDef& v) {
    j = Json{{"id", v.id},
             {"title", v.title},
             {"description", v.description},
             {"elements", v.elements},
             {"version", v.version}};
}
void from_json(const Json& j, QuestionnaireDef& v) {
    v.id = j.at("id").get<std::string>();
    read_or(j, "title", v.title, std::string{});
    read_or(j, "description", v.description, std::string{});
    read_or(j, "elements", v.elements, std::vector<ElementRef>{});
    read_or(j, "version", v.version, std::int64_t{0});
}

void to_json(Json& j, const Respondent& v) {
    j = Json{{"id", v.id}, {"display_name", v.display_name}, {"attributes", v.attributes}};
}
void from_json(const Json& j, Respondent& v) {
    v.id = j.at("id").get<std::string>();
    read_or(j, "display_name", v.display_name, std::string{});
    read_or(j, "attributes", v.attributes, std::map<std::string, std::string>{});
}

void to_json(Json& j, const RespondentGroup& v) {
    j = Json{{"id", v.id}, {"name", v.name}, {"members", v.members}};
}
void from_json(const Json& j, RespondentGroup& v) {
    v.id = j.at("id").get<std::string>();
    read_or(j, "name", v.name, std::string{});
    v.members = j.at("members").get<std::vector<std::string>>();
}

void to_json(Json& j, const Wave& v) {
    j = Json{{"id", v.id},
             {"questionnaire_id", v.questionnaire_id},
             {"questionnaire_version", v.questionnaire_version},
             {"group_id", v.group_id},
             {"roster", v.roster},
             {"timestamp", v.timestamp},
             {"label", v.label},
             {"closed", v.closed}};
}
void from_json(const Json& j, Wave& v) {
    v.id = j.at("id").get<std::string>();
    v.questionnaire_id = j.at("questionnaire_id").get<std::string>();
    v.questionnaire_version = j.at("questionnaire_version").get<std::int64_t>();
    read_or(j, "group_id", v.group_id, std::string{});
    v.roster = j.at("roster").get<std::vector<std::string>>();
    read_or(j, "timestamp", v.timestamp, std::int64_t{0});
    read_or(j, "label", v.label, std::string{});
    read_or(j, "closed", v.closed, false);
}

void to_json(Json& j, const Answer& v) {
    if (const auto* selected = v.selected())
        j = Json{{"selected", *selected}};
    else if (const auto* number = v.number())
        j = Json{{"number", rational_to_json(*number)}};
    else
        j = Json{{"text", *v.free_text()}};
}
void from_json(const Json& j, Answer& v) {
    if (j.contains("selected"))
        v = Answer::choice(j.at("selected").get<std::vector<std::size_t>>());
    else if (j.contains("number"))
        v = Answer::numeric(rational_from_json(j.at("number")));
    else if (j.contains("text"))
        v = Answer::text(j.at("text").get<std::string>());
    else
        throw Error(ErrorCode::InvalidArgument, "answer needs one of selected, number, text");
}

void to_json(Json& j, const ResponseSet& v) {
    j = Json{{"wave_id", v.wave_id},
             {"respondent_id", v.respondent_id},
             {"answers", v.answers},
             {"status", to_string(v.status)}};
}
void from_json(const Json& j, ResponseSet& v) {
    read_or(j, "wave_id", v.wave_id, std::string{});
    read_or(j, "respondent_id", v.respondent_id, std::string{});
    read_or(j, "answers", v.answers, std::map<std::string, Answer>{});
    v.status = completion_status_from_string(j.value("status", std::string("submitted")));
}

void to_json(Json& j, const InstrumentScale& v) {
    j = Json{{"name", v.name}, {"formula", v.formula}};
    j["bands"] = v.bands ? Json(*v.bands) : Json(nullptr);
}
void from_json(const Json& j, InstrumentScale& v) {
    v.name = j.at("name").get<std::string>();
    v.formula = j.at("formula").get<std::string>();
    read_optional(j, "bands", v.bands);
}

void to_json(Json& j, const Instrument& v) {
    j = Json{{"id", v.id}, {"name", v.name}, {"citation", v.citation}, {"items", v.items}, {"scales", v.scales}};
}
void from_json(const Json& j, Instrument& v) {
    v.id = j.at("id").get<std::string>();
    read_or(j, "name", v.name, std::string{});
    read_or(j, "citation", v.citation, std::string{});
    v.items = j.at("items").get<std::vector<Question>>();
    read_or(j, "scales", v.scales, std::vector<InstrumentScale>{});
}

void to_json(Json& j, const Entity& v) {
    j = Json{{"id", v.id}, {"label", v.label}};
}
void from_json(const Json& j, Entity& v) {
    v.id = j.at("id").get<std::string>();
    read_or(j, "label", v.label, std::string{});
}

void to_json(Json& j, const RelationalTemplate& v) {
    j = Json{{"id", v.id},
             {"prompt", v.prompt},
             {"relation", v.relation},
             {"tie_scale", v.tie_scale},
             {"mode", to_string(v.mode)},
             {"entities", v.entities}};
}
void from_json(const Json& j, RelationalTemplate& v) {
    v.id = j.at("id").get<std::string>();
    read_or(j, "prompt", v.prompt, std::string{});
    v.relation = j.at("relation").get<std::string>();
    read_or(j, "tie_scale", v.tie_scale, default_tie_scale());
    v.mode = network_mode_from_string(j.value("mode", std::string("one-mode")));
    read_or(j, "entities", v.entities, std::vector<Entity>{});
}

void to_json(Json& j, const AlterItem& v) {
    j = Json{{"alter_id", v.alter_id}, {"instance_id", v.instance_id}};
}
void from_json(const Json& j, AlterItem& v) {
    v.alter_id = j.at("alter_id").get<std::string>();
    v.instance_id = j.at("instance_id").get<std::string>();
}

void to_json(Json& j, const RelationalInstance& v) {
    j = Json{{"template_id", v.template_id},
             {"wave_id", v.wave_id},
             {"roster", v.roster},
             {"items", v.items},
             {"display_names", v.display_names}};
}
void from_json(const Json& j, RelationalInstance& v) {
    v.template_id = j.at("template_id").get<std::string>();
    v.wave_id = j.at("wave_id").get<std::string>();
    v.roster = j.at("roster").get<std::vector<std::string>>();
    v.items = j.at("items").get<std::map<std::string, std::vector<AlterItem>>>();
    read_or(j, "display_names", v.display_names, std::map<std::string, std::string>{});
}

void to_json(Json& j, const Edge& v) {
    j = Json{{"source", v.source}, {"target", v.target}, {"weight", rational_to_json(v.weight)}};
}
void from_json(const Json& j, Edge& v) {
    v.source = j.at("source").get<std::string>();
    v.target = j.at("target").get<std::string>();
    v.weight = rational_from_json(j.at("weight"));
}

void to_json(Json& j, const EdgeList& v) {
    j = Json{{"relation", v.relation}, {"wave_id", v.wave_id}, {"edges", v.edges}};
}
void from_json(const Json& j, EdgeList& v) {
    v.relation = j.at("relation").get<std::string>();
    read_or(j, "wave_id", v.wave_id, std::string{});
    v.edges = j.at("edges").get<std::vector<Edge>>();
}

void to_json(Json& j, const Catalog& v) {
    j = Json{{"instruments", write_id_map(v.instruments)},
             {"questions", write_id_map(v.questions)},
             {"groups", write_id_map(v.groups)},
             {"templates", write_id_map(v.templates)}};
}
void from_json(const Json& j, Catalog& v) {
    v.instruments = read_id_map<Instrument>(j, "instruments");
    v.questions = read_id_map<Question>(j, "questions");
    v.groups = read_id_map<QuestionGroup>(j, "groups");
    v.templates = read_id_map<RelationalTemplate>(j, "templates");
}

void to_json(Json& j, const PublishedQuestionnaire& v) {
    j = Json{{"questionnaire", v.def}, {"elements", v.elements}};
}
void from_json(const Json& j, PublishedQuestionnaire& v) {
    v.def = j.at("questionnaire").get<QuestionnaireDef>();
    v.elements = j.at("elements").get<Catalog>();
}

void to_json(Json& j, const Finding& v) {
    j = Json{{"element", v.element}, {"rule", v.rule}, {"message", v.message}};
}
void from_json(const Json& j, Finding& v) {
    v.element = j.at("element").get<std::string>();
    v.rule = j.at("rule").get<std::string>();
    v.message = j.at("message").get<std::string>();
}

void to_json(Json& j, const ScoreEntry& v) {
    j = Json{{"scale", v.scale}, {"score", rational_to_json(v.score)}};
    j["band"] = v.band ? Json(*v.band) : Json(nullptr);
    j["guidance"] = v.guidance ? Json(*v.guidance) : Json(nullptr);
}
void from_json(const Json& j, ScoreEntry& v) {
    v.scale = j.at("scale").get<std::string>();
    v.score = rational_from_json(j.at("score"));
    read_optional(j, "band", v.band);
    read_optional(j, "guidance", v.guidance);
}

void to_json(Json& j, const ScoreReport& v) {
    j = Json{{"wave_id", v.wave_id},
             {"respondent_id", v.respondent_id},
             {"entries", v.entries},
             {"questionnaire_id", v.questionnaire_id},
             {"questionnaire_version", v.questionnaire_version}};
}
void from_json(const Json& j, ScoreReport& v) {
    v.wave_id = j.at("wave_id").get<std::string>();
    v.respondent_id = j.at("respondent_id").get<std::string>();
    v.entries = j.at("entries").get<std::vector<ScoreEntry>>();
    read_or(j, "questionnaire_id", v.questionnaire_id, std::string{});
    read_or(j, "questionnaire_version", v.questionnaire_version, std::int64_t{0});
}

void to_json(Json& j, const CentralityVector& v) {
    j = Json{{"measure", v.measure}, {"values", v.values}, {"normalization", v.normalization}};
}
void from_json(const Json& j, CentralityVector& v) {
    v.measure = j.at("measure").get<std::string>();
    v.values = j.at("values").get<std::vector<double>>();
    read_or(j, "normalization", v.normalization, std::string{});
}

void to_json(Json& j, const Partition& v) {
    j = Json{{"community", v.community}, {"modularity", v.modularity}};
}
void from_json(const Json& j, Partition& v) {
    v.community = j.at("community").get<std::vector<std::size_t>>();
    v.modularity = j.at("modularity").get<double>();
}

void to_json(Json& j, const AnalysisResult& v) {
    j = Json{{"relation", v.relation},     {"wave_id", v.wave_id},       {"nodes", v.nodes},
             {"popularity", v.popularity}, {"mediation", v.mediation},   {"influence", v.influence},
             {"partition", v.partition}};
}
void from_json(const Json& j, AnalysisResult& v) {
    v.relation = j.at("relation").get<std::string>();
    v.wave_id = j.at("wave_id").get<std::string>();
    v.nodes = j.at("nodes").get<std::vector<std::string>>();
    v.popularity = j.at("popularity").get<CentralityVector>();
    v.mediation = j.at("mediation").get<CentralityVector>();
    v.influence = j.at("influence").get<CentralityVector>();
    v.partition = j.at("partition").get<Partition>();
}

void to_json(Json& j, const ChurnReport& v) {
    auto pairs = [](const std::vector<std::pair<std::string, std::string>>& edges) {
        Json out = Json::array();
        for (const auto& [s, t] : edges)
            out.push_back(Json{{"source", s}, {"target", t}});
        return out;
    };
    j = Json{{"jaccard", rational_to_json(v.jaccard)},
             {"jaccard_decimal", to_double(v.jaccard)},
             {"added", pairs(v.added)},
             {"removed", pairs(v.removed)}};
}

DefinitionDocument parse_definition_document(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("definition document is not valid JSON: ") + e.what());
    }
    try {
        DefinitionDocument doc;
        doc.questionnaire = j.at("questionnaire").get<QuestionnaireDef>();
        if (j.contains("elements"))
            doc.elements = j.at("elements").get<Catalog>();
        return doc;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed definition document: ") + e.what());
    }
}

std::string write_definition_document(const DefinitionDocument& doc) {
    return Json{{"questionnaire", doc.questionnaire}, {"elements", doc.elements}}.dump(2);
}

} // namespace surveynet
