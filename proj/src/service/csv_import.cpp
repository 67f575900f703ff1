#include <surveynet/service/csv_import.hpp>

#include <algorithm>
#include <set>

#include <surveynet/csv.hpp>
#include <surveynet/error.hpp>

namespace surveynet::service {

namespace {

using surveynet::to_string;

struct Column {
    enum class Kind { Id, Name, Attribute, Item, Relational, Skip } kind = Kind::Skip;
    std::string key; // attribute name or item instance id
    const Question* question = nullptr;
    const RelationalTemplate* tmpl = nullptr;
    std::string alter;
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::size_t option_index(const std::vector<AnswerOption>& options, const std::string& cell) {
    try {
        const Rational v = parse_rational(cell);
        for (std::size_t i = 0; i < options.size(); ++i)
            if (options[i].value == v)
                return i;
    } catch (const std::invalid_argument&) {
    }
    for (std::size_t i = 0; i < options.size(); ++i)
        if (options[i].label == cell)
            return i;
    throw Error(ErrorCode::InvalidArgument, "'" + cell + "' matches no option");
}

Answer parse_cell(const Question& q, const std::string& cell) {
    switch (q.kind) {
    case QuestionKind::SingleChoice:
        return Answer::choice(option_index(q.options, cell));
    case QuestionKind::MultiChoice: {
        std::vector<std::size_t> selected;
        std::size_t start = 0;
        for (;;) {
            const auto end = cell.find(';', start);
            const std::string part = trim(cell.substr(start, end == std::string::npos ? std::string::npos : end - start));
            if (!part.empty())
                selected.push_back(option_index(q.options, part));
            if (end == std::string::npos)
                break;
            start = end + 1;
        }
        return Answer::choice(std::move(selected));
    }
    case QuestionKind::Numeric:
        try {
            return Answer::numeric(parse_rational(cell));
        } catch (const std::invalid_argument&) {
            throw Error(ErrorCode::InvalidArgument, "'" + cell + "' is not a number");
        }
    case QuestionKind::FreeText:
        return Answer::text(cell);
    case QuestionKind::RelationalTemplate:
        break;
    }
    throw Error(ErrorCode::InvalidArgument, "question " + q.id + " cannot be imported");
}

} // namespace

void from_json(const Json& j, ImportMapping& m) {
    m.questionnaire_id = j.at("questionnaire").get<std::string>();
    m.version = j.value("version", std::int64_t{0});
    m.group_id = j.at("group").get<std::string>();
    m.group_name = j.value("group_name", m.group_id);
    m.wave_id = j.value("wave", std::string());
    m.wave_label = j.value("label", std::string());
    m.timestamp = j.value("timestamp", std::int64_t{0});
    m.id_column = j.value("id_column", std::string("id"));
    m.name_column = j.value("name_column", std::string());
    m.attributes = j.value("attributes", std::map<std::string, std::string>{});
    m.columns = j.value("columns", std::map<std::string, std::string>{});
    m.strict = j.value("strict", true);
}

void to_json(Json& j, const ImportMapping& m) {
    j = Json{{"questionnaire", m.questionnaire_id}, {"version", m.version},     {"group", m.group_id},
             {"group_name", m.group_name},         {"wave", m.wave_id},         {"label", m.wave_label},
             {"timestamp", m.timestamp},           {"id_column", m.id_column}, {"name_column", m.name_column},
             {"attributes", m.attributes},         {"columns", m.columns},     {"strict", m.strict}};
}

void to_json(Json& j, const RowError& e) { j = Json{{"line", e.line}, {"message", e.message}}; }

void to_json(Json& j, const ImportSummary& s) {
    j = Json{{"wave", s.wave_id},
             {"rows_imported", s.rows_imported},
             {"respondents_created", s.respondents_created},
             {"cells_skipped", s.cells_skipped},
             {"skipped_columns", s.skipped_columns},
             {"row_errors", s.row_errors},
             {"incomplete", s.incomplete},
             {"scored", s.scored}};
}

ImportRejected::ImportRejected(std::vector<RowError> errors)
    : Error(ErrorCode::ImportRejected,
            errors.empty() ? std::string("import rejected")
                           : "import rejected: line " + std::to_string(errors.front().line) + ": " +
                                 errors.front().message),
      errors_(std::move(errors)) {}

std::string cell_text(const Question& question, const Answer& answer) {
    if (const auto* selected = answer.selected()) {
        std::string out;
        for (std::size_t i = 0; i < selected->size(); ++i)
            out += (i ? ";" : "") + to_string(question.options.at((*selected)[i]).value);
        return out;
    }
    if (const auto* number = answer.number())
        return to_string(*number);
    return *answer.free_text();
}

ImportPlan plan_import(const PublishedQuestionnaire& published, const std::string& csv_text,
                       const ImportMapping& mapping) {
    const auto rows = csv::parse(csv_text);
    if (rows.empty())
        throw Error(ErrorCode::InvalidArgument, "the file has no header row");
    const auto& header = rows.front();

    std::map<std::string, const ItemInstance*> items;
    const auto item_list = questionnaire_items(published);
    for (const auto& item : item_list)
        items[item.instance_id] = &item;
    std::map<std::string, const RelationalTemplate*> templates;
    for (const auto& [id, t] : published.elements.templates)
        templates[id] = &t;

    // Roster = ids in the file, needed before relational columns can be resolved.
    std::size_t id_index = header.size();
    for (std::size_t c = 0; c < header.size(); ++c)
        if (trim(header[c]) == mapping.id_column)
            id_index = c;
    if (id_index == header.size())
        throw Error(ErrorCode::InvalidArgument, "id column '" + mapping.id_column + "' not found");
    std::set<std::string> roster;
    for (std::size_t r = 1; r < rows.size(); ++r)
        if (id_index < rows[r].size() && !trim(rows[r][id_index]).empty())
            roster.insert(trim(rows[r][id_index]));

    std::map<std::string, std::string> attribute_of; // column -> attribute
    for (const auto& [attr, column] : mapping.attributes)
        attribute_of[column] = attr;

    ImportPlan plan;
    std::vector<Column> columns(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = trim(header[c]);
        Column& col = columns[c];
        if (c == id_index) {
            col.kind = Column::Kind::Id;
            continue;
        }
        if (!mapping.name_column.empty() && name == mapping.name_column) {
            col.kind = Column::Kind::Name;
            continue;
        }
        if (auto a = attribute_of.find(name); a != attribute_of.end()) {
            col.kind = Column::Kind::Attribute;
            col.key = a->second;
            continue;
        }
        std::string target = name;
        if (auto m = mapping.columns.find(name); m != mapping.columns.end())
            target = m->second;
        if (auto it = items.find(target); it != items.end()) {
            col.kind = Column::Kind::Item;
            col.key = target;
            col.question = &it->second->question;
            continue;
        }
        if (auto rel = parse_relational_item_id(target)) {
            auto t = templates.find(rel->first);
            if (t != templates.end()) {
                const bool known = t->second->mode == NetworkMode::OneMode
                                       ? roster.count(rel->second) > 0
                                       : std::any_of(t->second->entities.begin(), t->second->entities.end(),
                                                     [&](const Entity& e) { return e.id == rel->second; });
                if (known) {
                    col.kind = Column::Kind::Relational;
                    col.key = target;
                    col.tmpl = t->second;
                    col.alter = rel->second;
                    continue;
                }
                plan.skipped_columns.push_back(name + " (unknown alter)");
                continue;
            }
        }
        plan.skipped_columns.push_back(name);
    }

    std::set<std::string> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::size_t line = r + 1;
        const std::string id = id_index < row.size() ? trim(row[id_index]) : std::string();
        if (id.empty()) {
            plan.row_errors.push_back({line, "missing respondent id"});
            continue;
        }
        if (!seen.insert(id).second) {
            plan.row_errors.push_back({line, "duplicate respondent id " + id});
            continue;
        }
        if (row.size() > header.size()) {
            plan.row_errors.push_back({line, "more cells than header columns"});
            continue;
        }
        Respondent respondent{id, id, {}};
        ResponseSet response{"", id, {}, CompletionStatus::Submitted};
        std::string error;
        std::size_t skipped = 0;
        for (std::size_t c = 0; c < row.size() && error.empty(); ++c) {
            const Column& col = columns[c];
            const std::string cell = col.kind == Column::Kind::Item && col.question->kind == QuestionKind::FreeText
                                         ? row[c]
                                         : trim(row[c]);
            if (cell.empty())
                continue;
            switch (col.kind) {
            case Column::Kind::Id:
                break;
            case Column::Kind::Name:
                respondent.display_name = cell;
                break;
            case Column::Kind::Attribute:
                respondent.attributes[col.key] = cell;
                break;
            case Column::Kind::Skip:
                ++skipped;
                break;
            case Column::Kind::Item:
                try {
                    response.answers[col.key] = parse_cell(*col.question, cell);
                } catch (const Error& e) {
                    error = header[c] + ": " + e.what();
                }
                break;
            case Column::Kind::Relational:
                if (col.tmpl->mode == NetworkMode::OneMode && col.alter == id) {
                    ++skipped;
                    break;
                }
                try {
                    response.answers[col.key] = Answer::choice(option_index(col.tmpl->tie_scale, cell));
                } catch (const Error& e) {
                    error = header[c] + ": " + e.what();
                }
                break;
            }
        }
        if (!error.empty()) {
            plan.row_errors.push_back({line, error});
            continue;
        }
        plan.cells_skipped += skipped;
        for (const auto& item : item_list)
            if (item.question.required && !response.answers.count(item.instance_id)) {
                response.status = CompletionStatus::Partial;
                plan.incomplete.push_back(id);
                break;
            }
        plan.lines[id] = line;
        plan.respondents.push_back(std::move(respondent));
        plan.responses[id] = std::move(response);
    }
    // Nominations of people whose own row was rejected point outside the roster.
    for (auto& [id, response] : plan.responses)
        std::erase_if(response.answers, [&](const auto& entry) {
            const auto rel = parse_relational_item_id(entry.first);
            if (!rel || !templates.count(rel->first) || templates.at(rel->first)->mode != NetworkMode::OneMode ||
                plan.responses.count(rel->second))
                return false;
            ++plan.cells_skipped;
            return true;
        });
    return plan;
}

} // namespace surveynet::service
