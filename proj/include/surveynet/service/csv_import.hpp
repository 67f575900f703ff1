#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <surveynet/catalog.hpp>
#include <surveynet/json_io.hpp>

namespace surveynet::service {

/// Binds spreadsheet columns to a published questionnaire.
///
/// Columns named like an item instance id ("AUDIT.Q3", a custom question id) or a relational item
/// ("<template>[<alter>]") bind automatically; `columns` renames others. Unbound columns are skipped.
struct ImportMapping {
    std::string questionnaire_id;
    std::int64_t version = 0; // 0 = latest
    std::string group_id;
    std::string group_name;
    std::string wave_id; // empty = generated
    std::string wave_label;
    std::int64_t timestamp = 0;
    std::string id_column = "id";
    std::string name_column;                       // optional display name
    std::map<std::string, std::string> attributes; // attribute name -> column
    std::map<std::string, std::string> columns;    // column header -> item instance id
    bool strict = true;
};

void from_json(const Json& j, ImportMapping& m);
void to_json(Json& j, const ImportMapping& m);

struct RowError {
    std::size_t line = 0; // 1-based line in the file, header is line 1
    std::string message;

    bool operator==(const RowError&) const = default;
};

/// Parsed file, ready to be stored. Responses carry no wave id yet.
struct ImportPlan {
    std::vector<Respondent> respondents;           // file order
    std::map<std::string, ResponseSet> responses;  // by respondent id
    std::vector<std::string> skipped_columns;
    std::size_t cells_skipped = 0;
    std::vector<RowError> row_errors;
    std::vector<std::string> incomplete; // respondents missing required answers (stored as partial)
    std::map<std::string, std::size_t> lines; // respondent id -> file line
};

/// Converts every row. Rows with errors are left out of the plan and listed in `row_errors`.
ImportPlan plan_import(const PublishedQuestionnaire& published, const std::string& csv_text,
                       const ImportMapping& mapping);

/// Value written in a cell for `answer`; inverse of the cell parser used by plan_import.
std::string cell_text(const Question& question, const Answer& answer);

struct ImportSummary {
    std::string wave_id;
    std::size_t rows_imported = 0;
    std::size_t respondents_created = 0;
    std::size_t cells_skipped = 0;
    std::vector<std::string> skipped_columns;
    std::vector<RowError> row_errors;
    std::vector<std::string> incomplete;
    std::size_t scored = 0;
};

void to_json(Json& j, const RowError& e);
void to_json(Json& j, const ImportSummary& s);

/// Thrown in strict mode when any row fails.
class ImportRejected : public Error {
public:
    explicit ImportRejected(std::vector<RowError> errors);
    const std::vector<RowError>& errors() const noexcept { return errors_; }

private:
    std::vector<RowError> errors_;
};

} // namespace surveynet::service
