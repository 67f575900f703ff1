#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <surveynet/role.hpp>

namespace surveynet::service {

struct UserAccount {
    std::string id;
    std::string login;
    std::string credential; // PBKDF2 record, see hash_password
    Role role = Role::Respondent;
    std::string respondent_id; // respondents only
    std::string owner;         // respondents only: the interviewer (or super-admin) who created them

    bool operator==(const UserAccount&) const = default;
};

enum class Action {
    InstrumentRead,
    InstrumentRegister,
    QuestionnaireCreate,
    QuestionnaireRead,
    QuestionnaireUpdate,
    QuestionnairePublish,
    GroupWrite,
    WaveOpen,
    WaveManage, // close, roster edits
    WaveForm,   // the published form of a wave, for filling it in
    ResponseSubmit,
    ResponseRead, // raw answers, including fields flagged as personal data
    ScoresRead,
    AnalysisRead, // network, reports
    Export,       // pseudonymised artifacts
    ImportCsv,
    PseudonymMapRead,
    UserCreate,
    AuditLogRead,
};

std::string_view to_string(Action action);
std::vector<Action> all_actions();

/// How the caller relates to the resource being touched.
enum class Relation {
    None,  // resource-independent actions (catalog, creation)
    Own,   // interviewer: resource belongs to them; respondent: their own ResponseSet / wave they are in
    Other, // someone else's resource
};

std::string_view to_string(Relation relation);

struct Decision {
    bool allowed = false;
    std::string rule;     // id of the rule that decided
    bool audited = false; // allowed, but logged (super-admin reads of raw personal data)

    bool operator==(const Decision&) const = default;
};

Decision authorize(Role role, Action action, Relation relation);

/// PBKDF2-HMAC-SHA256 with a random salt; "pbkdf2-sha256$<iterations>$<salt hex>$<hash hex>".
std::string hash_password(const std::string& password);
bool verify_password(const std::string& password, const std::string& record);

/// 32 random bytes as hex.
std::string random_token();

} // namespace surveynet::service
