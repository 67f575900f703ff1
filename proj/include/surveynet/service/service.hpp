#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include <surveynet/catalog.hpp>
#include <surveynet/json_io.hpp>
#include <surveynet/report.hpp>
#include <surveynet/scoring.hpp>
#include <surveynet/service/auth.hpp>
#include <surveynet/service/csv_import.hpp>
#include <surveynet/service/exports.hpp>
#include <surveynet/service/pseudonym.hpp>
#include <surveynet/service/storage.hpp>

namespace surveynet::service {

/// A denied authorization, carrying the rule that decided.
class AccessDenied : public Error {
public:
    AccessDenied(std::string rule, const std::string& what);
    const std::string& rule() const noexcept { return rule_; }

private:
    std::string rule_;
};

/// Submission without some required answers.
class MissingRequired : public Error {
public:
    explicit MissingRequired(std::vector<std::string> items);
    const std::vector<std::string>& items() const noexcept { return items_; }

private:
    std::vector<std::string> items_;
};

struct ServiceOptions {
    std::string database = ":memory:"; // SQLite file
    std::string study_key;             // pseudonym key; required
    bool allow_resubmission = true;    // open-wave overwrite of a submitted response
};

struct QuestionnaireInfo {
    DefinitionDocument draft;
    std::string owner;
    std::int64_t latest_version = 0;
};

struct WaveTab {
    Wave wave;
    std::size_t submitted = 0;
    std::optional<Rational> mean_audit;
};

struct SubmitResult {
    ResponseSet response;
    std::optional<ScoreReport> scores; // absent for partial saves
    bool overwritten = false;
};

/// The whole platform behind one object. Every call takes the acting account, checks it
/// against the authorization matrix and writes through to the store in one transaction.
class SurveyService {
public:
    explicit SurveyService(ServiceOptions options);
    ~SurveyService();

    // accounts and sessions
    /// Creates the first super-admin when no account exists yet; otherwise InvalidArgument.
    UserAccount bootstrap_admin(const std::string& login, const std::string& password);
    bool has_accounts() const;
    UserAccount create_user(const UserAccount& caller, const std::string& login, const std::string& password,
                            Role role, const std::string& respondent_id = {});
    /// Returns a session token; Unauthenticated on bad credentials.
    std::string login(const std::string& login, const std::string& password);
    /// Unauthenticated for unknown tokens.
    UserAccount session(const std::string& token) const;

    // instruments
    std::vector<Instrument> instruments(const UserAccount& caller) const;
    std::string register_instrument(const UserAccount& caller, Instrument instrument);

    // questionnaires
    /// Creates or replaces the draft. The first writer owns it.
    QuestionnaireInfo save_questionnaire(const UserAccount& caller, const DefinitionDocument& doc);
    QuestionnaireInfo questionnaire(const UserAccount& caller, const std::string& id) const;
    std::vector<QuestionnaireInfo> questionnaires(const UserAccount& caller) const;
    std::int64_t publish(const UserAccount& caller, const std::string& id);
    PublishedQuestionnaire published(const UserAccount& caller, const std::string& id, std::int64_t version) const;

    // respondents and groups
    RespondentGroup save_group(const UserAccount& caller, const RespondentGroup& group,
                               const std::vector<Respondent>& respondents);

    // waves
    Wave open_wave(const UserAccount& caller, const std::string& questionnaire_id, const std::string& group_id,
                   const std::string& label, std::int64_t timestamp, std::int64_t version = 0,
                   const std::string& wave_id = {});
    Wave close_wave(const UserAccount& caller, const std::string& wave_id);
    Wave edit_roster(const UserAccount& caller, const std::string& wave_id, const RosterEdit& edit);
    /// Published form and the caller's alter items, for filling in.
    Json wave_form(const UserAccount& caller, const std::string& wave_id, const std::string& respondent_id) const;
    std::vector<WaveTab> wave_tabs(const UserAccount& caller, const std::string& questionnaire_id,
                                   const std::string& group_id = {}) const;

    // responses and scores
    SubmitResult submit_response(const UserAccount& caller, const std::string& wave_id,
                                 const std::string& respondent_id, const std::map<std::string, Answer>& answers,
                                 CompletionStatus status);
    /// Raw answers; super-admin reads are written to the audit log.
    std::vector<ResponseSet> responses(const UserAccount& caller, const std::string& wave_id,
                                       const std::string& respondent_id = {});
    std::vector<ScoreReport> scores(const UserAccount& caller, const std::string& wave_id,
                                    const std::string& respondent_id = {}) const;

    // analysis, reports, exports (pseudonymised)
    Json network(const UserAccount& caller, const std::string& wave_id, const std::string& relation,
                 std::stop_token stop = {});
    std::string respondent_report(const UserAccount& caller, const std::string& respondent_id,
                                  const std::string& wave_id, const std::string& format,
                                  const std::string& relation = {}, std::stop_token stop = {});
    std::string group_report(const UserAccount& caller, const std::string& wave_id, const std::string& format,
                             const std::string& relation = {}, std::stop_token stop = {});
    Json churn(const UserAccount& caller, const std::string& before_wave, const std::string& after_wave,
               const std::string& relation = {});
    std::string export_wave(const UserAccount& caller, const std::string& wave_id, const std::string& format,
                            const std::string& relation = {}, std::stop_token stop = {});

    ImportSummary import_csv(const UserAccount& caller, const std::string& csv_text, const ImportMapping& mapping);

    // super-admin views
    std::map<std::string, std::string> pseudonym_map(const UserAccount& caller);
    std::vector<AuditEntry> audit_log(const UserAccount& caller) const;

    /// Recomputes a pseudonym the way the service does, for verification.
    std::string respondent_token(const std::string& respondent_id);

private:
    struct State;

    void require(const UserAccount& caller, Action action, Relation relation, const std::string& target) const;
    Relation questionnaire_relation(const UserAccount& caller, const std::string& questionnaire_id) const;
    Relation wave_relation(const UserAccount& caller, const std::string& wave_id,
                           const std::string& respondent_id) const;
    WaveSnapshot snapshot(const std::string& wave_id) const;
    void persist_pseudonyms();

    ServiceOptions options_;
    std::unique_ptr<Store> store_;
    std::unique_ptr<State> state_;
    mutable std::recursive_mutex mutex_;
};

} // namespace surveynet::service
