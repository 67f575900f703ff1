#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <surveynet/error.hpp>
#include <surveynet/instruments.hpp>
#include <surveynet/model.hpp>
#include <surveynet/relational.hpp>
#include <surveynet/validation.hpp>

namespace surveynet {

/// Everything a questionnaire can reference by id.
struct Catalog {
    std::map<std::string, Instrument> instruments;
    std::map<std::string, Question> questions;
    std::map<std::string, QuestionGroup> groups;
    std::map<std::string, RelationalTemplate> templates;

    static Catalog with_builtins();

    bool operator==(const Catalog&) const = default;
};

/// Empty iff the definition and every element it references satisfy their invariants.
std::vector<Finding> validate_questionnaire(const QuestionnaireDef& def, const Catalog& catalog);

/// A frozen questionnaire version together with copies of the elements it referenced at publish time.
struct PublishedQuestionnaire {
    QuestionnaireDef def;
    Catalog elements;

    bool operator==(const PublishedQuestionnaire&) const = default;
};

/// One askable (non-relational) item of a questionnaire.
struct ItemInstance {
    std::string instance_id; // "<instrument>.<item>" for instrument items, the question id otherwise
    Question question;
    std::string source; // instrument or group id; empty for a standalone question
};

std::vector<ItemInstance> questionnaire_items(const PublishedQuestionnaire& published);

/// Templates referenced by the questionnaire, in element order.
std::vector<RelationalTemplate> questionnaire_templates(const PublishedQuestionnaire& published);

class PublishRejected : public Error {
public:
    explicit PublishRejected(std::vector<Finding> findings);

    const std::vector<Finding>& findings() const noexcept { return findings_; }

private:
    std::vector<Finding> findings_;
};

/// Published versions per questionnaire id. Versions are never modified once stored.
class QuestionnaireRegistry {
public:
    /// Validates, snapshots and freezes `def` as the next version (1 for the first publish).
    std::int64_t publish(QuestionnaireDef def, const Catalog& catalog);

    const PublishedQuestionnaire* find(const std::string& id, std::int64_t version) const;
    std::int64_t latest_version(const std::string& id) const; // 0 when never published

    void restore(PublishedQuestionnaire published);

private:
    std::map<std::string, std::vector<PublishedQuestionnaire>> versions_;
};

struct OpenedWave {
    Wave wave;
    std::vector<RelationalInstance> instances;
};

/// Snapshots the group's membership as the wave roster and instantiates every relational template.
OpenedWave open_wave(const PublishedQuestionnaire& published, const RespondentGroup& group,
                     const std::string& wave_id, const std::string& label, std::int64_t timestamp,
                     const std::map<std::string, std::string>& display_names = {});

} // namespace surveynet
