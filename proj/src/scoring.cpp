#include <surveynet/scoring.hpp>

namespace surveynet {

namespace {

ScoreEntry score_scale(const std::string& scale, const std::string& source, const BandTable* bands,
                       const AnswerMap& answers) {
    ScoreEntry entry;
    entry.scale = scale;
    try {
        entry.score = evaluate(parse_formula(source), answers);
    } catch (const MissingAnswerError& e) {
        throw ScoringError(ErrorCode::MissingAnswer, scale, e.item(), e.what());
    } catch (const FormulaError& e) {
        throw ScoringError(e.code(), scale, "", e.what());
    } catch (const Error& e) {
        throw ScoringError(e.code(), scale, "", e.what());
    }
    if (bands != nullptr) {
        try {
            const Band& band = band_of(*bands, entry.score);
            entry.band = band.label;
            entry.guidance = band.guidance;
        } catch (const Error& e) {
            throw ScoringError(e.code(), scale, "", e.what());
        }
    }
    return entry;
}

void add_answer(AnswerMap& answers, const std::string& local_id, const Question& question,
                const ResponseSet& response, const std::string& instance_id) {
    auto it = response.answers.find(instance_id);
    if (it == response.answers.end())
        return;
    if (auto value = answer_value(question, it->second))
        answers.emplace(local_id, std::move(*value));
}

} // namespace

const ScoreEntry* ScoreReport::find(const std::string& scale) const {
    for (const auto& entry : entries)
        if (entry.scale == scale)
            return &entry;
    return nullptr;
}

ScoringError::ScoringError(ErrorCode code, std::string scale, std::string item, const std::string& detail)
    : Error(code, "scale " + scale + ": " + detail), scale_(std::move(scale)), item_(std::move(item)) {}

ScoreReport score_response(const PublishedQuestionnaire& published, const ResponseSet& response) {
    if (response.status != CompletionStatus::Submitted)
        throw Error(ErrorCode::NotSubmitted, "response of " + response.respondent_id + " is not submitted");
    ScoreReport report;
    report.wave_id = response.wave_id;
    report.respondent_id = response.respondent_id;
    report.questionnaire_id = published.def.id;
    report.questionnaire_version = published.def.version;
    const auto& elements = published.elements;
    for (const auto& ref : published.def.elements) {
        if (ref.kind == ElementKind::Instrument) {
            const auto& inst = elements.instruments.at(ref.id);
            if (inst.scales.empty())
                continue;
            AnswerMap answers;
            for (const auto& item : inst.items)
                add_answer(answers, item.id, item, response, inst.id + "." + item.id);
            for (const auto& scale : inst.scales)
                report.entries.push_back(score_scale(inst.id + "." + scale.name, scale.formula,
                                                     scale.bands ? &*scale.bands : nullptr, answers));
        } else if (ref.kind == ElementKind::Group) {
            const auto& group = elements.groups.at(ref.id);
            AnswerMap answers;
            for (const auto& member : group.members)
                add_answer(answers, member, elements.questions.at(member), response, member);
            report.entries.push_back(
                score_scale(group.id, group.formula, group.bands ? &*group.bands : nullptr, answers));
        }
    }
    return report;
}

} // namespace surveynet
