#pragma once

#include <map>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include <surveynet/catalog.hpp>
#include <surveynet/json_io.hpp>
#include <surveynet/report.hpp>
#include <surveynet/scoring.hpp>
#include <surveynet/sna.hpp>
#include <surveynet/service/pseudonym.hpp>

namespace surveynet::service {

/// Everything known about one wave at one moment.
struct WaveSnapshot {
    Wave wave;
    PublishedQuestionnaire published;
    std::vector<RelationalInstance> instances;
    std::map<std::string, ResponseSet> responses; // by respondent id
    std::map<std::string, ScoreReport> scores;    // submitted responses only
    std::map<std::string, Respondent> respondents;
};

struct NetworkView {
    RelationalTemplate tmpl;
    EdgeList edges;
    Sociomatrix matrix;
    AnalysisResult analysis;
};

/// Relations available in the wave, in questionnaire order.
std::vector<std::string> wave_relations(const WaveSnapshot& snapshot);

/// Empty `relation` picks the first one. NotFound for an unknown relation, NoData when the
/// questionnaire has no relational template.
NetworkView analyse_network(const WaveSnapshot& snapshot, const std::string& relation, std::stop_token stop = {});

enum class Artifact { ScoresCsv, EdgesCsv, GraphNodeLink, Gexf, Reports, ResponsesCsv };

std::string_view to_string(Artifact artifact);
/// UnknownFormat for anything else.
Artifact artifact_from_string(std::string_view text);

/// Respondent ids become "R-" tokens and anonymize-flagged answers become "A-" tokens.
/// Output depends only on the snapshot and the pseudonym map, so repeated runs are identical.
std::string export_artifact(const WaveSnapshot& snapshot, Artifact artifact, PseudonymMap& pseudonyms,
                            const std::string& relation = {}, std::stop_token stop = {});

/// Node-link document of one relation with pseudonymised ids and labels.
nlohmann::json network_document(const WaveSnapshot& snapshot, const NetworkView& view, PseudonymMap& pseudonyms);

/// Individual report with pseudonymised names.
IndividualReport pseudonymous_report(const WaveSnapshot& snapshot, const NetworkView& view,
                                     const std::string& respondent_id, PseudonymMap& pseudonyms);

/// Group report for the wave, or nullopt with fewer than two scored respondents.
std::optional<GroupReport> wave_group_report(const WaveSnapshot& snapshot, const NetworkView& view);

} // namespace surveynet::service
