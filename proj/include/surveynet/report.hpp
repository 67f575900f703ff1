#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <surveynet/scoring.hpp>
#include <surveynet/sna.hpp>

namespace surveynet {

/// Named sentence templates with `{placeholder}` slots, one set per locale.
class ReportTemplates {
public:
    /// The shipped English templates.
    static ReportTemplates defaults();

    /// Reads a template document `{ "<locale>": { "<name>": "<template>", ... } }`.
    static ReportTemplates parse(const std::string& document, const std::string& locale = "en");

    const std::string& get(const std::string& name) const;

    /// Fills every `{slot}`. A slot without a value is an UnknownPlaceholder error.
    std::string render(const std::string& name, const std::map<std::string, std::string>& values) const;

private:
    std::map<std::string, std::string> templates_;
};

/// Percentile cut-points for the adjectives; configurable.
struct PercentileBands {
    int very_high = 90;
    int high = 70;
    int moderate = 30;
};

/// 100 * (#other nodes with a strictly lower value) / (n - 1), rounded; 50 for a single node.
int percentile_rank(const std::vector<double>& values, std::size_t index);

/// "level.very_high" | "level.high" | "level.moderate" | "level.low".
std::string level_key(int percentile, const PercentileBands& bands);

struct Highlight {
    std::string measure;
    double value = 0.0;
    int percentile = 0;
    std::string level;

    bool operator==(const Highlight&) const = default;
};

struct IndividualReport {
    std::string respondent_id;
    std::string wave_id;
    std::string display_name;
    std::string relation;
    std::string network_paragraph;
    std::string consumption_paragraph;
    std::optional<std::string> audit_zone;
    std::optional<Rational> audit_score;
    std::optional<std::string> intervention;
    std::vector<Highlight> highlights;
    std::size_t community = 0; // 1-based as printed
    std::size_t community_size = 0;
    std::vector<std::string> mediators;
    std::vector<std::string> influencers;

    bool operator==(const IndividualReport&) const = default;
};

struct ReportContext {
    ReportTemplates templates = ReportTemplates::defaults();
    PercentileBands bands;
    std::size_t top_k = 3;
    /// Display text per node id (pseudonyms in exports). Falls back to the id.
    std::map<std::string, std::string> names;
};

std::string audit_scale_name();

/// Fills the network and consumption templates for `node`. NoData when `scores` is null or
/// belongs to someone else, NotFound when the node is not in the analysis.
IndividualReport individual_report(const ScoreReport* scores, const AnalysisResult& analysis,
                                   const Sociomatrix& matrix, const std::string& node,
                                   const ReportContext& context = {});

struct CommunityRow {
    std::size_t community = 0; // 1-based
    std::size_t size = 0;
    std::optional<Rational> mean_audit;

    bool operator==(const CommunityRow&) const = default;
};

struct CorrelationNote {
    std::string scale;
    std::optional<double> spearman; // nullopt when a side has zero variance or fewer than 2 pairs
    std::size_t pairs = 0;

    bool operator==(const CorrelationNote&) const = default;
};

struct GroupReport {
    std::string wave_id;
    std::string relation;
    std::size_t respondents = 0;
    std::size_t ties = 0;
    double modularity = 0.0;
    std::string summary;
    std::vector<CommunityRow> communities;
    std::vector<CorrelationNote> correlations;

    bool operator==(const GroupReport&) const = default;
};

/// Spearman rank correlation with average ranks for ties.
std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Community table and descriptive rank correlations between AUDIT total and FAS-II total,
/// GSE total and each KIDSCREEN-27 scale present in the reports. Needs >= 2 score reports.
GroupReport group_report(const AnalysisResult& analysis, const std::vector<ScoreReport>& scores,
                         const ReportContext& context = {});

enum class ReportFormat { PlainText, Structured };

/// "text" or "json"; anything else is UnknownFormat.
ReportFormat report_format_from_string(const std::string& name);

std::string render_report(const IndividualReport& report, ReportFormat format);
std::string render_report(const GroupReport& report, ReportFormat format);

IndividualReport parse_individual_report(const std::string& structured);
GroupReport parse_group_report(const std::string& structured);

} // namespace surveynet
