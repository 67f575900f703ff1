#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <surveynet/model.hpp>
#include <surveynet/validation.hpp>

namespace surveynet {

enum class NetworkMode { OneMode, TwoMode };

std::string_view to_string(NetworkMode mode);
NetworkMode network_mode_from_string(std::string_view text);

struct Entity {
    std::string id;
    std::string label;

    bool operator==(const Entity&) const = default;
};

/// A question asked once per alter. One-mode alters are roster peers, two-mode alters are `entities`.
struct RelationalTemplate {
    std::string id;
    std::string prompt; // "{alter}" is replaced by the alter's display text
    std::string relation;
    std::vector<AnswerOption> tie_scale; // weakest first, weights strictly increasing
    NetworkMode mode = NetworkMode::OneMode;
    std::vector<Entity> entities;

    bool operator==(const RelationalTemplate&) const = default;
};

/// no tie = 0, acquaintance = 1, partner = 2, friend = 3.
std::vector<AnswerOption> default_tie_scale();

std::vector<Finding> validate_template(const RelationalTemplate& tmpl);

struct AlterItem {
    std::string alter_id;
    std::string instance_id;

    bool operator==(const AlterItem&) const = default;
};

struct RelationalInstance {
    std::string template_id;
    std::string wave_id;
    std::vector<std::string> roster;
    std::map<std::string, std::vector<AlterItem>> items; // respondent id -> alter items
    std::map<std::string, std::string> display_names;   // alter id -> display text

    bool operator==(const RelationalInstance&) const = default;
};

/// "<template>[<alter>]", the question-instance id and CSV header of one alter item.
std::string relational_item_id(const std::string& template_id, const std::string& alter_id);

/// Inverse of relational_item_id.
std::optional<std::pair<std::string, std::string>> parse_relational_item_id(const std::string& id);

/// Throws NoAlters when a one-mode roster has fewer than two people or a two-mode entity list is empty.
RelationalInstance instantiate(const RelationalTemplate& tmpl, const Wave& wave,
                               const std::map<std::string, std::string>& display_names = {});

std::string render_prompt(const RelationalTemplate& tmpl, const RelationalInstance& instance,
                          const std::string& alter_id);

struct RosterEdit {
    enum class Kind { Add, Remove, Rename };

    Kind kind = Kind::Add;
    std::string respondent_id;
    std::string display_name; // Add and Rename

    static RosterEdit add(std::string id, std::string name = {}) {
        return {Kind::Add, std::move(id), std::move(name)};
    }
    static RosterEdit remove(std::string id) { return {Kind::Remove, std::move(id), {}}; }
    static RosterEdit rename(std::string id, std::string name) {
        return {Kind::Rename, std::move(id), std::move(name)};
    }
};

struct RosterEditResult {
    RelationalInstance instance;
    std::map<std::string, ResponseSet> responses; // keyed by respondent id
    std::vector<ResponseSet> retired;
};

/// Keeps alter items in step with the roster. Removing a person deletes every answer about them
/// and retires their own ResponseSet; answers about untouched alters are kept verbatim.
RosterEditResult apply_roster_edit(const RelationalTemplate& tmpl, RelationalInstance instance,
                                   std::map<std::string, ResponseSet> responses, const RosterEdit& edit,
                                   bool wave_closed);

struct Edge {
    std::string source;
    std::string target;
    Rational weight;

    bool operator==(const Edge&) const = default;
};

struct EdgeList {
    std::string relation;
    std::string wave_id;
    std::vector<Edge> edges;

    bool operator==(const EdgeList&) const = default;
};

/// One directed edge per answered alter item of a submitted response whose tie weight is > 0.
/// Ordered by roster position of the source, then alter order.
EdgeList extract_edges(const RelationalTemplate& tmpl, const RelationalInstance& instance,
                       const std::map<std::string, ResponseSet>& responses);

/// `source,target,weight,relation,wave` with a header row.
std::string edges_to_csv(const EdgeList& edges);

/// Parses edges_to_csv output. All rows must share one relation and wave.
EdgeList edges_from_csv(const std::string& text);

} // namespace surveynet
