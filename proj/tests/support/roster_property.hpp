#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <surveynet/relational.hpp>

namespace roster_property {

using namespace surveynet;

inline RelationalTemplate friendship() {
    return RelationalTemplate{"F", "How close are you to {alter}?", "friendship", default_tie_scale(),
                              NetworkMode::OneMode, {}};
}

/// Runs `steps` random edits over a roster that starts with `size` people, each of whom answered
/// every alter item. Returns an empty string on success or a description of the first violation.
inline std::string run(std::mt19937_64& rng, std::size_t size, int steps) {
    const RelationalTemplate tmpl = friendship();
    Wave wave{"w1", "q", 1, "g", {}, 0, "T1", false};
    for (std::size_t i = 0; i < size; ++i)
        wave.roster.push_back("P" + std::to_string(i));
    RelationalInstance instance = instantiate(tmpl, wave);
    std::map<std::string, ResponseSet> responses;
    auto answer_all = [&](const std::string& person) {
        ResponseSet r{"w1", person, {}, CompletionStatus::Submitted};
        for (const auto& item : instance.items.at(person))
            r.answers[item.instance_id] =
                Answer::choice(std::uniform_int_distribution<std::size_t>(0, tmpl.tie_scale.size() - 1)(rng));
        responses[person] = r;
    };
    for (const auto& p : wave.roster)
        answer_all(p);

    int next_id = static_cast<int>(size);
    for (int step = 0; step < steps; ++step) {
        const auto before = responses;
        const auto roster_before = instance.roster;
        const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
        RosterEdit edit;
        std::string touched;
        if (kind == 0 || instance.roster.size() <= 2) {
            touched = "P" + std::to_string(next_id++);
            edit = RosterEdit::add(touched, "Person " + touched);
        } else {
            touched = instance.roster[std::uniform_int_distribution<std::size_t>(0, instance.roster.size() - 1)(rng)];
            edit = kind == 1 ? RosterEdit::remove(touched) : RosterEdit::rename(touched, "Renamed " + touched);
        }
        auto result = apply_roster_edit(tmpl, instance, responses, edit, false);
        instance = std::move(result.instance);
        responses = std::move(result.responses);

        const std::set<std::string> roster(instance.roster.begin(), instance.roster.end());
        if (roster.size() != instance.roster.size())
            return "duplicate roster entry after step " + std::to_string(step);
        if (instance.items.size() != roster.size())
            return "item map out of step with roster at step " + std::to_string(step);
        for (const auto& person : instance.roster) {
            std::set<std::string> alters;
            for (const auto& item : instance.items.at(person)) {
                alters.insert(item.alter_id);
                if (item.instance_id != relational_item_id(tmpl.id, item.alter_id))
                    return "bad instance id " + item.instance_id;
            }
            std::set<std::string> expected = roster;
            expected.erase(person);
            if (alters != expected)
                return "alter set of " + person + " differs from roster minus self at step " + std::to_string(step);
        }
        for (const auto& [person, old] : before) {
            auto now = responses.find(person);
            if (now == responses.end()) {
                if (edit.kind == RosterEdit::Kind::Remove && person == touched)
                    continue;
                return "response of " + person + " vanished at step " + std::to_string(step);
            }
            for (const auto& [item, answer] : old.answers) {
                const auto parsed = parse_relational_item_id(item);
                const bool about_removed = edit.kind == RosterEdit::Kind::Remove && parsed && parsed->second == touched;
                auto kept = now->second.answers.find(item);
                if (about_removed) {
                    if (kept != now->second.answers.end())
                        return "answer about removed " + touched + " survived";
                } else if (kept == now->second.answers.end() || !(kept->second == answer)) {
                    return "answer " + item + " of " + person + " changed at step " + std::to_string(step);
                }
            }
            if (now->second.answers.size() > old.answers.size())
                return "answers appeared for " + person;
        }
        if (edit.kind == RosterEdit::Kind::Rename && instance.display_names.at(touched) != edit.display_name)
            return "rename not applied";
        if (edit.kind == RosterEdit::Kind::Add && std::find(roster_before.begin(), roster_before.end(), touched) == roster_before.end())
            answer_all(touched);
    }
    return {};
}

} // namespace roster_property
