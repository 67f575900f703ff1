#pragma once

#include <map>
#include <string>
#include <utility>

namespace surveynet::service {

/// Study-scoped keyed-hash pseudonyms: prefix + 8 hex chars of HMAC-SHA256(key, kind ":" value).
/// A collision with another value re-salts with a counter, so the map stays injective per kind.
class PseudonymMap {
public:
    enum class Kind { Respondent, Field };

    explicit PseudonymMap(std::string study_key);

    /// Token for `value`; assigns and remembers one on first use.
    const std::string& token(Kind kind, const std::string& value);

    /// Existing token only.
    const std::string* find(Kind kind, const std::string& value) const;

    /// Candidate token before collision handling; used to recompute tokens independently.
    static std::string keyed_token(const std::string& key, Kind kind, const std::string& value, unsigned salt = 0);

    /// (kind, value) -> token; readable by super-admins only (enforced by the service).
    const std::map<std::pair<Kind, std::string>, std::string>& entries() const noexcept { return forward_; }

    void restore(Kind kind, const std::string& value, const std::string& token);

    static std::string_view to_string(Kind kind);
    static Kind kind_from_string(std::string_view text);

private:
    std::string key_;
    std::map<std::pair<Kind, std::string>, std::string> forward_;
    std::map<std::pair<Kind, std::string>, std::string> reverse_; // (kind, token) -> value
};

} // namespace surveynet::service
