#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

struct sqlite3;

namespace surveynet::service {

struct AuditEntry {
    std::int64_t sequence = 0;
    std::int64_t timestamp = 0;
    std::string actor;
    std::string action;
    std::string target;
    std::string detail;
};

/// Document store over a single SQLite file: JSON bodies keyed by (kind, id) plus an append-only
/// audit table. ":memory:" gives a private in-memory database.
class Store {
public:
    explicit Store(const std::string& path);
    ~Store();
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    void put(const std::string& kind, const std::string& id, const std::string& body);
    std::optional<std::string> get(const std::string& kind, const std::string& id) const;
    void remove(const std::string& kind, const std::string& id);
    /// (id, body) pairs of one kind, ordered by id.
    std::vector<std::pair<std::string, std::string>> list(const std::string& kind) const;

    void audit(const std::string& actor, const std::string& action, const std::string& target,
               const std::string& detail);
    std::vector<AuditEntry> audit_log() const;

    void begin();
    void commit();
    void rollback() noexcept;

    /// Commits on `commit()`, rolls back when destroyed without it.
    class Transaction {
    public:
        explicit Transaction(Store& store) : store_(store) { store_.begin(); }
        ~Transaction() {
            if (!done_)
                store_.rollback();
        }
        void commit() {
            store_.commit();
            done_ = true;
        }

    private:
        Store& store_;
        bool done_ = false;
    };

private:
    void exec(const char* sql);

    sqlite3* db_ = nullptr;
};

} // namespace surveynet::service
