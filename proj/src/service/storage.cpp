#include <surveynet/service/storage.hpp>

#include <sqlite3.h>

#include <chrono>

#include <surveynet/error.hpp>

namespace surveynet::service {

namespace {

class Statement {
public:
    Statement(sqlite3* db, const char* sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK)
            throw Error(ErrorCode::Storage, std::string("prepare failed: ") + sqlite3_errmsg(db));
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    Statement& bind(int index, const std::string& text) {
        sqlite3_bind_text(stmt_, index, text.data(), static_cast<int>(text.size()), SQLITE_TRANSIENT);
        return *this;
    }
    Statement& bind(int index, std::int64_t value) {
        sqlite3_bind_int64(stmt_, index, value);
        return *this;
    }

    /// True while a row is available.
    bool step() {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW)
            return true;
        if (rc == SQLITE_DONE)
            return false;
        throw Error(ErrorCode::Storage, std::string("step failed: ") + sqlite3_errmsg(db_));
    }

    std::string text(int column) const {
        const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, column));
        return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, column))) : std::string();
    }
    std::int64_t integer(int column) const { return sqlite3_column_int64(stmt_, column); }

private:
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

} // namespace

Store::Store(const std::string& path) {
    if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
        std::string message = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        db_ = nullptr;
        throw Error(ErrorCode::Storage, "cannot open " + path + ": " + message);
    }
    sqlite3_busy_timeout(db_, 5000);
    exec("PRAGMA journal_mode=WAL");
    exec("PRAGMA synchronous=NORMAL");
    exec("CREATE TABLE IF NOT EXISTS documents (kind TEXT NOT NULL, id TEXT NOT NULL, body TEXT NOT NULL, "
         "PRIMARY KEY (kind, id))");
    exec("CREATE TABLE IF NOT EXISTS audit (seq INTEGER PRIMARY KEY AUTOINCREMENT, ts INTEGER NOT NULL, "
         "actor TEXT NOT NULL, action TEXT NOT NULL, target TEXT NOT NULL, detail TEXT NOT NULL)");
}

Store::~Store() { sqlite3_close(db_); }

void Store::exec(const char* sql) {
    char* message = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &message) != SQLITE_OK) {
        std::string text = message ? message : "unknown error";
        sqlite3_free(message);
        throw Error(ErrorCode::Storage, text);
    }
}

void Store::put(const std::string& kind, const std::string& id, const std::string& body) {
    Statement s(db_, "INSERT INTO documents (kind, id, body) VALUES (?1, ?2, ?3) "
                     "ON CONFLICT (kind, id) DO UPDATE SET body = excluded.body");
    s.bind(1, kind).bind(2, id).bind(3, body).step();
}

std::optional<std::string> Store::get(const std::string& kind, const std::string& id) const {
    Statement s(db_, "SELECT body FROM documents WHERE kind = ?1 AND id = ?2");
    s.bind(1, kind).bind(2, id);
    if (!s.step())
        return std::nullopt;
    return s.text(0);
}

void Store::remove(const std::string& kind, const std::string& id) {
    Statement s(db_, "DELETE FROM documents WHERE kind = ?1 AND id = ?2");
    s.bind(1, kind).bind(2, id).step();
}

std::vector<std::pair<std::string, std::string>> Store::list(const std::string& kind) const {
    Statement s(db_, "SELECT id, body FROM documents WHERE kind = ?1 ORDER BY id");
    s.bind(1, kind);
    std::vector<std::pair<std::string, std::string>> out;
    while (s.step())
        out.emplace_back(s.text(0), s.text(1));
    return out;
}

void Store::audit(const std::string& actor, const std::string& action, const std::string& target,
                  const std::string& detail) {
    const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    Statement s(db_, "INSERT INTO audit (ts, actor, action, target, detail) VALUES (?1, ?2, ?3, ?4, ?5)");
    s.bind(1, static_cast<std::int64_t>(now)).bind(2, actor).bind(3, action).bind(4, target).bind(5, detail).step();
}

std::vector<AuditEntry> Store::audit_log() const {
    Statement s(db_, "SELECT seq, ts, actor, action, target, detail FROM audit ORDER BY seq");
    std::vector<AuditEntry> out;
    while (s.step())
        out.push_back({s.integer(0), s.integer(1), s.text(2), s.text(3), s.text(4), s.text(5)});
    return out;
}

void Store::begin() { exec("BEGIN IMMEDIATE"); }
void Store::commit() { exec("COMMIT"); }
void Store::rollback() noexcept {
    char* message = nullptr;
    sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, &message);
    sqlite3_free(message);
}

} // namespace surveynet::service
