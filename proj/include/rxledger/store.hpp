#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

struct sqlite3;
struct sqlite3_stmt;

namespace rxledger {

class Database;

/// Prepared statement bound to one Database. Parameter indices are 1-based,
/// column indices 0-based, as in SQLite.
class Statement {
public:
    Statement(Database& db, std::string_view sql);
    ~Statement();
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;
    Statement(Statement&& other) noexcept;
    Statement& operator=(Statement&&) = delete;

    Statement& bind(int index, std::int64_t value);
    Statement& bind(int index, int value) { return bind(index, static_cast<std::int64_t>(value)); }
    Statement& bind(int index, bool value) { return bind(index, static_cast<std::int64_t>(value)); }
    Statement& bind(int index, double value);
    Statement& bind(int index, std::string_view value);
    Statement& bind(int index, const std::string& value) { return bind(index, std::string_view(value)); }
    Statement& bind(int index, const char* value) { return bind(index, std::string_view(value)); }
    Statement& bind(int index, std::span<const std::uint8_t> blob);
    Statement& bind_null(int index);

    template <class T>
    Statement& bind(int index, const std::optional<T>& value) {
        if (value) return bind(index, *value);
        return bind_null(index);
    }

    /// Advances; true while a row is available.
    bool step();
    /// Runs a statement that returns no rows.
    void run();
    void reset();

    bool is_null(int col) const;
    std::int64_t column_int64(int col) const;
    double column_double(int col) const;
    std::string column_text(int col) const;
    std::vector<std::uint8_t> column_blob(int col) const;
    std::optional<std::int64_t> column_opt_int64(int col) const;
    std::optional<std::string> column_opt_text(int col) const;
    int column_count() const;
    std::string column_name(int col) const;
    int column_type(int col) const;

private:
    Database* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

/// Single-connection embedded store. All access is serialized through
/// `transact`. Nested transact calls on the same thread run as savepoints
/// inside the outer transaction, so cross-module operations commit together
/// and a failing inner step rolls back only its own writes.
class Database {
public:
    /// Opens (creating if needed) the database file; ":memory:" is accepted.
    explicit Database(const std::string& path);
    ~Database();
    Database(const Database&) = delete;
    Database& operator=(const Database&) = delete;

    template <class F>
    auto transact(F&& body) -> decltype(body()) {
        std::lock_guard lock(mutex_);
        begin();
        try {
            if constexpr (std::is_void_v<decltype(body())>) {
                body();
                commit();
            } else {
                auto result = body();
                commit();
                return result;
            }
        } catch (...) {
            rollback();
            throw;
        }
    }

    void exec(std::string_view sql);
    Statement prepare(std::string_view sql) { return Statement(*this, sql); }
    std::int64_t last_insert_rowid() const;
    int changes() const;

    sqlite3* handle() const noexcept { return db_; }
    const std::string& path() const noexcept { return path_; }

    /// Every table's rows, ordered by rowid, columns by name; blobs as hex.
    /// Used for deep before/after comparisons.
    nlohmann::json dump();

    [[noreturn]] void throw_last_error(std::string_view context) const;

private:
    // Outermost level is BEGIN/COMMIT; inner levels are savepoints.
    void begin();
    void commit();
    void rollback() noexcept;

    void exec_noexcept(const char* sql) noexcept;
    void create_schema();

    std::string path_;
    sqlite3* db_ = nullptr;
    std::recursive_mutex mutex_;
    int depth_ = 0;
};

/// Path of the database file inside a data directory (created if missing).
std::string database_path(const std::filesystem::path& data_dir);

}  // namespace rxledger
