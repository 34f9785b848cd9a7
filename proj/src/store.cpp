#include "rxledger/store.hpp"

#include "rxledger/error.hpp"

#include <sqlite3.h>

namespace rxledger {

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS users (
    user_id         TEXT PRIMARY KEY,
    password_digest BLOB NOT NULL,
    salt            BLOB NOT NULL,
    kdf_iterations  INTEGER NOT NULL,
    fullname        TEXT NOT NULL,
    user_type       TEXT NOT NULL,
    phone_no        TEXT NOT NULL,
    fingerprint     BLOB NOT NULL,
    prescriber_no   TEXT UNIQUE,
    pharm_id        INTEGER,
    active          INTEGER NOT NULL DEFAULT 1
);
CREATE TABLE IF NOT EXISTS DrugList (
    drug_id               INTEGER PRIMARY KEY AUTOINCREMENT,
    name                  TEXT NOT NULL,
    name_key              TEXT NOT NULL UNIQUE,
    legal_class           TEXT NOT NULL,
    manufacturer          TEXT NOT NULL,
    pharmacological_class TEXT NOT NULL,
    general_description   TEXT NOT NULL,
    indications           TEXT NOT NULL,
    adult_usage           TEXT NOT NULL,
    children_usage        TEXT NOT NULL,
    contraindications     TEXT NOT NULL,
    precautions           TEXT NOT NULL,
    interactions          TEXT NOT NULL,
    adverse_reactions     TEXT NOT NULL,
    how_supplied          TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS Pharmacist (
    pharm_id INTEGER PRIMARY KEY AUTOINCREMENT,
    name     TEXT NOT NULL,
    name_key TEXT NOT NULL UNIQUE,
    address  TEXT NOT NULL,
    phone    TEXT NOT NULL,
    email    TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS patient (
    pat_id       INTEGER PRIMARY KEY AUTOINCREMENT,
    use_id       TEXT NOT NULL,
    fullname     TEXT NOT NULL,
    fullname_key TEXT NOT NULL,
    phone        TEXT NOT NULL,
    dob          TEXT NOT NULL,
    address      TEXT NOT NULL,
    drug_allergy TEXT NOT NULL,
    occupation   TEXT NOT NULL,
    pharmacist   INTEGER,
    fingerprint  BLOB
);
CREATE INDEX IF NOT EXISTS patient_by_name ON patient(fullname_key);
CREATE TABLE IF NOT EXISTS consultation (
    note_id     INTEGER PRIMARY KEY AUTOINCREMENT,
    pat_id      INTEGER NOT NULL,
    author      TEXT NOT NULL,
    nature      TEXT NOT NULL,
    description TEXT NOT NULL,
    recorded_at INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS consultation_by_patient ON consultation(pat_id);
CREATE TABLE IF NOT EXISTS prescription (
    rx_id           INTEGER PRIMARY KEY AUTOINCREMENT,
    pat_id          INTEGER NOT NULL,
    note_id         INTEGER NOT NULL,
    prescriber_user TEXT NOT NULL,
    prescriber_no   TEXT NOT NULL,
    pharm_id        INTEGER,
    state           TEXT NOT NULL,
    alerts          TEXT NOT NULL,
    reject_reason   TEXT NOT NULL,
    created_at      INTEGER NOT NULL,
    transmitted_at  INTEGER,
    dispensed_at    INTEGER
);
CREATE INDEX IF NOT EXISTS prescription_by_patient ON prescription(pat_id);
CREATE INDEX IF NOT EXISTS prescription_by_pharmacy ON prescription(pharm_id, state);
CREATE TABLE IF NOT EXISTS Medication (
    med_id     INTEGER PRIMARY KEY AUTOINCREMENT,
    rx_id      INTEGER NOT NULL,
    pat_id     INTEGER NOT NULL,
    drug_id    INTEGER NOT NULL,
    pat_name   TEXT NOT NULL,
    med_name   TEXT NOT NULL,
    num        INTEGER,
    refill     INTEGER NOT NULL,
    substitute INTEGER NOT NULL,
    dosage     TEXT NOT NULL,
    freq       TEXT NOT NULL,
    route      TEXT NOT NULL,
    sig        TEXT NOT NULL,
    note       TEXT NOT NULL,
    start_d    TEXT,
    refill_d   TEXT,
    renew_d    TEXT,
    pharmacist INTEGER,
    date       TEXT
);
CREATE INDEX IF NOT EXISTS medication_by_rx ON Medication(rx_id);
CREATE TABLE IF NOT EXISTS case_memory (
    case_id         INTEGER PRIMARY KEY AUTOINCREMENT,
    diagnosis_terms TEXT NOT NULL,
    age_band        INTEGER NOT NULL,
    allergy_set     TEXT NOT NULL,
    drug_id         INTEGER NOT NULL,
    dosage          TEXT NOT NULL,
    freq            TEXT NOT NULL,
    route           TEXT NOT NULL,
    num             INTEGER NOT NULL,
    refill          INTEGER NOT NULL,
    substitute      INTEGER NOT NULL,
    sig             TEXT NOT NULL,
    created_at      INTEGER NOT NULL,
    source_med_id   INTEGER UNIQUE
);
CREATE TABLE IF NOT EXISTS audit_log (
    entry_id       INTEGER PRIMARY KEY AUTOINCREMENT,
    at             INTEGER NOT NULL,
    user_id        TEXT NOT NULL,
    success        INTEGER NOT NULL,
    failed_factors TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS meta (
    key   TEXT PRIMARY KEY,
    value INTEGER NOT NULL
);
INSERT OR IGNORE INTO meta(key, value) VALUES ('drug_registry_version', 0);
)sql";

std::string to_hex(const void* data, int size) {
    static constexpr char kDigits[] = "0123456789abcdef";
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::string out;
    out.reserve(static_cast<std::size_t>(size) * 2);
    for (int i = 0; i < size; ++i) {
        out.push_back(kDigits[bytes[i] >> 4]);
        out.push_back(kDigits[bytes[i] & 0xF]);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Statement

Statement::Statement(Database& db, std::string_view sql) : db_(&db) {
    if (sqlite3_prepare_v2(db.handle(), sql.data(), static_cast<int>(sql.size()), &stmt_,
                           nullptr) != SQLITE_OK) {
        db.throw_last_error("prepare");
    }
}

Statement::~Statement() { sqlite3_finalize(stmt_); }

Statement::Statement(Statement&& other) noexcept : db_(other.db_), stmt_(other.stmt_) {
    other.stmt_ = nullptr;
}

Statement& Statement::bind(int index, std::int64_t value) {
    if (sqlite3_bind_int64(stmt_, index, value) != SQLITE_OK) db_->throw_last_error("bind");
    return *this;
}

Statement& Statement::bind(int index, double value) {
    if (sqlite3_bind_double(stmt_, index, value) != SQLITE_OK) db_->throw_last_error("bind");
    return *this;
}

Statement& Statement::bind(int index, std::string_view value) {
    if (sqlite3_bind_text(stmt_, index, value.data(), static_cast<int>(value.size()),
                          SQLITE_TRANSIENT) != SQLITE_OK) {
        db_->throw_last_error("bind");
    }
    return *this;
}

Statement& Statement::bind(int index, std::span<const std::uint8_t> blob) {
    if (sqlite3_bind_blob(stmt_, index, blob.data(), static_cast<int>(blob.size()),
                          SQLITE_TRANSIENT) != SQLITE_OK) {
        db_->throw_last_error("bind");
    }
    return *this;
}

Statement& Statement::bind_null(int index) {
    if (sqlite3_bind_null(stmt_, index) != SQLITE_OK) db_->throw_last_error("bind");
    return *this;
}

bool Statement::step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    db_->throw_last_error("step");
}

void Statement::run() {
    while (step()) {
    }
}

void Statement::reset() {
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
}

bool Statement::is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }

std::int64_t Statement::column_int64(int col) const { return sqlite3_column_int64(stmt_, col); }

double Statement::column_double(int col) const { return sqlite3_column_double(stmt_, col); }

std::string Statement::column_text(int col) const {
    const auto* text = sqlite3_column_text(stmt_, col);
    const int size = sqlite3_column_bytes(stmt_, col);
    return text ? std::string(reinterpret_cast<const char*>(text), static_cast<std::size_t>(size))
                : std::string{};
}

std::vector<std::uint8_t> Statement::column_blob(int col) const {
    const auto* data = static_cast<const std::uint8_t*>(sqlite3_column_blob(stmt_, col));
    const int size = sqlite3_column_bytes(stmt_, col);
    return data ? std::vector<std::uint8_t>(data, data + size) : std::vector<std::uint8_t>{};
}

std::optional<std::int64_t> Statement::column_opt_int64(int col) const {
    if (is_null(col)) return std::nullopt;
    return column_int64(col);
}

std::optional<std::string> Statement::column_opt_text(int col) const {
    if (is_null(col)) return std::nullopt;
    return column_text(col);
}

int Statement::column_count() const { return sqlite3_column_count(stmt_); }

std::string Statement::column_name(int col) const { return sqlite3_column_name(stmt_, col); }

int Statement::column_type(int col) const { return sqlite3_column_type(stmt_, col); }

// ---------------------------------------------------------------------------
// Database

Database::Database(const std::string& path) : path_(path) {
    if (sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE,
                        nullptr) != SQLITE_OK) {
        std::string message = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        db_ = nullptr;
        throw Error(ErrorCode::StorageError, "cannot open " + path + ": " + message);
    }
    sqlite3_busy_timeout(db_, 5000);
    try {
        if (path != ":memory:") {
            exec("PRAGMA journal_mode=WAL");
            exec("PRAGMA synchronous=NORMAL");
        }
        create_schema();
    } catch (...) {
        sqlite3_close(db_);
        throw;
    }
}

Database::~Database() { sqlite3_close(db_); }

void Database::exec(std::string_view sql) {
    std::string owned(sql);
    char* message = nullptr;
    if (sqlite3_exec(db_, owned.c_str(), nullptr, nullptr, &message) != SQLITE_OK) {
        std::string text = message ? message : "unknown";
        sqlite3_free(message);
        throw Error(ErrorCode::StorageError, "sql: " + text);
    }
}

void Database::exec_noexcept(const char* sql) noexcept {
    sqlite3_exec(db_, sql, nullptr, nullptr, nullptr);
}

void Database::begin() {
    if (depth_ == 0) {
        exec("BEGIN IMMEDIATE");
    } else {
        exec("SAVEPOINT sp" + std::to_string(depth_));
    }
    ++depth_;
}

void Database::commit() {
    --depth_;
    try {
        if (depth_ == 0) {
            exec("COMMIT");
        } else {
            exec("RELEASE sp" + std::to_string(depth_));
        }
    } catch (...) {
        ++depth_;
        throw;
    }
}

void Database::rollback() noexcept {
    --depth_;
    if (depth_ == 0) {
        exec_noexcept("ROLLBACK");
    } else {
        const std::string name = "sp" + std::to_string(depth_);
        exec_noexcept(("ROLLBACK TO " + name).c_str());
        exec_noexcept(("RELEASE " + name).c_str());
    }
}

std::int64_t Database::last_insert_rowid() const { return sqlite3_last_insert_rowid(db_); }

int Database::changes() const { return sqlite3_changes(db_); }

void Database::throw_last_error(std::string_view context) const {
    throw Error(ErrorCode::StorageError,
                std::string(context) + ": " + sqlite3_errmsg(db_));
}

void Database::create_schema() { exec(kSchema); }

nlohmann::json Database::dump() {
    return transact([&] {
        nlohmann::json out = nlohmann::json::object();
        std::vector<std::string> tables;
        {
            auto list = prepare(
                "SELECT name FROM sqlite_master WHERE type='table' AND name NOT LIKE 'sqlite_%' "
                "ORDER BY name");
            while (list.step()) tables.push_back(list.column_text(0));
        }
        for (const auto& table : tables) {
            auto rows = nlohmann::json::array();
            auto stmt = prepare("SELECT * FROM \"" + table + "\" ORDER BY rowid");
            while (stmt.step()) {
                nlohmann::json row = nlohmann::json::object();
                for (int c = 0; c < stmt.column_count(); ++c) {
                    switch (stmt.column_type(c)) {
                        case SQLITE_NULL: row[stmt.column_name(c)] = nullptr; break;
                        case SQLITE_INTEGER: row[stmt.column_name(c)] = stmt.column_int64(c); break;
                        case SQLITE_FLOAT: row[stmt.column_name(c)] = stmt.column_double(c); break;
                        case SQLITE_BLOB: {
                            auto blob = stmt.column_blob(c);
                            row[stmt.column_name(c)] =
                                "x'" + to_hex(blob.data(), static_cast<int>(blob.size())) + "'";
                            break;
                        }
                        default: row[stmt.column_name(c)] = stmt.column_text(c); break;
                    }
                }
                rows.push_back(std::move(row));
            }
            out[table] = std::move(rows);
        }
        return out;
    });
}

std::string database_path(const std::filesystem::path& data_dir) {
    std::error_code ec;
    std::filesystem::create_directories(data_dir, ec);
    if (ec) {
        throw Error(ErrorCode::StorageError,
                    "cannot create data directory " + data_dir.string() + ": " + ec.message());
    }
    return (data_dir / "rxledger.db").string();
}

}  // namespace rxledger
