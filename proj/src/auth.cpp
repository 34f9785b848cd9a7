#include "rxledger/auth.hpp"

#include "rxledger/crypto.hpp"
#include "rxledger/error.hpp"
#include "rxledger/text.hpp"

#include <algorithm>
#include <mutex>

namespace rxledger {

namespace {

constexpr std::size_t kSaltBytes = 16;
constexpr std::size_t kTokenBytes = 32;
constexpr std::chrono::hours kExpiredGrace{24};

constexpr const char* kUserColumns =
    "user_id, password_digest, salt, kdf_iterations, fullname, user_type, phone_no, "
    "fingerprint, prescriber_no, pharm_id, active";

UserRecord read_user(const Statement& row) {
    UserRecord u;
    u.user_id = row.column_text(0);
    u.password_digest = row.column_blob(1);
    u.salt = row.column_blob(2);
    u.kdf_iterations = static_cast<int>(row.column_int64(3));
    u.fullname = row.column_text(4);
    u.user_type = parse_user_type(row.column_text(5));
    u.phone_no = row.column_text(6);
    u.fingerprint_template = normalize_template(row.column_blob(7));
    u.prescriber_no = row.column_opt_text(8);
    if (auto pharm = row.column_opt_int64(9)) u.pharm_id = PharmacyId{*pharm};
    u.active = row.column_int64(10) != 0;
    return u;
}

}  // namespace

std::string_view to_string(UserType type) noexcept {
    switch (type) {
        case UserType::Administrator: return "Administrator";
        case UserType::Physician: return "Physician";
        case UserType::Pharmacist: return "Pharmacist";
    }
    return "Physician";
}

UserType parse_user_type(std::string_view text) {
    const auto lower = to_lower(text);
    if (lower == "administrator") return UserType::Administrator;
    if (lower == "physician") return UserType::Physician;
    if (lower == "pharmacist") return UserType::Pharmacist;
    throw Error(ErrorCode::InvalidArgument, "unknown user_type: " + std::string(text));
}

bool is_valid_prescriber_no(std::string_view text) noexcept {
    if (text.size() != 9 || text.substr(0, 3) != "MD-") return false;
    return std::all_of(text.begin() + 3, text.end(), [](char c) { return c >= '0' && c <= '9'; });
}

AuthService::AuthService(Database& db, std::shared_ptr<const Clock> clock, AuthPolicy policy)
    : db_(db), clock_(std::move(clock)), policy_(policy) {
    if (policy_.kdf_iterations < 1) {
        throw Error(ErrorCode::InvalidArgument, "kdf_iterations must be >= 1");
    }
    if (!(policy_.fingerprint_threshold >= 0.0 && policy_.fingerprint_threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "fingerprint threshold must lie in [0,1]");
    }
    if (policy_.session_ttl.count() <= 0) {
        throw Error(ErrorCode::InvalidArgument, "session ttl must be positive");
    }
}

bool AuthService::has_admin() {
    return db_.transact([&] {
        auto stmt = db_.prepare("SELECT 1 FROM users WHERE user_type = 'Administrator' LIMIT 1");
        return stmt.step();
    });
}

UserRecord AuthService::bootstrap_admin(const EnrollRequest& request) {
    if (request.user_type != UserType::Administrator) {
        throw Error(ErrorCode::InvalidArgument, "bootstrap user must be an Administrator");
    }
    return db_.transact([&] {
        if (has_admin()) {
            throw Error(ErrorCode::InvalidState, "an Administrator already exists");
        }
        return enroll_locked(request);
    });
}

UserRecord AuthService::enroll_user(const Session& admin_session, const EnrollRequest& request) {
    require_role(admin_session, UserType::Administrator);
    return db_.transact([&] { return enroll_locked(request); });
}

UserRecord AuthService::enroll_locked(const EnrollRequest& request) {
    if (trim(request.user_id).empty() || trim(request.user_id) != request.user_id) {
        throw Error(ErrorCode::InvalidArgument, "user_id must be non-empty without surrounding spaces");
    }
    if (trim(request.fullname).empty()) {
        throw Error(ErrorCode::InvalidArgument, "fullname must be non-empty");
    }
    if (request.password.empty()) {
        throw Error(ErrorCode::InvalidArgument, "password must be non-empty");
    }
    if (request.fingerprint.bytes.empty()) {
        throw Error(ErrorCode::EmptyScan, "fingerprint scan is empty");
    }
    if (prescribes(request.user_type)) {
        if (!request.prescriber_no) {
            throw Error(ErrorCode::MissingPrescriberNo, "prescribing users need a prescriber_no");
        }
        if (!is_valid_prescriber_no(*request.prescriber_no)) {
            throw Error(ErrorCode::InvalidArgument,
                        "prescriber_no must be MD- followed by six digits");
        }
        if (request.pharm_id) {
            throw Error(ErrorCode::InvalidArgument, "only pharmacists are bound to a pharmacy");
        }
    } else {
        if (request.prescriber_no) {
            throw Error(ErrorCode::UnexpectedPrescriberNo,
                        "pharmacists cannot hold a prescriber_no");
        }
        if (!request.pharm_id) {
            throw Error(ErrorCode::InvalidArgument, "pharmacists must be bound to a pharmacy");
        }
        auto pharmacy = db_.prepare("SELECT 1 FROM Pharmacist WHERE pharm_id = ?");
        pharmacy.bind(1, request.pharm_id->value);
        if (!pharmacy.step()) {
            throw Error(ErrorCode::UnregisteredPharmacy, "pharmacy is not registered");
        }
    }
    if (find_user(request.user_id)) {
        throw Error(ErrorCode::DuplicateUser, "user_id already enrolled: " + request.user_id);
    }
    if (request.prescriber_no && find_by_prescriber_no(*request.prescriber_no)) {
        throw Error(ErrorCode::DuplicatePrescriberNo,
                    "prescriber_no already registered: " + *request.prescriber_no);
    }

    UserRecord user;
    user.user_id = request.user_id;
    user.salt = crypto::random_bytes(kSaltBytes);
    user.kdf_iterations = policy_.kdf_iterations;
    user.password_digest =
        crypto::derive_password_digest(request.password, user.salt, user.kdf_iterations);
    user.fullname = request.fullname;
    user.user_type = request.user_type;
    user.phone_no = request.phone_no;
    user.fingerprint_template = normalize_template(request.fingerprint.bytes);
    user.prescriber_no = request.prescriber_no;
    user.pharm_id = request.pharm_id;

    auto insert = db_.prepare(
        "INSERT INTO users(user_id, password_digest, salt, kdf_iterations, fullname, user_type, "
        "phone_no, fingerprint, prescriber_no, pharm_id, active) "
        "VALUES(?,?,?,?,?,?,?,?,?,?,1)");
    insert.bind(1, user.user_id)
        .bind(2, std::span<const std::uint8_t>(user.password_digest))
        .bind(3, std::span<const std::uint8_t>(user.salt))
        .bind(4, user.kdf_iterations)
        .bind(5, user.fullname)
        .bind(6, to_string(user.user_type))
        .bind(7, user.phone_no)
        .bind(8, std::span<const std::uint8_t>(user.fingerprint_template))
        .bind(9, user.prescriber_no);
    if (user.pharm_id) {
        insert.bind(10, user.pharm_id->value);
    } else {
        insert.bind_null(10);
    }
    insert.run();
    return user;
}

Session AuthService::authenticate(std::string_view user_id, std::string_view password,
                                  const FingerprintScan& fingerprint) {
    const auto user = find_user(user_id);

    // Unknown users still pay for a derivation so timing does not reveal
    // which ids exist.
    static const std::vector<std::uint8_t> kDummySalt(kSaltBytes, 0);
    const auto digest = crypto::derive_password_digest(
        password, user ? std::span<const std::uint8_t>(user->salt) : kDummySalt,
        user ? user->kdf_iterations : policy_.kdf_iterations);

    std::vector<std::string_view> failed;
    if (!user) failed.push_back("user_id");
    if (!user || !crypto::equal_digests(digest, user->password_digest)) {
        failed.push_back("password");
    }
    bool fingerprint_ok = false;
    if (!fingerprint.bytes.empty() && user) {
        fingerprint_ok = match_fingerprint(user->fingerprint_template, fingerprint) >=
                         policy_.fingerprint_threshold;
    }
    if (!fingerprint_ok) failed.push_back("fingerprint");
    if (user && !user->active) failed.push_back("inactive");

    std::string failed_factors;
    for (auto f : failed) {
        if (!failed_factors.empty()) failed_factors += ',';
        failed_factors += f;
    }

    const auto now = clock_->now();
    db_.transact([&] {
        auto audit = db_.prepare(
            "INSERT INTO audit_log(at, user_id, success, failed_factors) VALUES(?,?,?,?)");
        audit.bind(1, to_millis(now))
            .bind(2, user_id)
            .bind(3, failed.empty())
            .bind(4, failed_factors);
        audit.run();
    });

    if (!failed.empty()) {
        throw Error(ErrorCode::AuthFailed, "authentication failed");
    }

    Session session;
    session.token = crypto::random_token(kTokenBytes);
    session.user_id = user->user_id;
    session.role = user->user_type;
    session.issued_at = now;
    session.expires_at = now + std::chrono::duration_cast<std::chrono::milliseconds>(policy_.session_ttl);
    session.pharm_id = user->pharm_id;

    std::unique_lock lock(sessions_mutex_);
    // Expired sessions stay long enough to be reported as expired, then go.
    std::erase_if(sessions_, [&](const auto& kv) { return now >= kv.second.expires_at + kExpiredGrace; });
    sessions_.emplace(session.token, session);
    return session;
}

Session AuthService::check_live(const Session& session) {
    Session stored;
    {
        std::shared_lock lock(sessions_mutex_);
        auto it = sessions_.find(session.token);
        if (it == sessions_.end() || it->second.user_id != session.user_id ||
            it->second.role != session.role) {
            throw Error(ErrorCode::AuthFailed, "invalid session");
        }
        stored = it->second;
    }
    if (clock_->now() >= stored.expires_at) {
        throw Error(ErrorCode::SessionExpired, "session expired");
    }
    const auto user = find_user(stored.user_id);
    if (!user || !user->active) {
        throw Error(ErrorCode::AuthFailed, "invalid session");
    }
    return stored;
}

void AuthService::require_session(const Session& session) { check_live(session); }

void AuthService::require_role(const Session& session, UserType role) {
    const auto live = check_live(session);
    const bool allowed =
        live.role == role || (role == UserType::Physician && live.role == UserType::Administrator);
    if (!allowed) {
        throw Error(ErrorCode::Forbidden,
                    "requires " + std::string(to_string(role)) + " privileges");
    }
}

Session AuthService::resolve(std::string_view token) {
    Session probe;
    {
        std::shared_lock lock(sessions_mutex_);
        auto it = sessions_.find(std::string(token));
        if (it == sessions_.end()) throw Error(ErrorCode::AuthFailed, "invalid session");
        probe = it->second;
    }
    return check_live(probe);
}

void AuthService::deactivate_user(const Session& admin_session, std::string_view user_id) {
    require_role(admin_session, UserType::Administrator);
    db_.transact([&] {
        auto stmt = db_.prepare("UPDATE users SET active = 0 WHERE user_id = ?");
        stmt.bind(1, user_id);
        stmt.run();
        if (db_.changes() == 0) {
            throw Error(ErrorCode::NotFound, "no such user: " + std::string(user_id));
        }
    });
    std::unique_lock lock(sessions_mutex_);
    std::erase_if(sessions_, [&](const auto& kv) { return kv.second.user_id == user_id; });
}

std::optional<UserRecord> AuthService::find_user(std::string_view user_id) {
    return db_.transact([&]() -> std::optional<UserRecord> {
        auto stmt = db_.prepare(std::string("SELECT ") + kUserColumns + " FROM users WHERE user_id = ?");
        stmt.bind(1, user_id);
        if (!stmt.step()) return std::nullopt;
        return read_user(stmt);
    });
}

std::optional<UserRecord> AuthService::find_by_prescriber_no(std::string_view prescriber_no) {
    return db_.transact([&]() -> std::optional<UserRecord> {
        auto stmt = db_.prepare(std::string("SELECT ") + kUserColumns +
                                " FROM users WHERE prescriber_no = ?");
        stmt.bind(1, prescriber_no);
        if (!stmt.step()) return std::nullopt;
        return read_user(stmt);
    });
}

std::vector<AuditEntry> AuthService::audit_log() {
    return db_.transact([&] {
        std::vector<AuditEntry> out;
        auto stmt = db_.prepare(
            "SELECT entry_id, at, user_id, success, failed_factors FROM audit_log ORDER BY entry_id");
        while (stmt.step()) {
            out.push_back(AuditEntry{stmt.column_int64(0), from_millis(stmt.column_int64(1)),
                                     stmt.column_text(2), stmt.column_int64(3) != 0,
                                     stmt.column_text(4)});
        }
        return out;
    });
}

}  // namespace rxledger
