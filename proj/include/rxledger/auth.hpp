#pragma once

#include "rxledger/fingerprint.hpp"
#include "rxledger/store.hpp"
#include "rxledger/types.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rxledger {

enum class UserType { Administrator, Physician, Pharmacist };

std::string_view to_string(UserType type) noexcept;
/// Throws Error(InvalidArgument) on unknown names.
UserType parse_user_type(std::string_view text);

/// Administrators and physicians write prescriptions; pharmacists do not.
constexpr bool prescribes(UserType type) noexcept { return type != UserType::Pharmacist; }

/// "MD-" followed by exactly six digits.
bool is_valid_prescriber_no(std::string_view text) noexcept;

struct UserRecord {
    std::string user_id;
    std::vector<std::uint8_t> password_digest;
    std::vector<std::uint8_t> salt;
    int kdf_iterations = 0;
    std::string fullname;
    UserType user_type = UserType::Physician;
    std::string phone_no;
    FingerprintTemplate fingerprint_template{};
    std::optional<std::string> prescriber_no;
    /// Pharmacy a Pharmacist works at; absent for prescribing users.
    std::optional<PharmacyId> pharm_id;
    bool active = true;
};

/// Issued on successful login; immutable afterwards.
struct Session {
    std::string token;
    std::string user_id;
    UserType role = UserType::Physician;
    Timestamp issued_at;
    Timestamp expires_at;
    std::optional<PharmacyId> pharm_id;
};

struct EnrollRequest {
    std::string user_id;
    std::string fullname;
    UserType user_type = UserType::Physician;
    std::string phone_no;
    std::string password;
    FingerprintScan fingerprint;
    std::optional<std::string> prescriber_no;
    std::optional<PharmacyId> pharm_id;
};

struct AuthPolicy {
    double fingerprint_threshold = 0.95;
    int kdf_iterations = 100'000;
    std::chrono::minutes session_ttl{30};
};

struct AuditEntry {
    std::int64_t entry_id = 0;
    Timestamp at;
    std::string user_id;
    bool success = false;
    /// Comma-separated factors that failed ("user_id", "password",
    /// "fingerprint", "inactive"); empty on success.
    std::string failed_factors;
};

class AuthService {
public:
    AuthService(Database& db, std::shared_ptr<const Clock> clock, AuthPolicy policy = {});

    const AuthPolicy& policy() const noexcept { return policy_; }

    /// Creates the first Administrator. Refused (InvalidState) once any
    /// Administrator exists.
    UserRecord bootstrap_admin(const EnrollRequest& request);
    bool has_admin();

    UserRecord enroll_user(const Session& admin_session, const EnrollRequest& request);

    /// Conjunctive three-factor login. Every failure is the same opaque
    /// AuthFailed; the failing factors go to the audit log only.
    Session authenticate(std::string_view user_id, std::string_view password,
                         const FingerprintScan& fingerprint);

    /// Throws AuthFailed for unknown/fabricated tokens, SessionExpired for
    /// expired ones, Forbidden when the role does not satisfy `role`.
    /// Administrators satisfy Physician checks.
    void require_role(const Session& session, UserType role);

    /// Validates liveness only (any role).
    void require_session(const Session& session);

    /// Looks up a live session by token; same errors as require_session.
    Session resolve(std::string_view token);

    void deactivate_user(const Session& admin_session, std::string_view user_id);

    std::optional<UserRecord> find_user(std::string_view user_id);
    std::optional<UserRecord> find_by_prescriber_no(std::string_view prescriber_no);
    std::vector<AuditEntry> audit_log();

private:
    UserRecord enroll_locked(const EnrollRequest& request);
    Session check_live(const Session& session);

    Database& db_;
    std::shared_ptr<const Clock> clock_;
    AuthPolicy policy_;

    std::shared_mutex sessions_mutex_;
    std::unordered_map<std::string, Session> sessions_;
};

}  // namespace rxledger
