#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace rxledger {

/// Closed set of failure codes. Every public operation reports failures
/// through `Error` carrying one of these; the gateway maps them 1:1 onto
/// ApiError codes and HTTP statuses.
enum class ErrorCode {
    AuthFailed,
    Forbidden,
    SessionExpired,
    DuplicateUser,
    MissingPrescriberNo,
    UnexpectedPrescriberNo,
    DuplicatePrescriberNo,
    EmptyScan,
    NotFound,
    DuplicateName,
    InvalidDob,
    PatientNotFound,
    UnknownDrug,
    CannotOverrideBlocking,
    EmptyReason,
    IncompleteSig,
    DrugWithdrawn,
    FutureDob,
    EmptyItems,
    NoConsultation,
    UnresolvedAlerts,
    NoPharmacyResolvable,
    InvalidState,
    UnregisteredPharmacy,
    NoMatch,
    AmbiguousMatch,
    PrescriberVerificationFailed,
    NoAdminBootstrapped,
    PortInUse,
    InvalidArgument,
    StorageError,
    Internal,
};

/// Stable machine string, e.g. "AUTH_FAILED".
std::string_view code_string(ErrorCode code) noexcept;

/// HTTP status the gateway answers with for `code`.
int http_status(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, nlohmann::json details = nullptr)
        : std::runtime_error(std::move(message)), code_(code), details_(std::move(details)) {}

    ErrorCode code() const noexcept { return code_; }
    const nlohmann::json& details() const noexcept { return details_; }

private:
    ErrorCode code_;
    nlohmann::json details_;
};

}  // namespace rxledger
