#include "rxledger/error.hpp"

namespace rxledger {

std::string_view code_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::AuthFailed: return "AUTH_FAILED";
        case ErrorCode::Forbidden: return "FORBIDDEN";
        case ErrorCode::SessionExpired: return "SESSION_EXPIRED";
        case ErrorCode::DuplicateUser: return "DUPLICATE_USER";
        case ErrorCode::MissingPrescriberNo: return "MISSING_PRESCRIBER_NO";
        case ErrorCode::UnexpectedPrescriberNo: return "UNEXPECTED_PRESCRIBER_NO";
        case ErrorCode::DuplicatePrescriberNo: return "DUPLICATE_PRESCRIBER_NO";
        case ErrorCode::EmptyScan: return "EMPTY_SCAN";
        case ErrorCode::NotFound: return "NOT_FOUND";
        case ErrorCode::DuplicateName: return "DUPLICATE_NAME";
        case ErrorCode::InvalidDob: return "INVALID_DOB";
        case ErrorCode::PatientNotFound: return "PATIENT_NOT_FOUND";
        case ErrorCode::UnknownDrug: return "UNKNOWN_DRUG";
        case ErrorCode::CannotOverrideBlocking: return "CANNOT_OVERRIDE_BLOCKING";
        case ErrorCode::EmptyReason: return "EMPTY_REASON";
        case ErrorCode::IncompleteSig: return "INCOMPLETE_SIG";
        case ErrorCode::DrugWithdrawn: return "DRUG_WITHDRAWN";
        case ErrorCode::FutureDob: return "FUTURE_DOB";
        case ErrorCode::EmptyItems: return "EMPTY_ITEMS";
        case ErrorCode::NoConsultation: return "NO_CONSULTATION";
        case ErrorCode::UnresolvedAlerts: return "UNRESOLVED_ALERTS";
        case ErrorCode::NoPharmacyResolvable: return "NO_PHARMACY_RESOLVABLE";
        case ErrorCode::InvalidState: return "INVALID_STATE";
        case ErrorCode::UnregisteredPharmacy: return "UNREGISTERED_PHARMACY";
        case ErrorCode::NoMatch: return "NO_MATCH";
        case ErrorCode::AmbiguousMatch: return "AMBIGUOUS_MATCH";
        case ErrorCode::PrescriberVerificationFailed: return "PRESCRIBER_VERIFICATION_FAILED";
        case ErrorCode::NoAdminBootstrapped: return "NO_ADMIN_BOOTSTRAPPED";
        case ErrorCode::PortInUse: return "PORT_IN_USE";
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::StorageError: return "STORAGE_ERROR";
        case ErrorCode::Internal: return "INTERNAL";
    }
    return "INTERNAL";
}

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::AuthFailed:
        case ErrorCode::SessionExpired:
            return 401;
        case ErrorCode::Forbidden:
            return 403;
        case ErrorCode::NotFound:
        case ErrorCode::PatientNotFound:
        case ErrorCode::UnknownDrug:
        case ErrorCode::NoMatch:
            return 404;
        case ErrorCode::DuplicateUser:
        case ErrorCode::DuplicatePrescriberNo:
        case ErrorCode::DuplicateName:
        case ErrorCode::InvalidState:
        case ErrorCode::AmbiguousMatch:
        case ErrorCode::DrugWithdrawn:
            return 409;
        case ErrorCode::CannotOverrideBlocking:
        case ErrorCode::UnresolvedAlerts:
        case ErrorCode::PrescriberVerificationFailed:
        case ErrorCode::NoPharmacyResolvable:
        case ErrorCode::UnregisteredPharmacy:
        case ErrorCode::NoConsultation:
            return 422;
        case ErrorCode::MissingPrescriberNo:
        case ErrorCode::UnexpectedPrescriberNo:
        case ErrorCode::EmptyScan:
        case ErrorCode::InvalidDob:
        case ErrorCode::EmptyReason:
        case ErrorCode::IncompleteSig:
        case ErrorCode::FutureDob:
        case ErrorCode::EmptyItems:
        case ErrorCode::InvalidArgument:
            return 400;
        case ErrorCode::NoAdminBootstrapped:
        case ErrorCode::PortInUse:
            return 503;
        case ErrorCode::StorageError:
        case ErrorCode::Internal:
            return 500;
    }
    return 500;
}

}  // namespace rxledger
