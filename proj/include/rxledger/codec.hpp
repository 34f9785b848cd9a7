#pragma once

#include "rxledger/auth.hpp"
#include "rxledger/cbr.hpp"
#include "rxledger/knowledge_base.hpp"
#include "rxledger/medication.hpp"
#include "rxledger/prescription.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <string_view>

// JSON wire forms. Dates are "YYYY-MM-DD", timestamps ISO-8601 UTC,
// fingerprints base64. Password digests, salts and fingerprint templates
// are never written out.

namespace rxledger {

/// Drug monograph field names, excluding drug_id and name.
inline constexpr std::array<std::string_view, 12> kDrugTextFields = {
    "legal_class",   "manufacturer",     "pharmacological_class", "general_description",
    "indications",   "adult_usage",      "children_usage",        "contraindications",
    "precautions",   "interactions",     "adverse_reactions",     "how_supplied"};

void to_json(nlohmann::json& j, const DrugRecord& d);
void to_json(nlohmann::json& j, const Pharmacy& p);
void to_json(nlohmann::json& j, const PatientRecord& p);
void to_json(nlohmann::json& j, const PatientSummary& p);
void to_json(nlohmann::json& j, const ConsultationNote& n);
void to_json(nlohmann::json& j, const HistoryEntry& e);
void to_json(nlohmann::json& j, const MedicationItem& m);
void to_json(nlohmann::json& j, const DraftItem& d);
void to_json(nlohmann::json& j, const Prescription& rx);
void to_json(nlohmann::json& j, const FrequentEntry& f);
void to_json(nlohmann::json& j, const Case& c);
void to_json(nlohmann::json& j, const ScoredCase& s);
void to_json(nlohmann::json& j, const AdaptedDraft& a);
void to_json(nlohmann::json& j, const UserRecord& u);
void to_json(nlohmann::json& j, const Session& s);
void to_json(nlohmann::json& j, const AuditEntry& a);

/// Parses a drug object. Unknown keys are rejected. With
/// `require_all_fields`, every monograph key must be present (drug_id
/// stays optional); otherwise missing text fields default to "".
DrugRecord parse_drug(const nlohmann::json& j, bool require_all_fields);

DraftItem parse_draft_item(const nlohmann::json& j);
PatientRegistration parse_registration(const nlohmann::json& j);
EnrollRequest parse_enroll(const nlohmann::json& j);
Pharmacy parse_pharmacy(const nlohmann::json& j);
/// Base64 text to a scan.
FingerprintScan parse_scan(const nlohmann::json& j);

/// Required string member; InvalidArgument when missing or mistyped.
std::string require_string(const nlohmann::json& j, std::string_view key);
std::string optional_string(const nlohmann::json& j, std::string_view key);

}  // namespace rxledger
