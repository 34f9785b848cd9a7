#pragma once

#include "rxledger/auth.hpp"
#include "rxledger/fingerprint.hpp"
#include "rxledger/medication.hpp"
#include "rxledger/store.hpp"
#include "rxledger/text.hpp"
#include "rxledger/types.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rxledger {

/// Drug monograph; one row of DrugList. Every text field except `name` may
/// be empty, which stands for "not recorded".
struct DrugRecord {
    DrugId drug_id;
    std::string name;
    std::string legal_class;
    std::string manufacturer;
    std::string pharmacological_class;
    std::string general_description;
    std::string indications;
    std::string adult_usage;
    std::string children_usage;
    std::string contraindications;
    std::string precautions;
    /// Semicolon-separated names or classes of interacting drugs.
    std::string interactions;
    std::string adverse_reactions;
    std::string how_supplied;

    friend bool operator==(const DrugRecord&, const DrugRecord&) = default;
};

/// Immutable view of the drug registry at one point in time.
class DrugCatalog {
public:
    DrugCatalog() = default;
    explicit DrugCatalog(std::vector<DrugRecord> drugs);

    const DrugRecord* find(DrugId id) const noexcept;
    std::size_t size() const noexcept { return drugs_.size(); }

private:
    std::map<DrugId, DrugRecord> drugs_;
};

struct Pharmacy {
    PharmacyId pharm_id;
    std::string name;
    std::string address;
    std::string phone;
    std::string email;

    friend bool operator==(const Pharmacy&, const Pharmacy&) = default;
};

/// Loose syntactic check: one '@', non-empty local part, dotted domain.
bool is_valid_email(std::string_view email) noexcept;

struct PatientRecord {
    PatientId pat_id;
    std::string registered_by;
    std::string fullname;
    std::string phone;
    Date dob;
    std::string address;
    TermSet drug_allergy;
    std::string occupation;
    std::optional<PharmacyId> default_pharmacy;
    std::optional<FingerprintTemplate> fingerprint_template;

    friend bool operator==(const PatientRecord&, const PatientRecord&) = default;
};

struct PatientRegistration {
    std::string fullname;
    std::string phone;
    Date dob;
    std::string address;
    /// Free text, e.g. "Penicillin; sulfa drugs".
    std::string drug_allergy;
    std::string occupation;
    std::optional<PharmacyId> default_pharmacy;
    std::optional<FingerprintScan> fingerprint;
};

struct PatientSummary {
    PatientId pat_id;
    std::string fullname;

    friend bool operator==(const PatientSummary&, const PatientSummary&) = default;
};

struct ConsultationNote {
    NoteId note_id;
    PatientId pat_id;
    std::string author;
    std::string nature;
    std::string description;
    Timestamp recorded_at;

    friend bool operator==(const ConsultationNote&, const ConsultationNote&) = default;
};

/// One row of a patient's merged medical history.
struct HistoryEntry {
    Timestamp at;
    std::variant<ConsultationNote, MedicationItem> entry;
};

/// Allergy free text to normalized term set.
TermSet parse_allergies(std::string_view text);

/// Drug and patient repository: the EHR plus drug database.
class KnowledgeBase {
public:
    static constexpr std::size_t kSearchLimit = 20;

    KnowledgeBase(Database& db, AuthService& auth, std::shared_ptr<const Clock> clock);

    /// Creates when `drug.drug_id` is unset, otherwise fully replaces the
    /// existing record (NotFound if there is none). Bumps the registry version.
    DrugId upsert_drug(const Session& session, DrugRecord drug);
    DrugRecord get_drug_info(DrugId id);
    std::optional<DrugRecord> find_drug(DrugId id);
    /// Removes a drug from the registry; later adaptations report DrugWithdrawn.
    void withdraw_drug(const Session& session, DrugId id);
    std::vector<DrugRecord> list_drugs();
    DrugCatalog catalog();
    std::int64_t registry_version();

    /// Operator bulk load (no session). All-or-nothing; on any duplicate
    /// name throws DuplicateName with the offending names in details.
    std::size_t seed_drugs(std::vector<DrugRecord> drugs);

    Pharmacy register_pharmacy(const Session& admin_session, Pharmacy pharmacy);
    /// Operator path used by the CLI.
    Pharmacy add_pharmacy(Pharmacy pharmacy);
    std::optional<Pharmacy> find_pharmacy(PharmacyId id);
    std::vector<Pharmacy> list_pharmacies();

    PatientRecord register_patient(const Session& session, const PatientRegistration& registration);
    PatientRecord get_patient(PatientId id);
    std::vector<PatientRecord> list_patients();
    void set_default_pharmacy(PatientId id, PharmacyId pharmacy);

    /// Case-insensitive fullname prefix match, alphabetical, at most 20.
    std::vector<PatientSummary> search_patients(std::string_view prefix);

    ConsultationNote record_consultation(const Session& session, PatientId patient,
                                         std::string_view nature, std::string_view description);
    std::vector<ConsultationNote> consultations(PatientId patient);
    std::optional<ConsultationNote> find_note(NoteId id);

    /// Notes and transmitted/dispensed medications, oldest first. On equal
    /// timestamps notes come before medications.
    std::vector<HistoryEntry> get_history(PatientId patient);

private:
    DrugId upsert_locked(DrugRecord drug, bool create_with_id);
    Pharmacy add_pharmacy_locked(Pharmacy pharmacy);
    void require_patient(PatientId id);

    Database& db_;
    AuthService& auth_;
    std::shared_ptr<const Clock> clock_;
};

}  // namespace rxledger
