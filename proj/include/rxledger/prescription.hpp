#pragma once

#include "rxledger/auth.hpp"
#include "rxledger/cbr.hpp"
#include "rxledger/knowledge_base.hpp"
#include "rxledger/medication.hpp"
#include "rxledger/store.hpp"
#include "rxledger/validator.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rxledger {

/// Draft -> Validated -> Transmitted -> {Dispensed, Rejected}. No skips,
/// no reversals; Dispensed and Rejected are terminal.
enum class RxState { Draft, Validated, Transmitted, Dispensed, Rejected };

std::string_view to_string(RxState state) noexcept;
RxState parse_rx_state(std::string_view text);

/// Prescriber input for one medication line.
struct DraftItem {
    DrugId drug_id;
    std::optional<int> num;
    int refill = 0;
    bool substitute = false;
    std::string dosage;
    std::string freq;
    std::string route;
    std::string sig;
    std::string note;
    std::optional<Date> start_d;
    std::optional<Date> refill_d;
    std::optional<Date> renew_d;

    friend bool operator==(const DraftItem&, const DraftItem&) = default;
};

DraftItem draft_item_from(const MedicationItem& item);

struct Prescription {
    RxId rx_id;
    PatientId pat_id;
    /// Consultation the prescription answers.
    NoteId note_id;
    std::vector<MedicationItem> items;
    std::string prescriber_user;
    /// Stamped from the prescriber's UserRecord at transmission.
    std::string prescriber_no;
    std::optional<PharmacyId> pharmacy;
    RxState state = RxState::Draft;
    std::vector<Alert> alerts;
    std::string reject_reason;
    Timestamp created_at;
    std::optional<Timestamp> transmitted_at;
    std::optional<Timestamp> dispensed_at;

    friend bool operator==(const Prescription&, const Prescription&) = default;
};

enum class PrescriberStatus { Valid, Unknown };

struct FrequentEntry {
    DrugId drug_id;
    std::string drug_name;
    std::string dosage;
    std::string freq;
    std::string route;
    std::size_t count = 0;
    /// Complete, editable item taken from the most recent occurrence.
    DraftItem template_item;
};

struct PrintableDocument {
    std::string text;
    std::string html;
};

class PrescriptionService {
public:
    PrescriptionService(Database& db, AuthService& auth, KnowledgeBase& kb, CaseMemory& cases,
                        std::shared_ptr<const Clock> clock, int pediatric_age = 12);

    /// Stores a Draft with validator alerts attached. Uses `note` or, when
    /// absent, the patient's latest consultation (NoConsultation if none).
    Prescription create_draft(const Session& session, PatientId patient,
                              const std::vector<DraftItem>& items,
                              std::optional<NoteId> note = std::nullopt);

    /// Draft -> Validated once the alerts allow transmission
    /// (UnresolvedAlerts otherwise).
    Prescription validate(const Session& session, RxId rx);

    Alert record_override(const Session& session, RxId rx, std::string_view alert_id,
                          std::string_view reason);

    /// Validated -> Transmitted. Pharmacy: explicit choice, else the
    /// patient's default; a first choice becomes the default.
    Prescription sign_and_transmit(const Session& session, RxId rx,
                                   std::optional<PharmacyId> pharmacy = std::nullopt);

    PrescriberStatus verify_prescriber(std::string_view prescriber_no);

    /// Transmitted prescriptions for the pharmacy, oldest first.
    std::vector<Prescription> pharmacy_inbox(const Session& session, PharmacyId pharmacy);

    std::vector<Prescription> lookup_by_patient_fingerprint(const Session& session,
                                                            const FingerprintScan& scan);

    /// Transmitted -> Dispensed, retaining one case per item; or
    /// Transmitted -> Rejected (then throws PrescriberVerificationFailed)
    /// when the stamped prescriber number does not check out.
    Prescription dispense(const Session& session, RxId rx);

    std::vector<FrequentEntry> frequently_prescribed(std::size_t limit);

    PrintableDocument render_printable(RxId rx);

    Prescription get(RxId rx);
    std::vector<Prescription> list_all();
    /// Items of the patient's Transmitted/Dispensed prescriptions whose
    /// renew_d, if any, has not passed.
    std::vector<MedicationItem> active_medications(PatientId patient);

private:
    Prescription load(RxId rx);
    Prescription load_row(const Statement& row);
    void require_drafter(const Session& session, const Prescription& rx);

    Database& db_;
    AuthService& auth_;
    KnowledgeBase& kb_;
    CaseMemory& cases_;
    std::shared_ptr<const Clock> clock_;
    int pediatric_age_;
};

}  // namespace rxledger
