#include "rxledger/prescription.hpp"

#include "rows.hpp"
#include "rxledger/error.hpp"
#include "rxledger/text.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

namespace rxledger {

std::string_view to_string(RxState state) noexcept {
    switch (state) {
        case RxState::Draft: return "Draft";
        case RxState::Validated: return "Validated";
        case RxState::Transmitted: return "Transmitted";
        case RxState::Dispensed: return "Dispensed";
        case RxState::Rejected: return "Rejected";
    }
    return "Draft";
}

RxState parse_rx_state(std::string_view text) {
    for (auto s : {RxState::Draft, RxState::Validated, RxState::Transmitted, RxState::Dispensed,
                   RxState::Rejected}) {
        if (to_string(s) == text) return s;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown prescription state: " + std::string(text));
}

DraftItem draft_item_from(const MedicationItem& item) {
    DraftItem d;
    d.drug_id = item.drug_id;
    d.num = item.num;
    d.refill = item.refill;
    d.substitute = item.substitute;
    d.dosage = item.dosage;
    d.freq = item.freq;
    d.route = item.route;
    d.sig = item.sig;
    d.note = item.note;
    d.start_d = item.start_d;
    d.refill_d = item.refill_d;
    d.renew_d = item.renew_d;
    return d;
}

namespace {

constexpr const char* kRxColumns =
    "rx_id, pat_id, note_id, prescriber_user, prescriber_no, pharm_id, state, alerts, "
    "reject_reason, created_at, transmitted_at, dispensed_at";

std::string alerts_json(const std::vector<Alert>& alerts) { return nlohmann::json(alerts).dump(); }

std::optional<Timestamp> opt_time(const Statement& row, int col) {
    if (auto ms = row.column_opt_int64(col)) return from_millis(*ms);
    return std::nullopt;
}

std::string rx_number(RxId id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "RX-%06lld", static_cast<long long>(id.value));
    return buf;
}

std::string html_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

PrescriptionService::PrescriptionService(Database& db, AuthService& auth, KnowledgeBase& kb,
                                         CaseMemory& cases, std::shared_ptr<const Clock> clock,
                                         int pediatric_age)
    : db_(db), auth_(auth), kb_(kb), cases_(cases), clock_(std::move(clock)),
      pediatric_age_(pediatric_age) {}

// ---------------------------------------------------------------------------
// Loading

Prescription PrescriptionService::load_row(const Statement& row) {
    Prescription rx;
    rx.rx_id = RxId{row.column_int64(0)};
    rx.pat_id = PatientId{row.column_int64(1)};
    rx.note_id = NoteId{row.column_int64(2)};
    rx.prescriber_user = row.column_text(3);
    rx.prescriber_no = row.column_text(4);
    if (auto pharm = row.column_opt_int64(5)) rx.pharmacy = PharmacyId{*pharm};
    rx.state = parse_rx_state(row.column_text(6));
    rx.alerts = nlohmann::json::parse(row.column_text(7)).get<std::vector<Alert>>();
    rx.reject_reason = row.column_text(8);
    rx.created_at = from_millis(row.column_int64(9));
    rx.transmitted_at = opt_time(row, 10);
    rx.dispensed_at = opt_time(row, 11);

    auto items = db_.prepare(std::string("SELECT ") + rows::kMedicationColumns +
                             " FROM Medication m WHERE m.rx_id = ? ORDER BY m.med_id");
    items.bind(1, rx.rx_id.value);
    while (items.step()) rx.items.push_back(rows::read_medication(items));
    return rx;
}

Prescription PrescriptionService::load(RxId id) {
    auto stmt = db_.prepare(std::string("SELECT ") + kRxColumns +
                            " FROM prescription WHERE rx_id = ?");
    stmt.bind(1, id.value);
    if (!stmt.step()) {
        throw Error(ErrorCode::NotFound, "no such prescription: " + std::to_string(id.value));
    }
    return load_row(stmt);
}

Prescription PrescriptionService::get(RxId rx) {
    return db_.transact([&] { return load(rx); });
}

std::vector<Prescription> PrescriptionService::list_all() {
    return db_.transact([&] {
        std::vector<Prescription> out;
        auto stmt = db_.prepare(std::string("SELECT ") + kRxColumns +
                                " FROM prescription ORDER BY rx_id");
        while (stmt.step()) out.push_back(load_row(stmt));
        return out;
    });
}

std::vector<MedicationItem> PrescriptionService::active_medications(PatientId patient) {
    return db_.transact([&] {
        const auto today = clock_->today();
        std::vector<MedicationItem> out;
        auto stmt = db_.prepare(std::string("SELECT ") + rows::kMedicationColumns +
                                " FROM Medication m JOIN prescription p ON p.rx_id = m.rx_id "
                                "WHERE m.pat_id = ? AND p.state IN ('Transmitted', 'Dispensed') "
                                "ORDER BY m.med_id");
        stmt.bind(1, patient.value);
        while (stmt.step()) {
            auto item = rows::read_medication(stmt);
            if (item.renew_d && *item.renew_d < today) continue;
            out.push_back(std::move(item));
        }
        return out;
    });
}

void PrescriptionService::require_drafter(const Session& session, const Prescription& rx) {
    auth_.require_role(session, UserType::Physician);
    if (session.user_id != rx.prescriber_user) {
        throw Error(ErrorCode::Forbidden, "only the drafting prescriber may act on this prescription");
    }
}

// ---------------------------------------------------------------------------
// Lifecycle

Prescription PrescriptionService::create_draft(const Session& session, PatientId patient_id,
                                               const std::vector<DraftItem>& items,
                                               std::optional<NoteId> note_id) {
    auth_.require_role(session, UserType::Physician);
    if (items.empty()) throw Error(ErrorCode::EmptyItems, "a prescription needs at least one item");

    return db_.transact([&] {
        const auto patient = kb_.get_patient(patient_id);
        const auto today = clock_->today();

        NoteId note;
        if (note_id) {
            const auto found = kb_.find_note(*note_id);
            if (!found || found->pat_id != patient_id) {
                throw Error(ErrorCode::NotFound, "consultation note does not belong to this patient");
            }
            note = found->note_id;
        } else {
            const auto notes = kb_.consultations(patient_id);
            if (notes.empty()) {
                throw Error(ErrorCode::NoConsultation,
                            "record a consultation before prescribing");
            }
            note = notes.back().note_id;
        }

        const auto catalog = kb_.catalog();
        std::vector<MedicationItem> meds;
        meds.reserve(items.size());
        for (const auto& in : items) {
            const auto* drug = catalog.find(in.drug_id);
            if (!drug) {
                throw Error(ErrorCode::UnknownDrug,
                            "unknown drug id: " + std::to_string(in.drug_id.value));
            }
            if (in.refill < 0) throw Error(ErrorCode::InvalidArgument, "refill must be >= 0");
            if (in.num && *in.num <= 0) throw Error(ErrorCode::InvalidArgument, "num must be > 0");
            if (in.start_d && *in.start_d < today) {
                throw Error(ErrorCode::InvalidArgument, "start date precedes the prescription date");
            }
            MedicationItem m;
            m.pat_id = patient.pat_id;
            m.drug_id = drug->drug_id;
            m.pat_name = patient.fullname;
            m.med_name = drug->name;
            m.num = in.num;
            m.refill = in.refill;
            m.substitute = in.substitute;
            m.dosage = in.dosage;
            m.freq = in.freq;
            m.route = in.route;
            m.sig = in.sig;
            m.note = in.note;
            m.start_d = in.start_d;
            m.refill_d = in.refill_d;
            m.renew_d = in.renew_d;
            m.date = today;
            meds.push_back(std::move(m));
        }

        const auto active = active_medications(patient_id);
        const auto alerts =
            validate_draft(meds, patient, active, catalog, ValidationContext{today, pediatric_age_});

        auto insert = db_.prepare(
            "INSERT INTO prescription(pat_id, note_id, prescriber_user, prescriber_no, pharm_id, "
            "state, alerts, reject_reason, created_at) VALUES(?,?,?,'',NULL,?,?,'',?)");
        insert.bind(1, patient_id.value)
            .bind(2, note.value)
            .bind(3, session.user_id)
            .bind(4, to_string(RxState::Draft))
            .bind(5, alerts_json(alerts))
            .bind(6, to_millis(clock_->now()));
        insert.run();
        const RxId rx_id{db_.last_insert_rowid()};
        for (auto& m : meds) {
            m.rx_id = rx_id;
            rows::insert_medication(db_, m);
        }
        return load(rx_id);
    });
}

Prescription PrescriptionService::validate(const Session& session, RxId id) {
    return db_.transact([&] {
        auto rx = load(id);
        require_drafter(session, rx);
        if (rx.state != RxState::Draft) {
            throw Error(ErrorCode::InvalidState,
                        "cannot validate a " + std::string(to_string(rx.state)) + " prescription");
        }
        if (!is_transmittable(rx.alerts)) {
            throw Error(ErrorCode::UnresolvedAlerts,
                        "blocking alerts present or interruptive alerts not overridden");
        }
        auto stmt = db_.prepare(
            "UPDATE prescription SET state = 'Validated' WHERE rx_id = ? AND state = 'Draft'");
        stmt.bind(1, id.value);
        stmt.run();
        if (db_.changes() != 1) throw Error(ErrorCode::InvalidState, "concurrent state change");
        return load(id);
    });
}

Alert PrescriptionService::record_override(const Session& session, RxId id,
                                           std::string_view alert_id, std::string_view reason) {
    return db_.transact([&] {
        auto rx = load(id);
        require_drafter(session, rx);
        if (rx.state != RxState::Draft) {
            throw Error(ErrorCode::InvalidState, "alerts are frozen once a prescription is validated");
        }
        auto updated = apply_override(rx.alerts, alert_id, reason, session.user_id, clock_->now());
        auto stmt = db_.prepare(
            "UPDATE prescription SET alerts = ? WHERE rx_id = ? AND state = 'Draft'");
        stmt.bind(1, alerts_json(rx.alerts)).bind(2, id.value);
        stmt.run();
        if (db_.changes() != 1) throw Error(ErrorCode::InvalidState, "concurrent state change");
        return updated;
    });
}

Prescription PrescriptionService::sign_and_transmit(const Session& session, RxId id,
                                                    std::optional<PharmacyId> explicit_pharmacy) {
    return db_.transact([&] {
        auto rx = load(id);
        require_drafter(session, rx);
        if (rx.state != RxState::Validated) {
            throw Error(ErrorCode::InvalidState,
                        "only Validated prescriptions can be transmitted (state " +
                            std::string(to_string(rx.state)) + ")");
        }
        if (!is_transmittable(rx.alerts)) {
            throw Error(ErrorCode::UnresolvedAlerts, "prescription has unresolved alerts");
        }
        const auto prescriber = auth_.find_user(session.user_id);
        if (!prescriber || !prescriber->prescriber_no || prescriber->prescriber_no->empty()) {
            throw Error(ErrorCode::Forbidden, "prescriber has no licence number on record");
        }

        const auto patient = kb_.get_patient(rx.pat_id);
        PharmacyId pharmacy;
        if (explicit_pharmacy) {
            if (!kb_.find_pharmacy(*explicit_pharmacy)) {
                throw Error(ErrorCode::UnregisteredPharmacy, "pharmacy is not registered");
            }
            pharmacy = *explicit_pharmacy;
        } else if (patient.default_pharmacy) {
            pharmacy = *patient.default_pharmacy;
        } else {
            throw Error(ErrorCode::NoPharmacyResolvable,
                        "patient has no default pharmacy; choose one");
        }
        if (!patient.default_pharmacy) kb_.set_default_pharmacy(patient.pat_id, pharmacy);

        auto stmt = db_.prepare(
            "UPDATE prescription SET state = 'Transmitted', prescriber_no = ?, pharm_id = ?, "
            "transmitted_at = ? WHERE rx_id = ? AND state = 'Validated'");
        stmt.bind(1, *prescriber->prescriber_no)
            .bind(2, pharmacy.value)
            .bind(3, to_millis(clock_->now()))
            .bind(4, id.value);
        stmt.run();
        if (db_.changes() != 1) throw Error(ErrorCode::InvalidState, "concurrent state change");

        auto items = db_.prepare("UPDATE Medication SET pharmacist = ? WHERE rx_id = ?");
        items.bind(1, pharmacy.value).bind(2, id.value);
        items.run();
        return load(id);
    });
}

PrescriberStatus PrescriptionService::verify_prescriber(std::string_view prescriber_no) {
    if (prescriber_no.empty()) return PrescriberStatus::Unknown;
    const auto user = auth_.find_by_prescriber_no(prescriber_no);
    return user && user->active && prescribes(user->user_type) ? PrescriberStatus::Valid
                                                                : PrescriberStatus::Unknown;
}

std::vector<Prescription> PrescriptionService::pharmacy_inbox(const Session& session,
                                                              PharmacyId pharmacy) {
    auth_.require_role(session, UserType::Pharmacist);
    if (session.pharm_id != pharmacy) {
        throw Error(ErrorCode::Forbidden, "pharmacists can read only their own pharmacy's inbox");
    }
    return db_.transact([&] {
        std::vector<Prescription> out;
        auto stmt = db_.prepare(std::string("SELECT ") + kRxColumns +
                                " FROM prescription WHERE pharm_id = ? AND state = 'Transmitted' "
                                "ORDER BY transmitted_at, rx_id");
        stmt.bind(1, pharmacy.value);
        while (stmt.step()) out.push_back(load_row(stmt));
        return out;
    });
}

std::vector<Prescription> PrescriptionService::lookup_by_patient_fingerprint(
    const Session& session, const FingerprintScan& scan) {
    auth_.require_role(session, UserType::Pharmacist);
    if (scan.bytes.empty()) throw Error(ErrorCode::EmptyScan, "fingerprint scan is empty");
    const auto probe = normalize_template(scan.bytes);
    const double threshold = auth_.policy().fingerprint_threshold;

    return db_.transact([&] {
        std::vector<PatientId> matches;
        auto patients = db_.prepare("SELECT pat_id, fingerprint FROM patient WHERE fingerprint IS NOT NULL");
        while (patients.step()) {
            const auto enrolled = normalize_template(patients.column_blob(1));
            if (match_templates(enrolled, probe) >= threshold) {
                matches.push_back(PatientId{patients.column_int64(0)});
            }
        }
        if (matches.empty()) throw Error(ErrorCode::NoMatch, "no enrolled patient matches the scan");
        if (matches.size() > 1) {
            throw Error(ErrorCode::AmbiguousMatch, "scan matches more than one enrolled patient");
        }
        std::vector<Prescription> out;
        auto stmt = db_.prepare(std::string("SELECT ") + kRxColumns +
                                " FROM prescription WHERE pat_id = ? AND state = 'Transmitted' "
                                "ORDER BY transmitted_at, rx_id");
        stmt.bind(1, matches.front().value);
        while (stmt.step()) out.push_back(load_row(stmt));
        return out;
    });
}

Prescription PrescriptionService::dispense(const Session& session, RxId id) {
    auth_.require_role(session, UserType::Pharmacist);
    std::string rejection;
    auto result = db_.transact([&] {
        auto rx = load(id);
        if (rx.pharmacy && session.pharm_id != rx.pharmacy) {
            throw Error(ErrorCode::Forbidden, "prescription was sent to another pharmacy");
        }
        if (rx.state != RxState::Transmitted) {
            throw Error(ErrorCode::InvalidState,
                        "only Transmitted prescriptions can be dispensed (state " +
                            std::string(to_string(rx.state)) + ")");
        }
        const auto now = clock_->now();

        // The stamped number must be a live licence and belong to the user
        // who drafted the prescription.
        const auto owner = rx.prescriber_no.empty()
                               ? std::nullopt
                               : auth_.find_by_prescriber_no(rx.prescriber_no);
        if (verify_prescriber(rx.prescriber_no) != PrescriberStatus::Valid || !owner ||
            owner->user_id != rx.prescriber_user) {
            rejection = "prescriber number '" + rx.prescriber_no + "' failed verification";
            auto stmt = db_.prepare(
                "UPDATE prescription SET state = 'Rejected', reject_reason = ? "
                "WHERE rx_id = ? AND state = 'Transmitted'");
            stmt.bind(1, rejection).bind(2, id.value);
            stmt.run();
            return load(id);
        }

        auto stmt = db_.prepare(
            "UPDATE prescription SET state = 'Dispensed', dispensed_at = ? "
            "WHERE rx_id = ? AND state = 'Transmitted'");
        stmt.bind(1, to_millis(now)).bind(2, id.value);
        stmt.run();
        if (db_.changes() != 1) throw Error(ErrorCode::InvalidState, "concurrent state change");

        const auto note = kb_.find_note(rx.note_id);
        if (!note) throw Error(ErrorCode::Internal, "consultation note missing");
        const auto patient = kb_.get_patient(rx.pat_id);
        for (const auto& item : rx.items) {
            cases_.retain(encode_case(*note, patient, item, now), item.med_id);
        }
        return load(id);
    });
    if (!rejection.empty()) {
        throw Error(ErrorCode::PrescriberVerificationFailed, rejection,
                    nlohmann::json{{"rx_id", id.value}, {"state", "Rejected"}});
    }
    return result;
}

// ---------------------------------------------------------------------------
// Reports

std::vector<FrequentEntry> PrescriptionService::frequently_prescribed(std::size_t limit) {
    if (limit < 1) throw Error(ErrorCode::InvalidArgument, "limit must be >= 1");
    return db_.transact([&] {
        using Key = std::tuple<std::int64_t, std::string, std::string, std::string>;
        std::map<Key, FrequentEntry> groups;
        auto stmt = db_.prepare(std::string("SELECT ") + rows::kMedicationColumns +
                                " FROM Medication m JOIN prescription p ON p.rx_id = m.rx_id "
                                "WHERE p.state IN ('Transmitted', 'Dispensed') ORDER BY m.med_id");
        while (stmt.step()) {
            const auto item = rows::read_medication(stmt);
            auto& entry = groups[Key{item.drug_id.value, item.dosage, item.freq, item.route}];
            entry.drug_id = item.drug_id;
            entry.drug_name = item.med_name;
            entry.dosage = item.dosage;
            entry.freq = item.freq;
            entry.route = item.route;
            ++entry.count;
            // Rows arrive in med_id order, so the last write is the newest.
            entry.template_item = draft_item_from(item);
            entry.template_item.note.clear();
            entry.template_item.start_d.reset();
            entry.template_item.refill_d.reset();
            entry.template_item.renew_d.reset();
        }
        std::vector<FrequentEntry> out;
        out.reserve(groups.size());
        for (auto& [key, entry] : groups) out.push_back(std::move(entry));
        std::sort(out.begin(), out.end(), [](const FrequentEntry& a, const FrequentEntry& b) {
            if (a.count != b.count) return a.count > b.count;
            const auto an = to_lower(a.drug_name);
            const auto bn = to_lower(b.drug_name);
            if (an != bn) return an < bn;
            return std::tie(a.drug_id, a.dosage, a.freq, a.route) <
                   std::tie(b.drug_id, b.dosage, b.freq, b.route);
        });
        if (out.size() > limit) out.resize(limit);
        return out;
    });
}

PrintableDocument PrescriptionService::render_printable(RxId id) {
    return db_.transact([&] {
        const auto rx = load(id);
        if (rx.state != RxState::Transmitted && rx.state != RxState::Dispensed &&
            rx.state != RxState::Rejected) {
            throw Error(ErrorCode::InvalidState, "only transmitted prescriptions can be printed");
        }
        const auto patient = kb_.get_patient(rx.pat_id);
        const auto prescriber = auth_.find_user(rx.prescriber_user);
        const auto pharmacy = rx.pharmacy ? kb_.find_pharmacy(*rx.pharmacy) : std::nullopt;
        const auto note = kb_.find_note(rx.note_id);
        const std::string prescriber_name = prescriber ? prescriber->fullname : rx.prescriber_user;
        const std::string issued = rx.transmitted_at ? format_date(to_date(*rx.transmitted_at)) : "";

        std::ostringstream t;
        t << "E-PRESCRIPTION\n"
          << "Prescription No: " << rx_number(rx.rx_id) << "\n"
          << "Date: " << issued << "\n"
          << "Status: " << to_string(rx.state) << "\n\n"
          << "PATIENT\n"
          << "Name: " << patient.fullname << "\n"
          << "Date of birth: " << format_date(patient.dob) << "\n"
          << "Address: " << patient.address << "\n"
          << "Phone: " << patient.phone << "\n\n"
          << "DIAGNOSIS\n"
          << (note ? note->nature : std::string{}) << "\n"
          << (note ? note->description : std::string{}) << "\n\n"
          << "MEDICATIONS\n";
        for (std::size_t i = 0; i < rx.items.size(); ++i) {
            const auto& m = rx.items[i];
            t << i + 1 << ". " << m.med_name << "\n"
              << "   Dosage: " << m.dosage << "\n"
              << "   Frequency: " << m.freq << "\n"
              << "   Route: " << m.route << "\n"
              << "   Quantity: " << (m.num ? std::to_string(*m.num) : std::string{}) << "\n"
              << "   Refills: " << m.refill << "\n"
              << "   Substitution: " << (m.substitute ? "permitted" : "not permitted") << "\n"
              << "   Sig: " << m.sig << "\n"
              << "   Prescriber note: " << m.note << "\n";
        }
        t << "\nPRESCRIBER\n"
          << "Name: " << prescriber_name << "\n"
          << "Prescriber No: " << rx.prescriber_no << "\n\n"
          << "PHARMACY\n"
          << "Name: " << (pharmacy ? pharmacy->name : std::string{}) << "\n"
          << "Address: " << (pharmacy ? pharmacy->address : std::string{}) << "\n"
          << "Phone: " << (pharmacy ? pharmacy->phone : std::string{}) << "\n"
          << "Email: " << (pharmacy ? pharmacy->email : std::string{}) << "\n";

        const auto e = [](std::string_view s) { return html_escape(s); };
        std::ostringstream h;
        h << "<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"><title>"
          << rx_number(rx.rx_id) << "</title></head>\n<body>\n"
          << "<h1>E-Prescription</h1>\n"
          << "<p class=\"rx-no\">Prescription No: " << rx_number(rx.rx_id) << "</p>\n"
          << "<p class=\"date\">Date: " << issued << "</p>\n"
          << "<p class=\"status\">Status: " << to_string(rx.state) << "</p>\n"
          << "<section class=\"patient\">\n<h2>Patient</h2>\n"
          << "<p>Name: " << e(patient.fullname) << "</p>\n"
          << "<p>Date of birth: " << format_date(patient.dob) << "</p>\n"
          << "<p>Address: " << e(patient.address) << "</p>\n"
          << "<p>Phone: " << e(patient.phone) << "</p>\n</section>\n"
          << "<section class=\"diagnosis\">\n<h2>Diagnosis</h2>\n"
          << "<p>" << e(note ? note->nature : std::string{}) << "</p>\n"
          << "<p>" << e(note ? note->description : std::string{}) << "</p>\n</section>\n"
          << "<section class=\"medications\">\n<h2>Medications</h2>\n<ol>\n";
        for (const auto& m : rx.items) {
            h << "<li><strong>" << e(m.med_name) << "</strong>"
              << "<br>Dosage: " << e(m.dosage) << "<br>Frequency: " << e(m.freq)
              << "<br>Route: " << e(m.route)
              << "<br>Quantity: " << (m.num ? std::to_string(*m.num) : std::string{})
              << "<br>Refills: " << m.refill
              << "<br>Substitution: " << (m.substitute ? "permitted" : "not permitted")
              << "<br>Sig: " << e(m.sig) << "<br>Prescriber note: " << e(m.note) << "</li>\n";
        }
        h << "</ol>\n</section>\n"
          << "<section class=\"prescriber\">\n<h2>Prescriber</h2>\n"
          << "<p>Name: " << e(prescriber_name) << "</p>\n"
          << "<p>Prescriber No: " << e(rx.prescriber_no) << "</p>\n</section>\n"
          << "<section class=\"pharmacy\">\n<h2>Pharmacy</h2>\n"
          << "<p>Name: " << e(pharmacy ? pharmacy->name : std::string{}) << "</p>\n"
          << "<p>Address: " << e(pharmacy ? pharmacy->address : std::string{}) << "</p>\n"
          << "<p>Phone: " << e(pharmacy ? pharmacy->phone : std::string{}) << "</p>\n"
          << "<p>Email: " << e(pharmacy ? pharmacy->email : std::string{}) << "</p>\n</section>\n"
          << "</body>\n</html>\n";

        return PrintableDocument{t.str(), h.str()};
    });
}

}  // namespace rxledger
