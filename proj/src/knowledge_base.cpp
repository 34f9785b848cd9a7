#include "rxledger/knowledge_base.hpp"

#include "rows.hpp"
#include "rxledger/error.hpp"

#include <algorithm>
#include <map>

namespace rxledger {

namespace {

constexpr const char* kDrugColumns =
    "drug_id, name, legal_class, manufacturer, pharmacological_class, general_description, "
    "indications, adult_usage, children_usage, contraindications, precautions, interactions, "
    "adverse_reactions, how_supplied";

constexpr const char* kPatientColumns =
    "pat_id, use_id, fullname, phone, dob, address, drug_allergy, occupation, pharmacist, "
    "fingerprint";

DrugRecord read_drug(const Statement& row) {
    DrugRecord d;
    d.drug_id = DrugId{row.column_int64(0)};
    d.name = row.column_text(1);
    d.legal_class = row.column_text(2);
    d.manufacturer = row.column_text(3);
    d.pharmacological_class = row.column_text(4);
    d.general_description = row.column_text(5);
    d.indications = row.column_text(6);
    d.adult_usage = row.column_text(7);
    d.children_usage = row.column_text(8);
    d.contraindications = row.column_text(9);
    d.precautions = row.column_text(10);
    d.interactions = row.column_text(11);
    d.adverse_reactions = row.column_text(12);
    d.how_supplied = row.column_text(13);
    return d;
}

void bind_drug_fields(Statement& stmt, const DrugRecord& d, const std::string& key) {
    stmt.bind(1, d.name)
        .bind(2, key)
        .bind(3, d.legal_class)
        .bind(4, d.manufacturer)
        .bind(5, d.pharmacological_class)
        .bind(6, d.general_description)
        .bind(7, d.indications)
        .bind(8, d.adult_usage)
        .bind(9, d.children_usage)
        .bind(10, d.contraindications)
        .bind(11, d.precautions)
        .bind(12, d.interactions)
        .bind(13, d.adverse_reactions)
        .bind(14, d.how_supplied);
}

std::string name_key(std::string_view name) { return to_lower(trim(name)); }

TermSet read_terms(const std::string& json_text) {
    const auto parsed = nlohmann::json::parse(json_text);
    return parsed.get<TermSet>();
}

PatientRecord read_patient(const Statement& row) {
    PatientRecord p;
    p.pat_id = PatientId{row.column_int64(0)};
    p.registered_by = row.column_text(1);
    p.fullname = row.column_text(2);
    p.phone = row.column_text(3);
    p.dob = parse_date(row.column_text(4));
    p.address = row.column_text(5);
    p.drug_allergy = read_terms(row.column_text(6));
    p.occupation = row.column_text(7);
    if (auto pharm = row.column_opt_int64(8)) p.default_pharmacy = PharmacyId{*pharm};
    if (!row.is_null(9)) p.fingerprint_template = normalize_template(row.column_blob(9));
    return p;
}

ConsultationNote read_note(const Statement& row) {
    return ConsultationNote{NoteId{row.column_int64(0)}, PatientId{row.column_int64(1)},
                            row.column_text(2),         row.column_text(3),
                            row.column_text(4),         from_millis(row.column_int64(5))};
}

Pharmacy read_pharmacy(const Statement& row) {
    return Pharmacy{PharmacyId{row.column_int64(0)}, row.column_text(1), row.column_text(2),
                    row.column_text(3), row.column_text(4)};
}

}  // namespace

DrugCatalog::DrugCatalog(std::vector<DrugRecord> drugs) {
    for (auto& d : drugs) {
        const auto id = d.drug_id;
        drugs_.emplace(id, std::move(d));
    }
}

const DrugRecord* DrugCatalog::find(DrugId id) const noexcept {
    auto it = drugs_.find(id);
    return it == drugs_.end() ? nullptr : &it->second;
}

bool is_valid_email(std::string_view email) noexcept {
    const auto at = email.find('@');
    if (at == std::string_view::npos || at == 0 || email.find('@', at + 1) != std::string_view::npos) {
        return false;
    }
    const auto domain = email.substr(at + 1);
    const auto dot = domain.find('.');
    if (dot == std::string_view::npos || dot == 0 || domain.back() == '.') return false;
    return std::none_of(email.begin(), email.end(),
                        [](unsigned char c) { return c <= ' ' || c == 0x7f; });
}

TermSet parse_allergies(std::string_view text) { return normalize_terms(text); }

KnowledgeBase::KnowledgeBase(Database& db, AuthService& auth, std::shared_ptr<const Clock> clock)
    : db_(db), auth_(auth), clock_(std::move(clock)) {}

// ---------------------------------------------------------------------------
// Drugs

DrugId KnowledgeBase::upsert_drug(const Session& session, DrugRecord drug) {
    auth_.require_role(session, UserType::Physician);
    return db_.transact([&] { return upsert_locked(std::move(drug), false); });
}

DrugId KnowledgeBase::upsert_locked(DrugRecord drug, bool create_with_id) {
    const auto key = name_key(drug.name);
    if (key.empty()) throw Error(ErrorCode::InvalidArgument, "drug name must be non-empty");

    bool exists = false;
    if (drug.drug_id.valid()) {
        auto probe = db_.prepare("SELECT 1 FROM DrugList WHERE drug_id = ?");
        probe.bind(1, drug.drug_id.value);
        exists = probe.step();
        if (!exists && !create_with_id) {
            throw Error(ErrorCode::NotFound,
                        "no such drug: " + std::to_string(drug.drug_id.value));
        }
    }

    auto clash = db_.prepare("SELECT drug_id FROM DrugList WHERE name_key = ?");
    clash.bind(1, key);
    if (clash.step() && DrugId{clash.column_int64(0)} != drug.drug_id) {
        throw Error(ErrorCode::DuplicateName, "drug name already registered: " + drug.name,
                    nlohmann::json{{"names", {drug.name}}});
    }

    if (exists) {
        auto stmt = db_.prepare(
            "UPDATE DrugList SET name=?, name_key=?, legal_class=?, manufacturer=?, "
            "pharmacological_class=?, general_description=?, indications=?, adult_usage=?, "
            "children_usage=?, contraindications=?, precautions=?, interactions=?, "
            "adverse_reactions=?, how_supplied=? WHERE drug_id=?");
        bind_drug_fields(stmt, drug, key);
        stmt.bind(15, drug.drug_id.value);
        stmt.run();
    } else {
        auto stmt = db_.prepare(
            "INSERT INTO DrugList(name, name_key, legal_class, manufacturer, pharmacological_class, "
            "general_description, indications, adult_usage, children_usage, contraindications, "
            "precautions, interactions, adverse_reactions, how_supplied, drug_id) "
            "VALUES(?,?,?,?,?,?,?,?,?,?,?,?,?,?,?)");
        bind_drug_fields(stmt, drug, key);
        if (drug.drug_id.valid()) {
            stmt.bind(15, drug.drug_id.value);
        } else {
            stmt.bind_null(15);
        }
        stmt.run();
        drug.drug_id = DrugId{db_.last_insert_rowid()};
    }
    db_.exec("UPDATE meta SET value = value + 1 WHERE key = 'drug_registry_version'");
    return drug.drug_id;
}

DrugRecord KnowledgeBase::get_drug_info(DrugId id) {
    auto drug = find_drug(id);
    if (!drug) throw Error(ErrorCode::NotFound, "no such drug: " + std::to_string(id.value));
    return *std::move(drug);
}

std::optional<DrugRecord> KnowledgeBase::find_drug(DrugId id) {
    return db_.transact([&]() -> std::optional<DrugRecord> {
        auto stmt = db_.prepare(std::string("SELECT ") + kDrugColumns +
                                " FROM DrugList WHERE drug_id = ?");
        stmt.bind(1, id.value);
        if (!stmt.step()) return std::nullopt;
        return read_drug(stmt);
    });
}

void KnowledgeBase::withdraw_drug(const Session& session, DrugId id) {
    auth_.require_role(session, UserType::Physician);
    db_.transact([&] {
        auto stmt = db_.prepare("DELETE FROM DrugList WHERE drug_id = ?");
        stmt.bind(1, id.value);
        stmt.run();
        if (db_.changes() == 0) {
            throw Error(ErrorCode::NotFound, "no such drug: " + std::to_string(id.value));
        }
        db_.exec("UPDATE meta SET value = value + 1 WHERE key = 'drug_registry_version'");
    });
}

std::vector<DrugRecord> KnowledgeBase::list_drugs() {
    return db_.transact([&] {
        std::vector<DrugRecord> out;
        auto stmt = db_.prepare(std::string("SELECT ") + kDrugColumns +
                                " FROM DrugList ORDER BY name_key, drug_id");
        while (stmt.step()) out.push_back(read_drug(stmt));
        return out;
    });
}

DrugCatalog KnowledgeBase::catalog() { return DrugCatalog(list_drugs()); }

std::int64_t KnowledgeBase::registry_version() {
    return db_.transact([&] {
        auto stmt = db_.prepare("SELECT value FROM meta WHERE key = 'drug_registry_version'");
        stmt.step();
        return stmt.column_int64(0);
    });
}

std::size_t KnowledgeBase::seed_drugs(std::vector<DrugRecord> drugs) {
    return db_.transact([&] {
        // Collect every clash up front so the operator sees all of them.
        std::map<std::string, std::vector<std::size_t>> by_key;
        for (std::size_t i = 0; i < drugs.size(); ++i) {
            const auto key = name_key(drugs[i].name);
            if (key.empty()) {
                throw Error(ErrorCode::InvalidArgument,
                            "record " + std::to_string(i) + " has an empty name");
            }
            by_key[key].push_back(i);
        }
        std::vector<std::string> duplicates;
        for (const auto& [key, indices] : by_key) {
            bool clash = indices.size() > 1;
            if (!clash) {
                auto stmt = db_.prepare("SELECT drug_id FROM DrugList WHERE name_key = ?");
                stmt.bind(1, key);
                clash = stmt.step() && DrugId{stmt.column_int64(0)} != drugs[indices[0]].drug_id;
            }
            if (clash) duplicates.push_back(drugs[indices[0]].name);
        }
        if (!duplicates.empty()) {
            std::string message = "duplicate drug names:";
            for (const auto& n : duplicates) message += " " + n;
            throw Error(ErrorCode::DuplicateName, message, nlohmann::json{{"names", duplicates}});
        }
        for (auto& d : drugs) upsert_locked(std::move(d), true);
        return drugs.size();
    });
}

// ---------------------------------------------------------------------------
// Pharmacies

Pharmacy KnowledgeBase::register_pharmacy(const Session& admin_session, Pharmacy pharmacy) {
    auth_.require_role(admin_session, UserType::Administrator);
    return add_pharmacy(std::move(pharmacy));
}

Pharmacy KnowledgeBase::add_pharmacy(Pharmacy pharmacy) {
    return db_.transact([&] { return add_pharmacy_locked(std::move(pharmacy)); });
}

Pharmacy KnowledgeBase::add_pharmacy_locked(Pharmacy pharmacy) {
    const auto key = name_key(pharmacy.name);
    if (key.empty()) throw Error(ErrorCode::InvalidArgument, "pharmacy name must be non-empty");
    if (!pharmacy.email.empty() && !is_valid_email(pharmacy.email)) {
        throw Error(ErrorCode::InvalidArgument, "invalid email: " + pharmacy.email);
    }
    auto clash = db_.prepare("SELECT 1 FROM Pharmacist WHERE name_key = ?");
    clash.bind(1, key);
    if (clash.step()) {
        throw Error(ErrorCode::DuplicateName, "pharmacy already registered: " + pharmacy.name);
    }
    auto stmt = db_.prepare(
        "INSERT INTO Pharmacist(name, name_key, address, phone, email) VALUES(?,?,?,?,?)");
    stmt.bind(1, pharmacy.name)
        .bind(2, key)
        .bind(3, pharmacy.address)
        .bind(4, pharmacy.phone)
        .bind(5, pharmacy.email);
    stmt.run();
    pharmacy.pharm_id = PharmacyId{db_.last_insert_rowid()};
    return pharmacy;
}

std::optional<Pharmacy> KnowledgeBase::find_pharmacy(PharmacyId id) {
    return db_.transact([&]() -> std::optional<Pharmacy> {
        auto stmt = db_.prepare(
            "SELECT pharm_id, name, address, phone, email FROM Pharmacist WHERE pharm_id = ?");
        stmt.bind(1, id.value);
        if (!stmt.step()) return std::nullopt;
        return read_pharmacy(stmt);
    });
}

std::vector<Pharmacy> KnowledgeBase::list_pharmacies() {
    return db_.transact([&] {
        std::vector<Pharmacy> out;
        auto stmt = db_.prepare(
            "SELECT pharm_id, name, address, phone, email FROM Pharmacist ORDER BY name_key");
        while (stmt.step()) out.push_back(read_pharmacy(stmt));
        return out;
    });
}

// ---------------------------------------------------------------------------
// Patients

PatientRecord KnowledgeBase::register_patient(const Session& session,
                                              const PatientRegistration& reg) {
    auth_.require_role(session, UserType::Physician);
    if (trim(reg.fullname).empty()) {
        throw Error(ErrorCode::InvalidArgument, "patient fullname must be non-empty");
    }
    if (!reg.dob.ok() || reg.dob > clock_->today() ||
        reg.dob < std::chrono::year_month_day{std::chrono::year{1880} / 1 / 1}) {
        throw Error(ErrorCode::InvalidDob, "date of birth is invalid or in the future");
    }
    if (reg.fingerprint && reg.fingerprint->bytes.empty()) {
        throw Error(ErrorCode::EmptyScan, "fingerprint scan is empty");
    }

    return db_.transact([&] {
        if (reg.default_pharmacy && !find_pharmacy(*reg.default_pharmacy)) {
            throw Error(ErrorCode::UnregisteredPharmacy, "default pharmacy is not registered");
        }
        PatientRecord p;
        p.registered_by = session.user_id;
        p.fullname = trim(reg.fullname);
        p.phone = reg.phone;
        p.dob = reg.dob;
        p.address = reg.address;
        p.drug_allergy = parse_allergies(reg.drug_allergy);
        p.occupation = reg.occupation;
        p.default_pharmacy = reg.default_pharmacy;
        if (reg.fingerprint) p.fingerprint_template = normalize_template(reg.fingerprint->bytes);

        auto stmt = db_.prepare(
            "INSERT INTO patient(use_id, fullname, fullname_key, phone, dob, address, drug_allergy, "
            "occupation, pharmacist, fingerprint) VALUES(?,?,?,?,?,?,?,?,?,?)");
        stmt.bind(1, p.registered_by)
            .bind(2, p.fullname)
            .bind(3, to_lower(p.fullname))
            .bind(4, p.phone)
            .bind(5, format_date(p.dob))
            .bind(6, p.address)
            .bind(7, nlohmann::json(p.drug_allergy).dump())
            .bind(8, p.occupation);
        if (p.default_pharmacy) {
            stmt.bind(9, p.default_pharmacy->value);
        } else {
            stmt.bind_null(9);
        }
        if (p.fingerprint_template) {
            stmt.bind(10, std::span<const std::uint8_t>(*p.fingerprint_template));
        } else {
            stmt.bind_null(10);
        }
        stmt.run();
        p.pat_id = PatientId{db_.last_insert_rowid()};
        return p;
    });
}

PatientRecord KnowledgeBase::get_patient(PatientId id) {
    return db_.transact([&] {
        auto stmt = db_.prepare(std::string("SELECT ") + kPatientColumns +
                                " FROM patient WHERE pat_id = ?");
        stmt.bind(1, id.value);
        if (!stmt.step()) {
            throw Error(ErrorCode::PatientNotFound, "no such patient: " + std::to_string(id.value));
        }
        return read_patient(stmt);
    });
}

std::vector<PatientRecord> KnowledgeBase::list_patients() {
    return db_.transact([&] {
        std::vector<PatientRecord> out;
        auto stmt = db_.prepare(std::string("SELECT ") + kPatientColumns +
                                " FROM patient ORDER BY pat_id");
        while (stmt.step()) out.push_back(read_patient(stmt));
        return out;
    });
}

void KnowledgeBase::require_patient(PatientId id) {
    auto stmt = db_.prepare("SELECT 1 FROM patient WHERE pat_id = ?");
    stmt.bind(1, id.value);
    if (!stmt.step()) {
        throw Error(ErrorCode::PatientNotFound, "no such patient: " + std::to_string(id.value));
    }
}

void KnowledgeBase::set_default_pharmacy(PatientId id, PharmacyId pharmacy) {
    db_.transact([&] {
        require_patient(id);
        if (!find_pharmacy(pharmacy)) {
            throw Error(ErrorCode::UnregisteredPharmacy, "pharmacy is not registered");
        }
        auto stmt = db_.prepare("UPDATE patient SET pharmacist = ? WHERE pat_id = ?");
        stmt.bind(1, pharmacy.value).bind(2, id.value);
        stmt.run();
    });
}

std::vector<PatientSummary> KnowledgeBase::search_patients(std::string_view prefix) {
    if (prefix.empty()) return {};
    return db_.transact([&] {
        std::vector<PatientSummary> out;
        auto stmt = db_.prepare(
            "SELECT pat_id, fullname FROM patient "
            "WHERE substr(fullname_key, 1, length(?1)) = ?1 "
            "ORDER BY fullname_key, pat_id LIMIT ?2");
        stmt.bind(1, to_lower(prefix)).bind(2, static_cast<std::int64_t>(kSearchLimit));
        while (stmt.step()) {
            out.push_back(PatientSummary{PatientId{stmt.column_int64(0)}, stmt.column_text(1)});
        }
        return out;
    });
}

// ---------------------------------------------------------------------------
// Consultations and history

ConsultationNote KnowledgeBase::record_consultation(const Session& session, PatientId patient,
                                                    std::string_view nature,
                                                    std::string_view description) {
    auth_.require_role(session, UserType::Physician);
    if (normalize_terms(nature).empty()) {
        throw Error(ErrorCode::InvalidArgument, "consultation nature must contain a term");
    }
    return db_.transact([&] {
        require_patient(patient);
        ConsultationNote note{NoteId{}, patient, session.user_id, std::string(nature),
                              std::string(description), clock_->now()};
        auto stmt = db_.prepare(
            "INSERT INTO consultation(pat_id, author, nature, description, recorded_at) "
            "VALUES(?,?,?,?,?)");
        stmt.bind(1, note.pat_id.value)
            .bind(2, note.author)
            .bind(3, note.nature)
            .bind(4, note.description)
            .bind(5, to_millis(note.recorded_at));
        stmt.run();
        note.note_id = NoteId{db_.last_insert_rowid()};
        return note;
    });
}

std::vector<ConsultationNote> KnowledgeBase::consultations(PatientId patient) {
    return db_.transact([&] {
        require_patient(patient);
        std::vector<ConsultationNote> out;
        auto stmt = db_.prepare(
            "SELECT note_id, pat_id, author, nature, description, recorded_at FROM consultation "
            "WHERE pat_id = ? ORDER BY recorded_at, note_id");
        stmt.bind(1, patient.value);
        while (stmt.step()) out.push_back(read_note(stmt));
        return out;
    });
}

std::optional<ConsultationNote> KnowledgeBase::find_note(NoteId id) {
    return db_.transact([&]() -> std::optional<ConsultationNote> {
        auto stmt = db_.prepare(
            "SELECT note_id, pat_id, author, nature, description, recorded_at FROM consultation "
            "WHERE note_id = ?");
        stmt.bind(1, id.value);
        if (!stmt.step()) return std::nullopt;
        return read_note(stmt);
    });
}

std::vector<HistoryEntry> KnowledgeBase::get_history(PatientId patient) {
    return db_.transact([&] {
        std::vector<HistoryEntry> out;
        for (auto& note : consultations(patient)) {
            const auto at = note.recorded_at;
            out.push_back(HistoryEntry{at, std::move(note)});
        }
        auto stmt = db_.prepare(std::string("SELECT ") + rows::kMedicationColumns +
                                ", p.transmitted_at FROM Medication m "
                                "JOIN prescription p ON p.rx_id = m.rx_id "
                                "WHERE m.pat_id = ? AND p.state IN ('Transmitted', 'Dispensed') "
                                "ORDER BY p.transmitted_at, m.med_id");
        stmt.bind(1, patient.value);
        while (stmt.step()) {
            const auto at = from_millis(stmt.column_int64(rows::kMedicationColumnCount));
            out.push_back(HistoryEntry{at, rows::read_medication(stmt)});
        }
        // Notes were appended first, so a stable sort keeps them ahead on ties.
        std::stable_sort(out.begin(), out.end(),
                         [](const HistoryEntry& a, const HistoryEntry& b) { return a.at < b.at; });
        return out;
    });
}

}  // namespace rxledger
