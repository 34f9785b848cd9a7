#include "rxledger/cbr.hpp"

#include "rows.hpp"
#include "rxledger/error.hpp"
#include "rxledger/validator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace rxledger {

std::string_view to_string(AgeBand band) noexcept {
    switch (band) {
        case AgeBand::Infant: return "Infant";
        case AgeBand::Child: return "Child";
        case AgeBand::Adolescent: return "Adolescent";
        case AgeBand::Adult: return "Adult";
        case AgeBand::Elderly: return "Elderly";
    }
    return "Adult";
}

AgeBand band_for_age(int years) noexcept {
    if (years <= 1) return AgeBand::Infant;
    if (years <= 11) return AgeBand::Child;
    if (years <= 17) return AgeBand::Adolescent;
    if (years <= 64) return AgeBand::Adult;
    return AgeBand::Elderly;
}

AgeBand age_band(Date dob, Date on) {
    if (dob > on) throw Error(ErrorCode::FutureDob, "date of birth is after " + format_date(on));
    return band_for_age(whole_years(dob, on));
}

double band_affinity(AgeBand a, AgeBand b) noexcept {
    const int gap = std::abs(static_cast<int>(a) - static_cast<int>(b));
    if (gap == 0) return 1.0;
    if (gap == 1) return 0.5;
    return 0.0;
}

double jaccard(const TermSet& a, const TermSet& b) noexcept {
    std::size_t shared = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++shared;
            ++ia;
            ++ib;
        }
    }
    const std::size_t united = a.size() + b.size() - shared;
    return united == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(united);
}

void validate(const RetrievalParams& params) {
    if (params.k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    if (!(params.threshold >= 0.0 && params.threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "threshold must lie in [0,1]");
    }
    const auto& w = params.weights;
    if (!(w.diagnosis >= 0.0 && w.age_band >= 0.0) ||
        std::abs(w.diagnosis + w.age_band - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "similarity weights must be >= 0 and sum to 1");
    }
}

double similarity(const CaseQuery& query, const Case& c, const SimilarityWeights& weights) {
    return weights.diagnosis * jaccard(query.diagnosis_terms, c.diagnosis_terms) +
           weights.age_band * band_affinity(query.age_band, c.age_band);
}

std::vector<ScoredCase> retrieve(std::span<const Case> memory, const CaseQuery& query,
                                 const RetrievalParams& params, const DrugCatalog& drugs) {
    validate(params);
    std::vector<ScoredCase> candidates;
    for (const auto& c : memory) {
        const auto* drug = drugs.find(c.drug_id);
        if (!drug || check_allergy_conflict(*drug, query.allergy_set)) continue;
        const double score = similarity(query, c, params.weights);
        if (score >= params.threshold) candidates.push_back(ScoredCase{c, score});
    }
    const auto better = [](const ScoredCase& a, const ScoredCase& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.case_record.created_at != b.case_record.created_at) {
            return a.case_record.created_at > b.case_record.created_at;
        }
        return a.case_record.case_id < b.case_record.case_id;
    };
    const auto keep = std::min(params.k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), better);
    candidates.resize(keep);
    return candidates;
}

Case encode_case(const ConsultationNote& note, const PatientRecord& patient,
                 const MedicationItem& item, Timestamp retained_at) {
    if (!has_complete_sig(item)) {
        throw Error(ErrorCode::IncompleteSig, "cannot encode an incomplete sig as a case");
    }
    Case c;
    c.diagnosis_terms = normalize_terms(note.nature + " " + note.description);
    if (c.diagnosis_terms.empty()) {
        throw Error(ErrorCode::InvalidArgument, "consultation note has no diagnosis terms");
    }
    c.age_band = age_band(patient.dob, item.date.value_or(to_date(retained_at)));
    c.allergy_set = patient.drug_allergy;
    c.drug_id = item.drug_id;
    c.sig_bundle = SigBundle{item.dosage, item.freq,       item.route, *item.num,
                             item.refill, item.substitute, item.sig};
    c.created_at = retained_at;
    return c;
}

CaseQuery make_query(const ConsultationNote& note, const PatientRecord& patient, Date on) {
    CaseQuery q;
    q.diagnosis_terms = normalize_terms(note.nature + " " + note.description);
    q.age_band = age_band(patient.dob, on);
    q.allergy_set = patient.drug_allergy;
    return q;
}

AdaptedDraft adapt(const Case& c, const PatientRecord& patient, const DrugCatalog& drugs,
                   Date today) {
    const auto* drug = drugs.find(c.drug_id);
    if (!drug) {
        throw Error(ErrorCode::DrugWithdrawn,
                    "drug " + std::to_string(c.drug_id.value) + " is no longer in the registry");
    }
    AdaptedDraft out;
    out.source_case = c.case_id;
    out.patient_band = age_band(patient.dob, today);
    out.pediatric = out.patient_band == AgeBand::Infant || out.patient_band == AgeBand::Child;
    out.usage_guidance = out.pediatric ? drug->children_usage : drug->adult_usage;

    auto& item = out.item;
    item.pat_id = patient.pat_id;
    item.pat_name = patient.fullname;
    item.drug_id = drug->drug_id;
    item.med_name = drug->name;
    item.dosage = c.sig_bundle.dosage;
    item.freq = c.sig_bundle.freq;
    item.route = c.sig_bundle.route;
    item.num = c.sig_bundle.num;
    item.refill = c.sig_bundle.refill;
    item.substitute = c.sig_bundle.substitute;
    item.sig = c.sig_bundle.sig;
    if (out.pediatric && c.age_band != out.patient_band) {
        item.note = "Pediatric patient; adapted from a " + std::string(to_string(c.age_band)) +
                    " case. Check children's usage.";
    }
    return out;
}

// ---------------------------------------------------------------------------
// CaseMemory

namespace {

constexpr const char* kCaseColumns =
    "case_id, diagnosis_terms, age_band, allergy_set, drug_id, dosage, freq, route, num, refill, "
    "substitute, sig, created_at";

Case read_case(const Statement& row) {
    Case c;
    c.case_id = CaseId{row.column_int64(0)};
    c.diagnosis_terms = nlohmann::json::parse(row.column_text(1)).get<TermSet>();
    c.age_band = static_cast<AgeBand>(row.column_int64(2));
    c.allergy_set = nlohmann::json::parse(row.column_text(3)).get<TermSet>();
    c.drug_id = DrugId{row.column_int64(4)};
    c.sig_bundle.dosage = row.column_text(5);
    c.sig_bundle.freq = row.column_text(6);
    c.sig_bundle.route = row.column_text(7);
    c.sig_bundle.num = static_cast<int>(row.column_int64(8));
    c.sig_bundle.refill = static_cast<int>(row.column_int64(9));
    c.sig_bundle.substitute = row.column_int64(10) != 0;
    c.sig_bundle.sig = row.column_text(11);
    c.created_at = from_millis(row.column_int64(12));
    return c;
}

}  // namespace

CaseId CaseMemory::retain(Case c, std::optional<MedId> source) {
    if (c.diagnosis_terms.empty()) {
        throw Error(ErrorCode::InvalidArgument, "a case needs diagnosis terms");
    }
    return db_.transact([&] {
        auto stmt = db_.prepare(
            "INSERT INTO case_memory(diagnosis_terms, age_band, allergy_set, drug_id, dosage, freq, "
            "route, num, refill, substitute, sig, created_at, source_med_id) "
            "VALUES(?,?,?,?,?,?,?,?,?,?,?,?,?)");
        stmt.bind(1, nlohmann::json(c.diagnosis_terms).dump())
            .bind(2, static_cast<int>(c.age_band))
            .bind(3, nlohmann::json(c.allergy_set).dump())
            .bind(4, c.drug_id.value)
            .bind(5, c.sig_bundle.dosage)
            .bind(6, c.sig_bundle.freq)
            .bind(7, c.sig_bundle.route)
            .bind(8, c.sig_bundle.num)
            .bind(9, c.sig_bundle.refill)
            .bind(10, c.sig_bundle.substitute)
            .bind(11, c.sig_bundle.sig)
            .bind(12, to_millis(c.created_at));
        if (source) {
            stmt.bind(13, source->value);
        } else {
            stmt.bind_null(13);
        }
        stmt.run();
        return CaseId{db_.last_insert_rowid()};
    });
}

std::vector<Case> CaseMemory::all() {
    return db_.transact([&] {
        std::vector<Case> out;
        auto stmt = db_.prepare(std::string("SELECT ") + kCaseColumns +
                                " FROM case_memory ORDER BY case_id");
        while (stmt.step()) out.push_back(read_case(stmt));
        return out;
    });
}

std::optional<Case> CaseMemory::find(CaseId id) {
    return db_.transact([&]() -> std::optional<Case> {
        auto stmt = db_.prepare(std::string("SELECT ") + kCaseColumns +
                                " FROM case_memory WHERE case_id = ?");
        stmt.bind(1, id.value);
        if (!stmt.step()) return std::nullopt;
        return read_case(stmt);
    });
}

std::size_t CaseMemory::size() {
    return db_.transact([&] {
        auto stmt = db_.prepare("SELECT COUNT(*) FROM case_memory");
        stmt.step();
        return static_cast<std::size_t>(stmt.column_int64(0));
    });
}

std::vector<ScoredCase> CaseMemory::retrieve(const CaseQuery& query, const RetrievalParams& params,
                                             const DrugCatalog& drugs) {
    const auto memory = all();
    return rxledger::retrieve(memory, query, params, drugs);
}

std::vector<MedicationItem> CaseMemory::patient_patterns(PatientId patient) {
    return db_.transact([&] {
        auto exists = db_.prepare("SELECT 1 FROM patient WHERE pat_id = ?");
        exists.bind(1, patient.value);
        if (!exists.step()) {
            throw Error(ErrorCode::PatientNotFound,
                        "no such patient: " + std::to_string(patient.value));
        }
        std::vector<MedicationItem> out;
        auto stmt = db_.prepare(std::string("SELECT ") + rows::kMedicationColumns +
                                " FROM Medication m JOIN prescription p ON p.rx_id = m.rx_id "
                                "WHERE m.pat_id = ? AND p.state IN ('Transmitted', 'Dispensed') "
                                "ORDER BY p.transmitted_at DESC, m.med_id DESC");
        stmt.bind(1, patient.value);
        while (stmt.step()) out.push_back(rows::read_medication(stmt));
        return out;
    });
}

}  // namespace rxledger
