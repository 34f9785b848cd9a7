#pragma once

#include "rxledger/knowledge_base.hpp"
#include "rxledger/medication.hpp"
#include "rxledger/store.hpp"
#include "rxledger/text.hpp"
#include "rxledger/types.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rxledger {

/// Infant 0-1, Child 2-11, Adolescent 12-17, Adult 18-64, Elderly 65+.
enum class AgeBand { Infant, Child, Adolescent, Adult, Elderly };

std::string_view to_string(AgeBand band) noexcept;

/// Whole-year age of `dob` on `on`, banded. Throws FutureDob when dob > on.
AgeBand age_band(Date dob, Date on);
AgeBand band_for_age(int years) noexcept;

/// 1 for equal bands, 0.5 for adjacent, 0 otherwise.
double band_affinity(AgeBand a, AgeBand b) noexcept;

/// |a ∩ b| / |a ∪ b|; 0 when both are empty.
double jaccard(const TermSet& a, const TermSet& b) noexcept;

struct SigBundle {
    std::string dosage;
    std::string freq;
    std::string route;
    int num = 0;
    int refill = 0;
    bool substitute = false;
    std::string sig;

    friend bool operator==(const SigBundle&, const SigBundle&) = default;
};

/// A past successful prescription of one drug.
struct Case {
    CaseId case_id;
    TermSet diagnosis_terms;
    AgeBand age_band = AgeBand::Adult;
    TermSet allergy_set;
    DrugId drug_id;
    SigBundle sig_bundle;
    Timestamp created_at;

    friend bool operator==(const Case&, const Case&) = default;
};

struct CaseQuery {
    TermSet diagnosis_terms;
    AgeBand age_band = AgeBand::Adult;
    TermSet allergy_set;
};

struct SimilarityWeights {
    double diagnosis = 0.8;
    double age_band = 0.2;
};

struct RetrievalParams {
    std::size_t k = 5;
    double threshold = 0.4;
    SimilarityWeights weights;
};

/// Throws InvalidArgument unless k >= 1, threshold in [0,1], weights
/// non-negative and summing to 1.
void validate(const RetrievalParams& params);

struct ScoredCase {
    Case case_record;
    double score = 0.0;

    friend bool operator==(const ScoredCase&, const ScoredCase&) = default;
};

double similarity(const CaseQuery& query, const Case& c, const SimilarityWeights& weights = {});

/// Drops cases whose drug conflicts with the query's allergies (or is no
/// longer in `drugs`), keeps scores >= threshold, and returns the top k by
/// score, then newer created_at, then smaller case_id.
std::vector<ScoredCase> retrieve(std::span<const Case> memory, const CaseQuery& query,
                                 const RetrievalParams& params, const DrugCatalog& drugs);

/// Encodes a dispensed item; case_id is left unset. The age band uses the
/// item's prescription date (falling back to `retained_at`), and
/// created_at is `retained_at`. Throws IncompleteSig.
Case encode_case(const ConsultationNote& note, const PatientRecord& patient,
                 const MedicationItem& item, Timestamp retained_at);

/// Query for a consultation of `patient` on `on`.
CaseQuery make_query(const ConsultationNote& note, const PatientRecord& patient, Date on);

struct AdaptedDraft {
    MedicationItem item;
    CaseId source_case;
    AgeBand patient_band = AgeBand::Adult;
    /// Patient is an Infant or Child.
    bool pediatric = false;
    /// children_usage for pediatric patients, otherwise adult_usage.
    std::string usage_guidance;
};

/// Rebinds a case's solution to `patient`. Throws DrugWithdrawn.
AdaptedDraft adapt(const Case& c, const PatientRecord& patient, const DrugCatalog& drugs,
                   Date today);

/// Append-only persistent case memory.
class CaseMemory {
public:
    explicit CaseMemory(Database& db) : db_(db) {}

    /// Appends `c`; `source` ties the case to the dispensed medication row
    /// so it can never be retained twice.
    CaseId retain(Case c, std::optional<MedId> source = std::nullopt);
    std::vector<Case> all();
    std::optional<Case> find(CaseId id);
    std::size_t size();

    std::vector<ScoredCase> retrieve(const CaseQuery& query, const RetrievalParams& params,
                                     const DrugCatalog& drugs);

    /// Past transmitted or dispensed items of `patient`, newest first.
    /// Throws PatientNotFound.
    std::vector<MedicationItem> patient_patterns(PatientId patient);

private:
    Database& db_;
};

}  // namespace rxledger
