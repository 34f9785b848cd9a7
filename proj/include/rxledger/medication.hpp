#pragma once

#include "rxledger/types.hpp"

#include <optional>
#include <string>

namespace rxledger {

/// One ordered drug with its full sig; a row of the Medication table.
struct MedicationItem {
    MedId med_id;
    RxId rx_id;
    PatientId pat_id;
    DrugId drug_id;
    /// Display copies taken when the item was drafted.
    std::string pat_name;
    std::string med_name;
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
    std::optional<Date> date;
    std::optional<PharmacyId> pharmacist;

    friend bool operator==(const MedicationItem&, const MedicationItem&) = default;
};

/// Dosage, frequency, route and quantity are all present.
bool has_complete_sig(const MedicationItem& item) noexcept;

}  // namespace rxledger
