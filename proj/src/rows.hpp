#pragma once

// Row mapping shared by the modules that read the Medication table.

#include "rxledger/medication.hpp"
#include "rxledger/store.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rxledger::rows {

inline constexpr const char* kMedicationColumns =
    "m.med_id, m.rx_id, m.pat_id, m.drug_id, m.pat_name, m.med_name, m.num, m.refill, "
    "m.substitute, m.dosage, m.freq, m.route, m.sig, m.note, m.start_d, m.refill_d, m.renew_d, "
    "m.pharmacist, m.date";
inline constexpr int kMedicationColumnCount = 19;

/// Reads columns [offset, offset + kMedicationColumnCount).
MedicationItem read_medication(const Statement& row, int offset = 0);

/// Inserts `item` (med_id ignored) and returns the stored copy with its id.
MedicationItem insert_medication(Database& db, MedicationItem item);

std::optional<Date> opt_date(const Statement& row, int col);
std::optional<std::string> date_text(const std::optional<Date>& d);

}  // namespace rxledger::rows
