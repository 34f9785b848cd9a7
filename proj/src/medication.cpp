#include "rxledger/medication.hpp"

#include "rows.hpp"
#include "rxledger/text.hpp"

namespace rxledger {

bool has_complete_sig(const MedicationItem& item) noexcept {
    return !trim(item.dosage).empty() && !trim(item.freq).empty() && !trim(item.route).empty() &&
           item.num.has_value() && *item.num > 0;
}

namespace rows {

std::optional<Date> opt_date(const Statement& row, int col) {
    if (row.is_null(col)) return std::nullopt;
    return parse_date(row.column_text(col));
}

std::optional<std::string> date_text(const std::optional<Date>& d) {
    if (!d) return std::nullopt;
    return format_date(*d);
}

MedicationItem read_medication(const Statement& row, int offset) {
    MedicationItem m;
    int c = offset;
    m.med_id = MedId{row.column_int64(c++)};
    m.rx_id = RxId{row.column_int64(c++)};
    m.pat_id = PatientId{row.column_int64(c++)};
    m.drug_id = DrugId{row.column_int64(c++)};
    m.pat_name = row.column_text(c++);
    m.med_name = row.column_text(c++);
    if (auto num = row.column_opt_int64(c++)) m.num = static_cast<int>(*num);
    m.refill = static_cast<int>(row.column_int64(c++));
    m.substitute = row.column_int64(c++) != 0;
    m.dosage = row.column_text(c++);
    m.freq = row.column_text(c++);
    m.route = row.column_text(c++);
    m.sig = row.column_text(c++);
    m.note = row.column_text(c++);
    m.start_d = opt_date(row, c++);
    m.refill_d = opt_date(row, c++);
    m.renew_d = opt_date(row, c++);
    if (auto pharm = row.column_opt_int64(c++)) m.pharmacist = PharmacyId{*pharm};
    m.date = opt_date(row, c++);
    return m;
}

MedicationItem insert_medication(Database& db, MedicationItem item) {
    auto stmt = db.prepare(
        "INSERT INTO Medication(rx_id, pat_id, drug_id, pat_name, med_name, num, refill, "
        "substitute, dosage, freq, route, sig, note, start_d, refill_d, renew_d, pharmacist, date) "
        "VALUES(?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?)");
    stmt.bind(1, item.rx_id.value)
        .bind(2, item.pat_id.value)
        .bind(3, item.drug_id.value)
        .bind(4, item.pat_name)
        .bind(5, item.med_name)
        .bind(6, item.num)
        .bind(7, item.refill)
        .bind(8, item.substitute)
        .bind(9, item.dosage)
        .bind(10, item.freq)
        .bind(11, item.route)
        .bind(12, item.sig)
        .bind(13, item.note)
        .bind(14, date_text(item.start_d))
        .bind(15, date_text(item.refill_d))
        .bind(16, date_text(item.renew_d));
    if (item.pharmacist) {
        stmt.bind(17, item.pharmacist->value);
    } else {
        stmt.bind_null(17);
    }
    stmt.bind(18, date_text(item.date));
    stmt.run();
    item.med_id = MedId{db.last_insert_rowid()};
    return item;
}

}  // namespace rows
}  // namespace rxledger
