#include "rxledger/codec.hpp"

#include "rxledger/crypto.hpp"
#include "rxledger/error.hpp"

#include <set>

namespace rxledger {

using nlohmann::json;

namespace {

json opt_date(const std::optional<Date>& d) { return d ? json(format_date(*d)) : json(nullptr); }

json opt_time(const std::optional<Timestamp>& t) {
    return t ? json(format_timestamp(*t)) : json(nullptr);
}

template <class T>
json opt_id(const std::optional<T>& id) {
    return id ? json(id->value) : json(nullptr);
}

const json* member(const json& j, std::string_view key) {
    auto it = j.find(std::string(key));
    if (it == j.end() || it->is_null()) return nullptr;
    return &*it;
}

[[noreturn]] void bad(std::string_view key, std::string_view want) {
    throw Error(ErrorCode::InvalidArgument,
                "field '" + std::string(key) + "' must be " + std::string(want));
}

void require_object(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || a == key;
        if (!ok) throw Error(ErrorCode::InvalidArgument, "unknown field '" + key + "'");
    }
}

std::optional<int> opt_int(const json& j, std::string_view key) {
    const auto* v = member(j, key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) bad(key, "an integer");
    return v->get<int>();
}

std::optional<std::int64_t> opt_int64(const json& j, std::string_view key) {
    const auto* v = member(j, key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) bad(key, "an integer");
    return v->get<std::int64_t>();
}

bool opt_bool(const json& j, std::string_view key, bool fallback) {
    const auto* v = member(j, key);
    if (!v) return fallback;
    if (!v->is_boolean()) bad(key, "a boolean");
    return v->get<bool>();
}

std::optional<Date> parse_opt_date(const json& j, std::string_view key) {
    const auto* v = member(j, key);
    if (!v) return std::nullopt;
    if (!v->is_string()) bad(key, "a YYYY-MM-DD string");
    return parse_date(v->get<std::string>());
}

}  // namespace

std::string require_string(const json& j, std::string_view key) {
    const auto* v = member(j, key);
    if (!v || !v->is_string()) bad(key, "a string");
    return v->get<std::string>();
}

std::string optional_string(const json& j, std::string_view key) {
    const auto* v = member(j, key);
    if (!v) return {};
    if (!v->is_string()) bad(key, "a string");
    return v->get<std::string>();
}

// ---------------------------------------------------------------------------
// Output

void to_json(json& j, const DrugRecord& d) {
    j = json{{"drug_id", d.drug_id.value},
             {"name", d.name},
             {"legal_class", d.legal_class},
             {"manufacturer", d.manufacturer},
             {"pharmacological_class", d.pharmacological_class},
             {"general_description", d.general_description},
             {"indications", d.indications},
             {"adult_usage", d.adult_usage},
             {"children_usage", d.children_usage},
             {"contraindications", d.contraindications},
             {"precautions", d.precautions},
             {"interactions", d.interactions},
             {"adverse_reactions", d.adverse_reactions},
             {"how_supplied", d.how_supplied}};
}

void to_json(json& j, const Pharmacy& p) {
    j = json{{"pharm_id", p.pharm_id.value},
             {"name", p.name},
             {"address", p.address},
             {"phone", p.phone},
             {"email", p.email}};
}

void to_json(json& j, const PatientRecord& p) {
    j = json{{"pat_id", p.pat_id.value},
             {"registered_by", p.registered_by},
             {"fullname", p.fullname},
             {"phone", p.phone},
             {"dob", format_date(p.dob)},
             {"address", p.address},
             {"drug_allergy", p.drug_allergy},
             {"occupation", p.occupation},
             {"default_pharmacy", opt_id(p.default_pharmacy)},
             {"has_fingerprint", p.fingerprint_template.has_value()}};
}

void to_json(json& j, const PatientSummary& p) {
    j = json{{"pat_id", p.pat_id.value}, {"fullname", p.fullname}};
}

void to_json(json& j, const ConsultationNote& n) {
    j = json{{"note_id", n.note_id.value},
             {"pat_id", n.pat_id.value},
             {"author", n.author},
             {"nature", n.nature},
             {"description", n.description},
             {"recorded_at", format_timestamp(n.recorded_at)}};
}

void to_json(json& j, const HistoryEntry& e) {
    if (const auto* note = std::get_if<ConsultationNote>(&e.entry)) {
        j = json{{"kind", "consultation"}, {"at", format_timestamp(e.at)}, {"note", *note}};
    } else {
        j = json{{"kind", "medication"},
                 {"at", format_timestamp(e.at)},
                 {"item", std::get<MedicationItem>(e.entry)}};
    }
}

void to_json(json& j, const MedicationItem& m) {
    j = json{{"med_id", m.med_id.value},
             {"rx_id", m.rx_id.value},
             {"pat_id", m.pat_id.value},
             {"drug_id", m.drug_id.value},
             {"pat_name", m.pat_name},
             {"med_name", m.med_name},
             {"num", m.num ? json(*m.num) : json(nullptr)},
             {"refill", m.refill},
             {"substitute", m.substitute},
             {"dosage", m.dosage},
             {"freq", m.freq},
             {"route", m.route},
             {"sig", m.sig},
             {"note", m.note},
             {"start_d", opt_date(m.start_d)},
             {"refill_d", opt_date(m.refill_d)},
             {"renew_d", opt_date(m.renew_d)},
             {"date", opt_date(m.date)},
             {"pharmacist", opt_id(m.pharmacist)}};
}

void to_json(json& j, const DraftItem& d) {
    j = json{{"drug_id", d.drug_id.value},
             {"num", d.num ? json(*d.num) : json(nullptr)},
             {"refill", d.refill},
             {"substitute", d.substitute},
             {"dosage", d.dosage},
             {"freq", d.freq},
             {"route", d.route},
             {"sig", d.sig},
             {"note", d.note},
             {"start_d", opt_date(d.start_d)},
             {"refill_d", opt_date(d.refill_d)},
             {"renew_d", opt_date(d.renew_d)}};
}

void to_json(json& j, const Prescription& rx) {
    j = json{{"rx_id", rx.rx_id.value},
             {"pat_id", rx.pat_id.value},
             {"note_id", rx.note_id.value},
             {"items", rx.items},
             {"prescriber_user", rx.prescriber_user},
             {"prescriber_no", rx.prescriber_no},
             {"pharmacy", opt_id(rx.pharmacy)},
             {"state", to_string(rx.state)},
             {"alerts", rx.alerts},
             {"transmittable", is_transmittable(rx.alerts)},
             {"reject_reason", rx.reject_reason},
             {"created_at", format_timestamp(rx.created_at)},
             {"transmitted_at", opt_time(rx.transmitted_at)},
             {"dispensed_at", opt_time(rx.dispensed_at)}};
}

void to_json(json& j, const FrequentEntry& f) {
    j = json{{"drug_id", f.drug_id.value},
             {"drug_name", f.drug_name},
             {"dosage", f.dosage},
             {"freq", f.freq},
             {"route", f.route},
             {"count", f.count},
             {"template", f.template_item}};
}

void to_json(json& j, const Case& c) {
    j = json{{"case_id", c.case_id.value},
             {"diagnosis_terms", c.diagnosis_terms},
             {"age_band", to_string(c.age_band)},
             {"allergy_set", c.allergy_set},
             {"drug_id", c.drug_id.value},
             {"sig_bundle",
              {{"dosage", c.sig_bundle.dosage},
               {"freq", c.sig_bundle.freq},
               {"route", c.sig_bundle.route},
               {"num", c.sig_bundle.num},
               {"refill", c.sig_bundle.refill},
               {"substitute", c.sig_bundle.substitute},
               {"sig", c.sig_bundle.sig}}},
             {"created_at", format_timestamp(c.created_at)}};
}

void to_json(json& j, const ScoredCase& s) {
    j = json{{"case", s.case_record}, {"score", s.score}};
}

void to_json(json& j, const AdaptedDraft& a) {
    j = json{{"item", a.item},
             {"source_case", a.source_case.value},
             {"patient_band", to_string(a.patient_band)},
             {"pediatric", a.pediatric},
             {"usage_guidance", a.usage_guidance}};
}

void to_json(json& j, const UserRecord& u) {
    j = json{{"user_id", u.user_id},
             {"fullname", u.fullname},
             {"user_type", to_string(u.user_type)},
             {"phone_no", u.phone_no},
             {"prescriber_no", u.prescriber_no ? json(*u.prescriber_no) : json(nullptr)},
             {"pharm_id", opt_id(u.pharm_id)},
             {"active", u.active}};
}

void to_json(json& j, const Session& s) {
    j = json{{"token", s.token},
             {"user_id", s.user_id},
             {"role", to_string(s.role)},
             {"issued_at", format_timestamp(s.issued_at)},
             {"expires_at", format_timestamp(s.expires_at)},
             {"pharm_id", opt_id(s.pharm_id)}};
}

void to_json(json& j, const AuditEntry& a) {
    j = json{{"entry_id", a.entry_id},
             {"at", format_timestamp(a.at)},
             {"user_id", a.user_id},
             {"success", a.success},
             {"failed_factors", a.failed_factors}};
}

// ---------------------------------------------------------------------------
// Input

DrugRecord parse_drug(const json& j, bool require_all_fields) {
    require_object(j);
    std::set<std::string> allowed = {"drug_id", "name"};
    for (auto f : kDrugTextFields) allowed.emplace(f);
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) throw Error(ErrorCode::InvalidArgument, "unknown field '" + key + "'");
    }
    DrugRecord d;
    if (auto id = opt_int64(j, "drug_id")) d.drug_id = DrugId{*id};
    d.name = require_string(j, "name");
    std::string* fields[] = {&d.legal_class,         &d.manufacturer,   &d.pharmacological_class,
                             &d.general_description, &d.indications,    &d.adult_usage,
                             &d.children_usage,      &d.contraindications, &d.precautions,
                             &d.interactions,        &d.adverse_reactions, &d.how_supplied};
    for (std::size_t i = 0; i < kDrugTextFields.size(); ++i) {
        const auto key = kDrugTextFields[i];
        if (require_all_fields && !j.contains(std::string(key))) {
            throw Error(ErrorCode::InvalidArgument, "missing field '" + std::string(key) + "'");
        }
        *fields[i] = optional_string(j, key);
    }
    return d;
}

DraftItem parse_draft_item(const json& j) {
    require_object(j);
    reject_unknown(j, {"drug_id", "num", "refill", "substitute", "dosage", "freq", "route", "sig",
                       "note", "start_d", "refill_d", "renew_d"});
    DraftItem d;
    const auto id = opt_int64(j, "drug_id");
    if (!id) bad("drug_id", "an integer");
    d.drug_id = DrugId{*id};
    d.num = opt_int(j, "num");
    d.refill = opt_int(j, "refill").value_or(0);
    d.substitute = opt_bool(j, "substitute", false);
    d.dosage = optional_string(j, "dosage");
    d.freq = optional_string(j, "freq");
    d.route = optional_string(j, "route");
    d.sig = optional_string(j, "sig");
    d.note = optional_string(j, "note");
    d.start_d = parse_opt_date(j, "start_d");
    d.refill_d = parse_opt_date(j, "refill_d");
    d.renew_d = parse_opt_date(j, "renew_d");
    return d;
}

PatientRegistration parse_registration(const json& j) {
    require_object(j);
    reject_unknown(j, {"fullname", "phone", "dob", "address", "drug_allergy", "occupation",
                       "default_pharmacy", "fingerprint"});
    PatientRegistration r;
    r.fullname = require_string(j, "fullname");
    r.phone = optional_string(j, "phone");
    r.dob = parse_date(require_string(j, "dob"));
    r.address = optional_string(j, "address");
    r.drug_allergy = optional_string(j, "drug_allergy");
    r.occupation = optional_string(j, "occupation");
    if (auto p = opt_int64(j, "default_pharmacy")) r.default_pharmacy = PharmacyId{*p};
    if (const auto* fp = member(j, "fingerprint")) r.fingerprint = parse_scan(*fp);
    return r;
}

EnrollRequest parse_enroll(const json& j) {
    require_object(j);
    reject_unknown(j, {"user_id", "fullname", "user_type", "phone_no", "password", "fingerprint",
                       "prescriber_no", "pharm_id"});
    EnrollRequest r;
    r.user_id = require_string(j, "user_id");
    r.fullname = require_string(j, "fullname");
    r.user_type = parse_user_type(require_string(j, "user_type"));
    r.phone_no = optional_string(j, "phone_no");
    r.password = require_string(j, "password");
    if (const auto* fp = member(j, "fingerprint")) r.fingerprint = parse_scan(*fp);
    if (member(j, "prescriber_no")) r.prescriber_no = require_string(j, "prescriber_no");
    if (auto p = opt_int64(j, "pharm_id")) r.pharm_id = PharmacyId{*p};
    return r;
}

Pharmacy parse_pharmacy(const json& j) {
    require_object(j);
    reject_unknown(j, {"name", "address", "phone", "email"});
    Pharmacy p;
    p.name = require_string(j, "name");
    p.address = optional_string(j, "address");
    p.phone = optional_string(j, "phone");
    p.email = optional_string(j, "email");
    return p;
}

FingerprintScan parse_scan(const json& j) {
    if (!j.is_string()) throw Error(ErrorCode::InvalidArgument, "fingerprint must be base64 text");
    return FingerprintScan{crypto::base64_decode(j.get<std::string>())};
}

}  // namespace rxledger
