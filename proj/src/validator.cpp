#include "rxledger/validator.hpp"

#include "rxledger/error.hpp"
#include "rxledger/text.hpp"

#include <algorithm>
#include <set>

namespace rxledger {

std::string_view to_string(RuleId rule) noexcept {
    switch (rule) {
        case RuleId::R1_Allergy: return "R1_ALLERGY";
        case RuleId::R2_Interaction: return "R2_INTERACTION";
        case RuleId::R3_Duplicate: return "R3_DUPLICATE";
        case RuleId::R4_Incomplete: return "R4_INCOMPLETE";
        case RuleId::R5_PediatricGap: return "R5_PEDIATRIC_GAP";
    }
    return "R4_INCOMPLETE";
}

std::string_view to_string(Severity severity) noexcept {
    switch (severity) {
        case Severity::Blocking: return "Blocking";
        case Severity::Interruptive: return "Interruptive";
        case Severity::Informational: return "Informational";
    }
    return "Blocking";
}

RuleId parse_rule_id(std::string_view text) {
    for (auto r : {RuleId::R1_Allergy, RuleId::R2_Interaction, RuleId::R3_Duplicate,
                   RuleId::R4_Incomplete, RuleId::R5_PediatricGap}) {
        if (to_string(r) == text) return r;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown rule id: " + std::string(text));
}

Severity parse_severity(std::string_view text) {
    for (auto s : {Severity::Blocking, Severity::Interruptive, Severity::Informational}) {
        if (to_string(s) == text) return s;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown severity: " + std::string(text));
}

void to_json(nlohmann::json& j, const Alert& alert) {
    j = nlohmann::json{{"alert_id", alert.alert_id},
                       {"rule_id", to_string(alert.rule_id)},
                       {"severity", to_string(alert.severity)},
                       {"message", alert.message},
                       {"item_index", alert.item_index},
                       {"override", nullptr}};
    if (alert.override) {
        j["override"] = {{"reason", alert.override->reason},
                         {"user_id", alert.override->user_id},
                         {"at", to_millis(alert.override->at)},
                         {"at_text", format_timestamp(alert.override->at)}};
    }
}

void from_json(const nlohmann::json& j, Alert& alert) {
    alert.alert_id = j.at("alert_id").get<std::string>();
    alert.rule_id = parse_rule_id(j.at("rule_id").get<std::string>());
    alert.severity = parse_severity(j.at("severity").get<std::string>());
    alert.message = j.at("message").get<std::string>();
    alert.item_index = j.at("item_index").get<std::size_t>();
    alert.override.reset();
    if (const auto& o = j.at("override"); !o.is_null()) {
        alert.override = Override{o.at("reason").get<std::string>(),
                                  o.at("user_id").get<std::string>(),
                                  from_millis(o.at("at").get<std::int64_t>())};
    }
}

namespace {

bool mentions(std::string_view interactions, const DrugRecord& drug) {
    const auto name = tokenize(drug.name);
    const auto klass = tokenize(drug.pharmacological_class);
    std::size_t start = 0;
    while (start <= interactions.size()) {
        auto end = interactions.find(';', start);
        if (end == std::string_view::npos) end = interactions.size();
        const auto entry = tokenize(interactions.substr(start, end - start));
        if (contains_phrase(entry, name) || contains_phrase(entry, klass)) return true;
        start = end + 1;
    }
    return false;
}

std::string join_missing(const MedicationItem& item) {
    std::vector<std::string_view> missing;
    if (trim(item.dosage).empty()) missing.push_back("dosage");
    if (trim(item.freq).empty()) missing.push_back("freq");
    if (trim(item.route).empty()) missing.push_back("route");
    if (!item.num || *item.num <= 0) missing.push_back("num");
    std::string out;
    for (auto m : missing) {
        if (!out.empty()) out += ", ";
        out += m;
    }
    return out;
}

Alert make_alert(RuleId rule, Severity severity, std::size_t item, std::string message) {
    Alert a;
    a.rule_id = rule;
    a.severity = severity;
    a.item_index = item;
    a.message = std::move(message);
    return a;
}

}  // namespace

bool check_allergy_conflict(const DrugRecord& drug, const TermSet& allergy_set) {
    if (allergy_set.empty()) return false;
    for (const auto& source : {std::string_view(drug.name), std::string_view(drug.pharmacological_class)}) {
        for (const auto& token : tokenize(source)) {
            if (allergy_set.contains(token)) return true;
        }
    }
    return false;
}

bool check_interaction(const DrugRecord& a, const DrugRecord& b) {
    return mentions(a.interactions, b) || mentions(b.interactions, a);
}

std::vector<Alert> validate_draft(std::span<const MedicationItem> draft,
                                  const PatientRecord& patient,
                                  std::span<const MedicationItem> active_meds,
                                  const DrugCatalog& drugs, const ValidationContext& context) {
    std::vector<const DrugRecord*> draft_drugs;
    draft_drugs.reserve(draft.size());
    for (const auto& item : draft) {
        const auto* drug = drugs.find(item.drug_id);
        if (!drug) {
            throw Error(ErrorCode::UnknownDrug,
                        "unknown drug id: " + std::to_string(item.drug_id.value));
        }
        draft_drugs.push_back(drug);
    }

    // One entry per distinct active drug. Withdrawn drugs fall back to the
    // stored display name so interactions by name still register.
    std::vector<DrugRecord> active;
    std::set<DrugId> active_ids;
    for (const auto& med : active_meds) {
        if (!active_ids.insert(med.drug_id).second) continue;
        if (const auto* d = drugs.find(med.drug_id)) {
            active.push_back(*d);
        } else {
            DrugRecord stub;
            stub.drug_id = med.drug_id;
            stub.name = med.med_name;
            active.push_back(std::move(stub));
        }
    }

    const bool pediatric = whole_years(patient.dob, context.today) < context.pediatric_age;

    std::vector<Alert> alerts;
    for (std::size_t i = 0; i < draft.size(); ++i) {
        const auto& item = draft[i];
        const auto& drug = *draft_drugs[i];

        if (check_allergy_conflict(drug, patient.drug_allergy)) {
            alerts.push_back(make_alert(RuleId::R1_Allergy, Severity::Blocking, i,
                                        "Patient is allergic to " + drug.name + " (" +
                                            join_terms(patient.drug_allergy) + ")"));
        }

        std::set<DrugId> reported;
        for (std::size_t j = 0; j < i; ++j) {
            const auto& other = *draft_drugs[j];
            if (other.drug_id == drug.drug_id || reported.contains(other.drug_id)) continue;
            if (check_interaction(drug, other)) {
                reported.insert(other.drug_id);
                alerts.push_back(make_alert(RuleId::R2_Interaction, Severity::Interruptive, i,
                                            drug.name + " interacts with co-prescribed " +
                                                other.name));
            }
        }
        for (const auto& other : active) {
            if (other.drug_id == drug.drug_id || reported.contains(other.drug_id)) continue;
            if (check_interaction(drug, other)) {
                reported.insert(other.drug_id);
                alerts.push_back(make_alert(RuleId::R2_Interaction, Severity::Interruptive, i,
                                            drug.name + " interacts with active medication " +
                                                other.name));
            }
        }

        const bool drafted_twice = std::any_of(
            draft.begin(), draft.begin() + static_cast<std::ptrdiff_t>(i),
            [&](const MedicationItem& prior) { return prior.drug_id == item.drug_id; });
        if (drafted_twice) {
            alerts.push_back(make_alert(RuleId::R3_Duplicate, Severity::Interruptive, i,
                                        drug.name + " appears more than once in this prescription"));
        } else if (active_ids.contains(item.drug_id)) {
            alerts.push_back(make_alert(RuleId::R3_Duplicate, Severity::Interruptive, i,
                                        drug.name + " is already an active medication"));
        }

        if (!has_complete_sig(item)) {
            alerts.push_back(make_alert(RuleId::R4_Incomplete, Severity::Blocking, i,
                                        "Incomplete sig for " + drug.name + ": missing " +
                                            join_missing(item)));
        }

        if (pediatric && trim(drug.children_usage).empty()) {
            alerts.push_back(make_alert(RuleId::R5_PediatricGap, Severity::Informational, i,
                                        "No children's usage recorded for " + drug.name));
        }
    }

    for (std::size_t k = 0; k < alerts.size(); ++k) {
        alerts[k].alert_id = "A" + std::to_string(k + 1);
    }
    return alerts;
}

bool is_transmittable(std::span<const Alert> alerts) noexcept {
    return std::none_of(alerts.begin(), alerts.end(), [](const Alert& a) {
        return a.severity == Severity::Blocking ||
               (a.severity == Severity::Interruptive && !a.override);
    });
}

Alert apply_override(std::vector<Alert>& alerts, std::string_view alert_id,
                     std::string_view reason, std::string_view user_id, Timestamp at) {
    auto it = std::find_if(alerts.begin(), alerts.end(),
                           [&](const Alert& a) { return a.alert_id == alert_id; });
    if (it == alerts.end()) {
        throw Error(ErrorCode::NotFound, "no such alert: " + std::string(alert_id));
    }
    switch (it->severity) {
        case Severity::Blocking:
            throw Error(ErrorCode::CannotOverrideBlocking,
                        "blocking alerts cannot be overridden: " + it->message);
        case Severity::Informational:
            throw Error(ErrorCode::InvalidArgument, "informational alerts need no override");
        case Severity::Interruptive:
            break;
    }
    if (trim(reason).empty()) throw Error(ErrorCode::EmptyReason, "override reason is empty");
    if (it->override) throw Error(ErrorCode::InvalidState, "alert already overridden");
    it->override = Override{std::string(reason), std::string(user_id), at};
    return *it;
}

}  // namespace rxledger
