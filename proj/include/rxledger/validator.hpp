#pragma once

#include "rxledger/knowledge_base.hpp"
#include "rxledger/medication.hpp"
#include "rxledger/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rxledger {

enum class RuleId {
    R1_Allergy,
    R2_Interaction,
    R3_Duplicate,
    R4_Incomplete,
    R5_PediatricGap,
};

enum class Severity { Blocking, Interruptive, Informational };

std::string_view to_string(RuleId rule) noexcept;
std::string_view to_string(Severity severity) noexcept;
RuleId parse_rule_id(std::string_view text);
Severity parse_severity(std::string_view text);

struct Override {
    std::string reason;
    std::string user_id;
    Timestamp at;

    friend bool operator==(const Override&, const Override&) = default;
};

struct Alert {
    /// "A1", "A2", ... in list order; unique within one prescription.
    std::string alert_id;
    RuleId rule_id = RuleId::R1_Allergy;
    Severity severity = Severity::Informational;
    std::string message;
    /// Index of the draft item the alert is attached to.
    std::size_t item_index = 0;
    std::optional<Override> override;

    friend bool operator==(const Alert&, const Alert&) = default;
};

void to_json(nlohmann::json& j, const Alert& alert);
void from_json(const nlohmann::json& j, Alert& alert);

struct ValidationContext {
    Date today;
    /// Below this age (whole years) children_usage is the relevant guidance.
    int pediatric_age = 12;
};

/// Tokens of the drug's name or pharmacological class meet the allergy set.
bool check_allergy_conflict(const DrugRecord& drug, const TermSet& allergy_set);

/// Symmetric: either drug's name or class phrase appears inside one of the
/// other's semicolon-separated interaction entries.
bool check_interaction(const DrugRecord& a, const DrugRecord& b);

/// Applies R1-R5 to `draft`. Pure: identical inputs give identical output.
/// Alerts are ordered by item index, then rule. Throws UnknownDrug when a
/// draft item names a drug missing from `drugs`.
std::vector<Alert> validate_draft(std::span<const MedicationItem> draft,
                                  const PatientRecord& patient,
                                  std::span<const MedicationItem> active_meds,
                                  const DrugCatalog& drugs, const ValidationContext& context);

/// No Blocking alerts and every Interruptive alert overridden.
bool is_transmittable(std::span<const Alert> alerts) noexcept;

/// Attaches an override to the alert with `alert_id` and returns it.
/// Throws NotFound, CannotOverrideBlocking, EmptyReason, InvalidArgument
/// (informational alerts), or InvalidState (already overridden).
Alert apply_override(std::vector<Alert>& alerts, std::string_view alert_id,
                     std::string_view reason, std::string_view user_id, Timestamp at);

}  // namespace rxledger
