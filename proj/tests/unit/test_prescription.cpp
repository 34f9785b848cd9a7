#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace rxtest;

namespace {

void tamper_prescriber_no(World& w, RxId rx, const std::string& value) {
    auto stmt = w.ledger->db.prepare("UPDATE prescription SET prescriber_no = ? WHERE rx_id = ?");
    stmt.bind(1, value).bind(2, rx.value);
    stmt.run();
}

RxState stored_state(World& w, RxId rx) { return w.ledger->rx.get(rx).state; }

struct Fixture : World {
    PatientRecord patient;
    DrugId coartem;
    DrugId amoxil;
    DrugId warfarin;
    DrugId aspirin;

    Fixture() {
        patient = add_patient("Adedayo Olutayo", ymd(1985, 7, 14), "penicillin");
        consult(patient.pat_id, "p.falciparum malaria", "fever for 3 days");
        coartem = add_drug(drug("Coartem", "antimalarial"));
        amoxil = add_drug(drug("Amoxil", "penicillin antibiotic"));
        warfarin = add_drug(drug("Warfarin", "anticoagulant"));
        aspirin = add_drug(drug("Aspirin", "nsaid", "warfarin"));
    }
};

}  // namespace

TEST_CASE("create_draft attaches validator alerts") {
    Fixture f;
    auto& rx = f.ledger->rx;
    const auto clean = rx.create_draft(f.doctor, f.patient.pat_id, {item(f.coartem)});
    CHECK(clean.state == RxState::Draft);
    CHECK(clean.alerts.empty());
    CHECK(clean.prescriber_user == "doctor");
    CHECK(clean.prescriber_no.empty());
    REQUIRE(clean.items.size() == 1);
    CHECK(clean.items[0].med_name == "Coartem");
    CHECK(clean.items[0].pat_name == "Adedayo Olutayo");
    CHECK(clean.items[0].date == f.clock->today());
    CHECK(rx.validate(f.doctor, clean.rx_id).state == RxState::Validated);

    const auto missing = rx.create_draft(f.doctor, f.patient.pat_id, {item(f.coartem, "")});
    REQUIRE(missing.alerts.size() == 1);
    CHECK(missing.alerts[0].rule_id == RuleId::R4_Incomplete);
    CHECK(missing.alerts[0].severity == Severity::Blocking);
    CHECK(error_of([&] { rx.validate(f.doctor, missing.rx_id); }) == ErrorCode::UnresolvedAlerts);
    CHECK(stored_state(f, missing.rx_id) == RxState::Draft);

    const auto allergic = rx.create_draft(f.doctor, f.patient.pat_id, {item(f.amoxil)});
    REQUIRE(allergic.alerts.size() == 1);
    CHECK(allergic.alerts[0].rule_id == RuleId::R1_Allergy);
}

TEST_CASE("create_draft preconditions") {
    Fixture f;
    auto& rx = f.ledger->rx;
    const auto p = f.patient.pat_id;
    CHECK(error_of([&] { rx.create_draft(f.pharmacist, p, {item(f.coartem)}); }) ==
          ErrorCode::Forbidden);
    CHECK(error_of([&] { rx.create_draft(f.doctor, PatientId{404}, {item(f.coartem)}); }) ==
          ErrorCode::PatientNotFound);
    CHECK(error_of([&] { rx.create_draft(f.doctor, p, {}); }) == ErrorCode::EmptyItems);
    CHECK(error_of([&] { rx.create_draft(f.doctor, p, {item(DrugId{999})}); }) ==
          ErrorCode::UnknownDrug);

    auto bad = item(f.coartem);
    bad.refill = -1;
    CHECK(error_of([&] { rx.create_draft(f.doctor, p, {bad}); }) == ErrorCode::InvalidArgument);
    bad = item(f.coartem, "1", "bd", "oral", 0);
    CHECK(error_of([&] { rx.create_draft(f.doctor, p, {bad}); }) == ErrorCode::InvalidArgument);
    bad = item(f.coartem);
    bad.start_d = ymd(2026, 3, 1);
    CHECK(error_of([&] { rx.create_draft(f.doctor, p, {bad}); }) == ErrorCode::InvalidArgument);

    const auto fresh = f.add_patient("No Notes");
    CHECK(error_of([&] { rx.create_draft(f.doctor, fresh.pat_id, {item(f.coartem)}); }) ==
          ErrorCode::NoConsultation);
    const auto other_note = f.consult(fresh.pat_id, "flu");
    CHECK(error_of([&] {
              rx.create_draft(f.doctor, p, {item(f.coartem)}, other_note.note_id);
          }) == ErrorCode::NotFound);
    CHECK(rx.list_all().empty());
    // Administrators prescribe too.
    CHECK(rx.create_draft(f.admin, p, {item(f.coartem)}).prescriber_user == "admin");
}

TEST_CASE("overrides: only interruptive, only by the drafter, only in Draft") {
    Fixture f;
    auto& rx = f.ledger->rx;
    const auto d = rx.create_draft(f.doctor, f.patient.pat_id, {item(f.warfarin), item(f.aspirin)});
    REQUIRE(d.alerts.size() == 1);
    CHECK(d.alerts[0].rule_id == RuleId::R2_Interaction);
    CHECK(error_of([&] { rx.validate(f.doctor, d.rx_id); }) == ErrorCode::UnresolvedAlerts);

    const auto other = f.make_user("other", UserType::Physician, "MD-200002");
    CHECK(error_of([&] { rx.record_override(other, d.rx_id, "A1", "ok"); }) == ErrorCode::Forbidden);
    CHECK(error_of([&] { rx.record_override(f.doctor, d.rx_id, "A1", ""); }) ==
          ErrorCode::EmptyReason);
    const auto a = rx.record_override(f.doctor, d.rx_id, "A1", "monitored co-therapy");
    CHECK(a.override->reason == "monitored co-therapy");
    CHECK(rx.get(d.rx_id).alerts[0].override == a.override);
    CHECK(rx.validate(f.doctor, d.rx_id).state == RxState::Validated);
    CHECK(error_of([&] { rx.record_override(f.doctor, d.rx_id, "A1", "again"); }) ==
          ErrorCode::InvalidState);

    const auto blocked = rx.create_draft(f.doctor, f.patient.pat_id, {item(f.amoxil)});
    CHECK(error_of([&] { rx.record_override(f.doctor, blocked.rx_id, "A1", "sure"); }) ==
          ErrorCode::CannotOverrideBlocking);
}

TEST_CASE("sign_and_transmit resolves the pharmacy and stamps the licence") {
    Fixture f;
    auto& rx = f.ledger->rx;
    const auto east =
        f.ledger->kb.register_pharmacy(f.admin, Pharmacy{{}, "East", "9 East Rd", "", ""}).pharm_id;

    auto d = rx.create_draft(f.doctor, f.patient.pat_id, {item(f.coartem)});
    CHECK(error_of([&] { rx.sign_and_transmit(f.doctor, d.rx_id, east); }) ==
          ErrorCode::InvalidState);
    rx.validate(f.doctor, d.rx_id);
    CHECK(error_of([&] { rx.sign_and_transmit(f.doctor, d.rx_id); }) ==
          ErrorCode::NoPharmacyResolvable);
    CHECK(error_of([&] { rx.sign_and_transmit(f.doctor, d.rx_id, PharmacyId{77}); }) ==
          ErrorCode::UnregisteredPharmacy);
    const auto other = f.make_user("other", UserType::Physician, "MD-200002");
    CHECK(error_of([&] { rx.sign_and_transmit(other, d.rx_id, east); }) == ErrorCode::Forbidden);
    CHECK(stored_state(f, d.rx_id) == RxState::Validated);

    f.clock->advance(10min);
    const auto sent = rx.sign_and_transmit(f.doctor, d.rx_id, east);
    CHECK(sent.state == RxState::Transmitted);
    CHECK(sent.prescriber_no == "MD-100001");
    CHECK(sent.pharmacy == east);
    CHECK(sent.transmitted_at == f.clock->now());
    CHECK(sent.items[0].pharmacist == east);
    CHECK(f.ledger->kb.get_patient(f.patient.pat_id).default_pharmacy == east);

    // The default is used when no choice is given and is not replaced by a later choice.
    d = rx.create_draft(f.doctor, f.patient.pat_id, {item(f.warfarin)});
    rx.validate(f.doctor, d.rx_id);
    CHECK(rx.sign_and_transmit(f.doctor, d.rx_id).pharmacy == east);
    d = rx.create_draft(f.doctor, f.patient.pat_id, {item(f.warfarin, "2 mg")});
    rx.record_override(f.doctor, d.rx_id, "A1", "dose change");
    rx.validate(f.doctor, d.rx_id);
    CHECK(rx.sign_and_transmit(f.doctor, d.rx_id, f.pharmacy).pharmacy == f.pharmacy);
    CHECK(f.ledger->kb.get_patient(f.patient.pat_id).default_pharmacy == east);
}

TEST_CASE("physicians without a licence number cannot transmit") {
    Fixture f;
    auto& rx = f.ledger->rx;
    const auto d = rx.create_draft(f.doctor, f.patient.pat_id, {item(f.coartem)});
    rx.validate(f.doctor, d.rx_id);
    auto stmt = f.ledger->db.prepare("UPDATE users SET prescriber_no = NULL WHERE user_id = 'doctor'");
    stmt.run();
    CHECK(error_of([&] { rx.sign_and_transmit(f.doctor, d.rx_id, f.pharmacy); }) ==
          ErrorCode::Forbidden);
    CHECK(stored_state(f, d.rx_id) == RxState::Validated);
}

TEST_CASE("verify_prescriber") {
    Fixture f;
    auto& rx = f.ledger->rx;
    CHECK(rx.verify_prescriber("MD-100001") == PrescriberStatus::Valid);
    CHECK(rx.verify_prescriber("MD-999999") == PrescriberStatus::Unknown);
    CHECK(rx.verify_prescriber("") == PrescriberStatus::Unknown);
    f.make_user("leaving", UserType::Physician, "MD-300003");
    CHECK(rx.verify_prescriber("MD-300003") == PrescriberStatus::Valid);
    f.ledger->auth.deactivate_user(f.admin, "leaving");
    CHECK(rx.verify_prescriber("MD-300003") == PrescriberStatus::Unknown);
}

TEST_CASE("pharmacy inbox isolation") {
    Fixture f;
    auto& rx = f.ledger->rx;
    const auto b =
        f.ledger->kb.register_pharmacy(f.admin, Pharmacy{{}, "B", "", "", ""}).pharm_id;
    const auto pharm_b = f.make_user("pharm_b", UserType::Pharmacist, std::nullopt, b);
    CHECK(rx.pharmacy_inbox(f.pharmacist, f.pharmacy).empty());

    const auto first = f.transmit(f.patient.pat_id, {item(f.coartem)});
    f.clock->advance(1min);
    const auto second = f.transmit(f.patient.pat_id, {item(f.warfarin)});
    f.clock->advance(1min);
    const auto to_b = f.transmit(f.patient.pat_id, {item(f.coartem, "1 tab")}, b);

    auto inbox = rx.pharmacy_inbox(f.pharmacist, f.pharmacy);
    REQUIRE(inbox.size() == 2);
    CHECK(inbox[0].rx_id == first.rx_id);
    CHECK(inbox[1].rx_id == second.rx_id);
    const auto inbox_b = rx.pharmacy_inbox(pharm_b, b);
    REQUIRE(inbox_b.size() == 1);
    CHECK(inbox_b[0].rx_id == to_b.rx_id);

    CHECK(error_of([&] { rx.pharmacy_inbox(pharm_b, f.pharmacy); }) == ErrorCode::Forbidden);
    CHECK(error_of([&] { rx.pharmacy_inbox(f.doctor, f.pharmacy); }) == ErrorCode::Forbidden);
    CHECK(error_of([&] { rx.dispense(pharm_b, first.rx_id); }) == ErrorCode::Forbidden);

    rx.dispense(f.pharmacist, first.rx_id);
    inbox = rx.pharmacy_inbox(f.pharmacist, f.pharmacy);
    REQUIRE(inbox.size() == 1);
    CHECK(inbox[0].rx_id == second.rx_id);
}

TEST_CASE("lookup by patient fingerprint") {
    Fixture f;
    auto& rx = f.ledger->rx;
    const auto t = template_from_seed(77);
    const auto enrolled = f.add_patient("Printed", ymd(1970, 1, 1), "", std::nullopt, scan_of(t));
    f.consult(enrolled.pat_id, "hypertension");
    const auto sent = f.transmit(enrolled.pat_id, {item(f.coartem)});
    f.transmit(f.patient.pat_id, {item(f.coartem)});

    auto found = rx.lookup_by_patient_fingerprint(f.pharmacist, scan_of(t));
    REQUIRE(found.size() == 1);
    CHECK(found[0].rx_id == sent.rx_id);

    std::mt19937_64 rng(5);
    found = rx.lookup_by_patient_fingerprint(f.pharmacist, scan_of(flip_bits(t, 100, rng)));
    CHECK(found.size() == 1);

    CHECK(error_of([&] {
              rx.lookup_by_patient_fingerprint(f.pharmacist, scan_of(template_from_seed(78)));
          }) == ErrorCode::NoMatch);
    CHECK(error_of([&] { rx.lookup_by_patient_fingerprint(f.pharmacist, FingerprintScan{}); }) ==
          ErrorCode::EmptyScan);
    CHECK(error_of([&] { rx.lookup_by_patient_fingerprint(f.doctor, scan_of(t)); }) ==
          ErrorCode::Forbidden);

    f.add_patient("Twin", ymd(1970, 1, 1), "", std::nullopt, scan_of(t));
    CHECK(error_of([&] { rx.lookup_by_patient_fingerprint(f.pharmacist, scan_of(t)); }) ==
          ErrorCode::AmbiguousMatch);
}

TEST_CASE("dispense retains cases; tampering rejects") {
    Fixture f;
    auto& rx = f.ledger->rx;
    const auto sent = f.transmit(f.patient.pat_id, {item(f.coartem), item(f.warfarin)});
    const auto before = f.ledger->cases.size();
    f.clock->advance(2h);
    const auto done = rx.dispense(f.pharmacist, sent.rx_id);
    CHECK(done.state == RxState::Dispensed);
    CHECK(done.dispensed_at == f.clock->now());
    CHECK(f.ledger->cases.size() == before + 2);
    CHECK(error_of([&] { rx.dispense(f.pharmacist, sent.rx_id); }) == ErrorCode::InvalidState);
    CHECK(f.ledger->cases.size() == before + 2);

    for (const std::string forged : {"MD-999999", "", "MD-000001"}) {
        const auto victim = f.transmit(f.patient.pat_id, {item(f.aspirin)});
        tamper_prescriber_no(f, victim.rx_id, forged);
        try {
            rx.dispense(f.pharmacist, victim.rx_id);
            FAIL("expected PrescriberVerificationFailed");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::PrescriberVerificationFailed);
            CHECK(e.details()["state"] == "Rejected");
        }
        const auto stored = rx.get(victim.rx_id);
        CHECK(stored.state == RxState::Rejected);
        CHECK_FALSE(stored.reject_reason.empty());
        CHECK(f.ledger->cases.size() == before + 2);
        CHECK(error_of([&] { rx.dispense(f.pharmacist, victim.rx_id); }) == ErrorCode::InvalidState);
    }
}

TEST_CASE("a deactivated prescriber's prescriptions are rejected at dispense") {
    Fixture f;
    const auto sent = f.transmit(f.patient.pat_id, {item(f.coartem)});
    f.ledger->auth.deactivate_user(f.admin, "doctor");
    CHECK(error_of([&] { f.ledger->rx.dispense(f.pharmacist, sent.rx_id); }) ==
          ErrorCode::PrescriberVerificationFailed);
    CHECK(stored_state(f, sent.rx_id) == RxState::Rejected);
}

TEST_CASE("active medications honour renew dates") {
    Fixture f;
    auto it = item(f.coartem);
    it.renew_d = ymd(2026, 3, 3);
    f.transmit(f.patient.pat_id, {it});
    CHECK(f.ledger->rx.active_medications(f.patient.pat_id).size() == 1);
    f.clock->advance(24h);
    CHECK(f.ledger->rx.active_medications(f.patient.pat_id).size() == 1);
    f.clock->advance(24h);
    CHECK(f.ledger->rx.active_medications(f.patient.pat_id).empty());
    // No longer active, so no duplicate alert.
    CHECK(f.ledger->rx.create_draft(f.doctor, f.patient.pat_id, {item(f.coartem)}).alerts.empty());
}

TEST_CASE("frequently_prescribed counts and ties") {
    Fixture f;
    auto& rx = f.ledger->rx;
    CHECK(rx.frequently_prescribed(10).empty());
    CHECK(error_of([&] { rx.frequently_prescribed(0); }) == ErrorCode::InvalidArgument);

    const auto zinc = f.add_drug(drug("Zinc", "supplement"));
    const auto other = f.add_patient("Other");
    f.consult(other.pat_id, "cough");
    for (int i = 0; i < 3; ++i) f.transmit(other.pat_id, {item(f.coartem, "4 tabs")});
    f.transmit(other.pat_id, {item(zinc)});
    auto top = rx.frequently_prescribed(10);
    REQUIRE(top.size() == 2);
    CHECK(top[0].drug_id == f.coartem);
    CHECK(top[0].count == 3);
    CHECK(top[0].dosage == "4 tabs");
    CHECK(top[1].drug_id == zinc);
    CHECK(top[1].count == 1);

    // Drafts and validated prescriptions do not count.
    rx.create_draft(f.doctor, other.pat_id, {item(f.aspirin)});
    f.transmit(other.pat_id, {item(f.aspirin)});
    top = rx.frequently_prescribed(10);
    REQUIRE(top.size() == 3);
    CHECK(top[1].drug_name == "Aspirin");
    CHECK(top[2].drug_name == "Zinc");
    CHECK(rx.frequently_prescribed(1).size() == 1);

    const auto& tmpl = top[0].template_item;
    CHECK(tmpl.drug_id == f.coartem);
    CHECK(tmpl.dosage == "4 tabs");
    CHECK(tmpl.freq == "twice daily");
    CHECK(tmpl.sig == "take with food");
    CHECK(tmpl.num == 10);
    // The template drafts straight back into a new prescription.
    CHECK(rx.create_draft(f.doctor, other.pat_id, {tmpl}).items[0].dosage == "4 tabs");
}

TEST_CASE("render_printable contents and determinism") {
    Fixture f;
    auto& rx = f.ledger->rx;
    auto it = item(f.coartem, "4 tabs");
    it.note = "complete the full course <3 days>";
    const auto sent = f.transmit(f.patient.pat_id, {it});
    const auto doc = rx.render_printable(sent.rx_id);
    for (const std::string s : {"Adedayo Olutayo", "Coartem", "4 tabs", "twice daily", "oral",
                                "take with food", "complete the full course <3 days>",
                                "Central Pharmacy", "1 Main St", "User doctor", "MD-100001",
                                "p.falciparum malaria"}) {
        CHECK(doc.text.find(s) != std::string::npos);
    }
    CHECK(doc.html.find("complete the full course &lt;3 days&gt;") != std::string::npos);
    CHECK(doc.html.find("MD-100001") != std::string::npos);
    CHECK(rx.render_printable(sent.rx_id).text == doc.text);
    CHECK(rx.render_printable(sent.rx_id).html == doc.html);

    const auto draft = rx.create_draft(f.doctor, f.patient.pat_id, {item(f.coartem)});
    CHECK(error_of([&] { rx.render_printable(draft.rx_id); }) == ErrorCode::InvalidState);
    CHECK(error_of([&] { rx.render_printable(RxId{999}); }) == ErrorCode::NotFound);
}

namespace {

enum class Op { Validate, Override, Transmit, Dispense };

// One prescription in each lifecycle state.
RxId in_state(Fixture& f, RxState s) {
    auto& rx = f.ledger->rx;
    // Warfarin + aspirin carries one interruptive alert so overrides have a target.
    auto d = rx.create_draft(f.doctor, f.patient.pat_id, {item(f.warfarin), item(f.aspirin)});
    if (s == RxState::Draft) return d.rx_id;
    rx.record_override(f.doctor, d.rx_id, "A1", "reviewed");
    rx.validate(f.doctor, d.rx_id);
    if (s == RxState::Validated) return d.rx_id;
    rx.sign_and_transmit(f.doctor, d.rx_id, f.pharmacy);
    if (s == RxState::Transmitted) return d.rx_id;
    if (s == RxState::Rejected) tamper_prescriber_no(f, d.rx_id, "MD-999999");
    try {
        rx.dispense(f.pharmacist, d.rx_id);
    } catch (const Error&) {
    }
    return d.rx_id;
}

bool legal(RxState s, Op op) {
    switch (op) {
        case Op::Validate:
        case Op::Override: return s == RxState::Draft;
        case Op::Transmit: return s == RxState::Validated;
        case Op::Dispense: return s == RxState::Transmitted;
    }
    return false;
}

void apply(Fixture& f, RxId id, Op op) {
    auto& rx = f.ledger->rx;
    switch (op) {
        case Op::Validate: rx.validate(f.doctor, id); break;
        case Op::Override: rx.record_override(f.doctor, id, "A1", "reason"); break;
        case Op::Transmit: rx.sign_and_transmit(f.doctor, id, f.pharmacy); break;
        case Op::Dispense: rx.dispense(f.pharmacist, id); break;
    }
}

}  // namespace

TEST_CASE("every illegal state/operation pair is rejected without a state change") {
    const RxState states[] = {RxState::Draft, RxState::Validated, RxState::Transmitted,
                              RxState::Dispensed, RxState::Rejected};
    for (auto s : states) {
        for (auto op : {Op::Validate, Op::Override, Op::Transmit, Op::Dispense}) {
            if (legal(s, op)) continue;
            Fixture f;
            const auto id = in_state(f, s);
            REQUIRE(stored_state(f, id) == s);
            const auto before = f.ledger->db.dump();
            CAPTURE(to_string(s));
            CAPTURE(static_cast<int>(op));
            const auto code = error_of([&] { apply(f, id, op); });
            REQUIRE(code);
            CHECK(*code == ErrorCode::InvalidState);
            CHECK(stored_state(f, id) == s);
            CHECK(f.ledger->db.dump() == before);
        }
    }
}

TEST_CASE("property: random interleavings keep the transmission invariants") {
    Fixture f;
    auto& rx = f.ledger->rx;
    std::mt19937_64 rng(90210);
    const auto other = f.make_user("other", UserType::Physician, "MD-200002");
    const std::vector<DrugId> drugs = {f.coartem, f.amoxil, f.warfarin, f.aspirin};
    std::vector<RxId> ids;
    std::size_t dispensed_items = 0;
    const auto cases_before = f.ledger->cases.size();

    for (int step = 0; step < 1500; ++step) {
        const auto pick = [&] { return ids[rng() % ids.size()]; };
        try {
            switch (rng() % 7) {
                case 0: {
                    std::vector<DraftItem> items;
                    for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i) {
                        items.push_back(item(drugs[rng() % drugs.size()], rng() % 6 ? "1 tab" : ""));
                    }
                    ids.push_back(rx.create_draft(f.doctor, f.patient.pat_id, items).rx_id);
                    break;
                }
                case 1:
                    if (!ids.empty()) {
                        const auto id = pick();
                        rx.record_override(rng() % 5 ? f.doctor : other, id,
                                           "A" + std::to_string(1 + rng() % 3), "checked");
                    }
                    break;
                case 2:
                    if (!ids.empty()) rx.validate(rng() % 5 ? f.doctor : other, pick());
                    break;
                case 3:
                    if (!ids.empty()) rx.sign_and_transmit(rng() % 5 ? f.doctor : other, pick(), f.pharmacy);
                    break;
                case 4:
                    if (!ids.empty()) {
                        const auto id = pick();
                        const auto n = rx.get(id).items.size();
                        rx.dispense(f.pharmacist, id);
                        dispensed_items += n;
                    }
                    break;
                case 5:
                    if (!ids.empty() && rng() % 4 == 0) tamper_prescriber_no(f, pick(), "MD-999999");
                    break;
                default: f.clock->advance(std::chrono::minutes(rng() % 30)); break;
            }
        } catch (const Error&) {
        }
    }
    std::size_t transmitted = 0;
    for (const auto& p : rx.list_all()) {
        const bool sent = p.state == RxState::Transmitted || p.state == RxState::Dispensed ||
                          p.state == RxState::Rejected;
        if (!sent) continue;
        ++transmitted;
        CHECK(is_transmittable(p.alerts));
        CHECK(p.transmitted_at.has_value());
        if (p.state != RxState::Rejected) CHECK_FALSE(p.prescriber_no.empty());
    }
    CHECK(transmitted > 0);
    CHECK(f.ledger->cases.size() == cases_before + dispensed_items);
}

TEST_CASE("property: frequently_prescribed equals a recount") {
    Fixture f;
    std::mt19937_64 rng(1234);
    std::vector<DrugId> drugs = {f.coartem, f.warfarin};
    for (const char* n : {"beta", "Alpha", "gamma", "alpha2", "Delta"}) {
        drugs.push_back(f.add_drug(drug(n, "misc")));
    }
    const auto patient = f.add_patient("Freq", ymd(1970, 1, 1));
    f.consult(patient.pat_id, "chronic pain");
    for (int i = 0; i < 150; ++i) {
        std::vector<DraftItem> items;
        std::set<std::int64_t> used;
        for (std::size_t k = 0, n = 1 + rng() % 2; k < n; ++k) {
            const auto d = drugs[rng() % drugs.size()];
            if (!used.insert(d.value).second) continue;
            items.push_back(item(d, rng() % 2 ? "1 tab" : "2 tabs", rng() % 2 ? "bd" : "tds"));
        }
        const auto p = f.transmit(patient.pat_id, items);
        if (rng() % 3 == 0) f.ledger->rx.dispense(f.pharmacist, p.rx_id);
        if (rng() % 10 == 0) f.ledger->rx.create_draft(f.doctor, patient.pat_id, items);
    }

    std::vector<std::tuple<std::int64_t, std::string, std::string, std::string, std::string>> flat;
    for (const auto& p : f.ledger->rx.list_all()) {
        if (p.state != RxState::Transmitted && p.state != RxState::Dispensed) continue;
        for (const auto& m : p.items) flat.emplace_back(m.drug_id.value, m.med_name, m.dosage, m.freq, m.route);
    }
    for (std::size_t limit : {1u, 3u, 10u, 100u}) {
        const auto got = f.ledger->rx.frequently_prescribed(limit);
        const auto want = oracle::frequent(flat, limit);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].drug_id.value == want[i].drug_id);
            CHECK(got[i].drug_name == want[i].name);
            CHECK(got[i].dosage == want[i].dosage);
            CHECK(got[i].freq == want[i].freq);
            CHECK(got[i].route == want[i].route);
            CHECK(got[i].count == want[i].count);
        }
    }
}
