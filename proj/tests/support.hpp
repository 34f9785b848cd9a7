#pragma once

// Shared fixtures for the unit and acceptance suites.

#include "rxledger/api.hpp"
#include "rxledger/app.hpp"
#include "rxledger/crypto.hpp"
#include "rxledger/error.hpp"

#include <chrono>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace rxtest {

using namespace rxledger;
using namespace std::chrono_literals;

inline Timestamp at(int y, unsigned m, unsigned d, int hour = 9) {
    const std::chrono::sys_days day{std::chrono::year{y} / m / d};
    return Timestamp{day + std::chrono::hours{hour}};
}

inline Date ymd(int y, unsigned m, unsigned d) {
    return std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d};
}

/// Deterministic 512-byte template.
inline FingerprintTemplate template_from_seed(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    FingerprintTemplate t{};
    for (auto& b : t) b = static_cast<std::uint8_t>(rng() & 0xFF);
    return t;
}

inline FingerprintScan scan_of(const FingerprintTemplate& t) {
    return FingerprintScan{std::vector<std::uint8_t>(t.begin(), t.end())};
}

/// Flips `bits` distinct bit positions chosen by `rng`.
inline FingerprintTemplate flip_bits(FingerprintTemplate t, std::size_t bits, std::mt19937_64& rng) {
    std::vector<std::size_t> positions(kTemplateBits);
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
    std::shuffle(positions.begin(), positions.end(), rng);
    for (std::size_t i = 0; i < bits; ++i) {
        t[positions[i] / 8] ^= static_cast<std::uint8_t>(1u << (positions[i] % 8));
    }
    return t;
}

inline Config fast_config() {
    Config c;
    c.kdf_iterations = 1000;
    // Scenario clocks jump hours or days; keep the fixture sessions alive.
    c.session_ttl_minutes = 60 * 24 * 3650;
    return c;
}

inline DrugRecord drug(std::string name, std::string klass = "", std::string interactions = "",
                       std::string children_usage = "see label") {
    DrugRecord d;
    d.name = std::move(name);
    d.pharmacological_class = std::move(klass);
    d.interactions = std::move(interactions);
    d.children_usage = std::move(children_usage);
    d.adult_usage = "see label";
    return d;
}

inline DraftItem item(DrugId drug, std::string dosage = "500 mg", std::string freq = "twice daily",
                      std::string route = "oral", int num = 10) {
    DraftItem i;
    i.drug_id = drug;
    i.dosage = std::move(dosage);
    i.freq = std::move(freq);
    i.route = std::move(route);
    i.num = num;
    i.sig = "take with food";
    return i;
}

/// An in-memory (or on-disk) ledger with an administrator, one physician,
/// one pharmacy with its pharmacist, and a ManualClock.
struct World {
    std::shared_ptr<ManualClock> clock;
    std::unique_ptr<Ledger> ledger;
    Session admin;
    Session doctor;
    Session pharmacist;
    PharmacyId pharmacy;
    std::uint64_t next_seed = 1000;

    explicit World(Config config = fast_config(), std::string db_path = ":memory:")
        : clock(std::make_shared<ManualClock>(at(2026, 3, 2))),
          ledger(std::make_unique<Ledger>(db_path, config, clock)) {
        admin = make_user("admin", UserType::Administrator, "MD-000001");
        doctor = make_user("doctor", UserType::Physician, "MD-100001");
        pharmacy = ledger->kb.register_pharmacy(admin, Pharmacy{{}, "Central Pharmacy", "1 Main St",
                                                               "555-0100", "rx@central.example"})
                       .pharm_id;
        pharmacist = make_user("pharm", UserType::Pharmacist, std::nullopt, pharmacy);
    }

    EnrollRequest request(std::string user_id, UserType type, std::optional<std::string> no,
                          std::optional<PharmacyId> pharm = std::nullopt) {
        EnrollRequest r;
        r.user_id = std::move(user_id);
        r.fullname = "User " + r.user_id;
        r.user_type = type;
        r.phone_no = "555-0000";
        r.password = "pw-" + r.user_id;
        r.fingerprint = scan_of(template_from_seed(next_seed++));
        r.prescriber_no = std::move(no);
        r.pharm_id = pharm;
        return r;
    }

    /// Enrols (bootstrapping the first admin) and logs in.
    Session make_user(std::string user_id, UserType type, std::optional<std::string> no,
                      std::optional<PharmacyId> pharm = std::nullopt) {
        const auto r = request(std::move(user_id), type, std::move(no), pharm);
        if (type == UserType::Administrator && !ledger->auth.has_admin()) {
            ledger->auth.bootstrap_admin(r);
        } else {
            ledger->auth.enroll_user(admin, r);
        }
        return ledger->auth.authenticate(r.user_id, r.password, r.fingerprint);
    }

    Session relogin(const std::string& user_id, std::uint64_t seed) {
        return ledger->auth.authenticate(user_id, "pw-" + user_id, scan_of(template_from_seed(seed)));
    }

    DrugId add_drug(const DrugRecord& d) { return ledger->kb.upsert_drug(doctor, d); }

    PatientRecord add_patient(std::string name, Date dob = ymd(1980, 5, 1), std::string allergy = "",
                              std::optional<PharmacyId> default_pharmacy = std::nullopt,
                              std::optional<FingerprintScan> fp = std::nullopt) {
        PatientRegistration r;
        r.fullname = std::move(name);
        r.phone = "555-1234";
        r.dob = dob;
        r.address = "2 High St";
        r.drug_allergy = std::move(allergy);
        r.occupation = "teacher";
        r.default_pharmacy = default_pharmacy;
        r.fingerprint = std::move(fp);
        return ledger->kb.register_patient(doctor, r);
    }

    ConsultationNote consult(PatientId p, std::string nature, std::string description = "") {
        return ledger->kb.record_consultation(doctor, p, nature, description);
    }

    /// Draft -> Validated -> Transmitted; overrides every Interruptive alert.
    Prescription transmit(PatientId p, const std::vector<DraftItem>& items,
                          std::optional<PharmacyId> to = std::nullopt) {
        auto rx = ledger->rx.create_draft(doctor, p, items);
        for (const auto& a : rx.alerts) {
            if (a.severity == Severity::Interruptive) {
                ledger->rx.record_override(doctor, rx.rx_id, a.alert_id, "clinically reviewed");
            }
        }
        ledger->rx.validate(doctor, rx.rx_id);
        return ledger->rx.sign_and_transmit(doctor, rx.rx_id, to.value_or(pharmacy));
    }
};

/// Gateway request helper.
inline ApiResponse call(Gateway& g, std::string method, std::string path,
                        const nlohmann::json& body = nullptr, const std::string& token = "",
                        std::map<std::string, std::string> query = {}) {
    ApiRequest r;
    r.method = std::move(method);
    r.path = std::move(path);
    r.query = std::move(query);
    if (!token.empty()) r.headers[kTokenHeader] = token;
    if (!body.is_null()) r.body = body.dump();
    return g.handle(r);
}

/// Runs `f` and returns the ErrorCode it throws; fails if it does not throw.
template <class F>
std::optional<ErrorCode> error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

}  // namespace rxtest
