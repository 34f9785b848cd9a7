#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <set>
#include <thread>

using namespace rxtest;
using nlohmann::json;

namespace {

std::string b64(const FingerprintTemplate& t) {
    return crypto::base64_encode(std::span<const std::uint8_t>(t.data(), t.size()));
}

std::string fill(std::string path, const std::string& id) {
    for (const std::string p : {"{id}", "{no}"}) {
        if (auto at = path.find(p); at != std::string::npos) path.replace(at, p.size(), id);
    }
    return path;
}

std::optional<UserType> required_role(Access a) {
    switch (a) {
        case Access::Administrator: return UserType::Administrator;
        case Access::Physician: return UserType::Physician;
        case Access::Pharmacist: return UserType::Pharmacist;
        default: return std::nullopt;
    }
}

}  // namespace

TEST_CASE("registered routes equal the documented table") {
    World w;
    Gateway g(*w.ledger);
    CHECK(g.routes() == endpoint_table());

    std::set<std::pair<std::string, std::string>> seen;
    std::map<std::string, int> per_operation;
    for (const auto& r : endpoint_table()) {
        CHECK(seen.insert({r.method, r.path}).second);
        ++per_operation[r.operation];
    }
    // Each externally visible operation has exactly one endpoint; upsert keeps a create/replace pair.
    for (const auto& [op, n] : per_operation) {
        CAPTURE(op);
        CHECK(n == (op == "kb.upsert_drug" ? 2 : 1));
    }
    for (const char* op :
         {"auth.authenticate", "auth.enroll_user", "kb.search_patients", "kb.register_patient",
          "kb.record_consultation", "kb.get_history", "cbr.patient_patterns", "cbr.retrieve",
          "kb.get_drug_info", "kb.upsert_drug", "rx.create_draft", "validator.record_override",
          "rx.sign_and_transmit", "rx.frequently_prescribed", "rx.pharmacy_inbox",
          "rx.lookup_by_patient_fingerprint", "rx.dispense", "rx.render_printable",
          "rx.verify_prescriber"}) {
        CHECK(per_operation.contains(op));
    }
}

TEST_CASE("gateway role matrix matches require_role") {
    World w;
    Gateway g(*w.ledger);
    const std::vector<std::pair<std::string, Session>> callers = {
        {"admin", w.admin}, {"doctor", w.doctor}, {"pharm", w.pharmacist}};

    for (const auto& route : endpoint_table()) {
        const auto path = fill(route.path, route.path.find("{no}") != std::string::npos
                                               ? "MD-100001"
                                               : std::to_string(w.pharmacy.value));
        for (const auto& [name, session] : callers) {
            CAPTURE(route.method);
            CAPTURE(route.path);
            CAPTURE(name);
            bool allowed = true;
            if (const auto role = required_role(route.access)) {
                allowed = !error_of([&] { w.ledger->auth.require_role(session, *role); });
            }
            // A bogus body keeps allowed calls from changing anything.
            const auto r = call(g, route.method, path, json{{"__probe", true}}, session.token);
            const auto body = r.json();
            const bool gateway_denied =
                r.status == 403 && body["message"].get<std::string>().rfind("requires ", 0) == 0;
            CHECK(gateway_denied == !allowed);
            if (!allowed) CHECK(body["code"] == "FORBIDDEN");
        }

        const auto anonymous = call(g, route.method, path, json{{"__probe", true}});
        if (route.access == Access::Public) {
            CHECK(anonymous.status != 401);
        } else {
            CHECK(anonymous.status == 401);
            CHECK(anonymous.json()["code"] == "AUTH_FAILED");
        }
    }
}

TEST_CASE("tokens: header forms, forgeries and expiry") {
    World w;
    Gateway g(*w.ledger);
    CHECK(call(g, "GET", "/drugs", nullptr, w.doctor.token).status == 200);

    ApiRequest bearer;
    bearer.method = "GET";
    bearer.path = "/drugs";
    bearer.headers["authorization"] = "Bearer " + w.doctor.token;
    CHECK(g.handle(bearer).status == 200);

    const auto forged = call(g, "GET", "/drugs", nullptr, std::string(w.doctor.token.size(), 'a'));
    CHECK(forged.status == 401);
    CHECK(forged.json()["code"] == "AUTH_FAILED");

    w.clock->advance(std::chrono::minutes(fast_config().session_ttl_minutes + 1));
    const auto expired = call(g, "GET", "/drugs", nullptr, w.doctor.token);
    CHECK(expired.status == 401);
    CHECK(expired.json()["code"] == "SESSION_EXPIRED");
}

TEST_CASE("errors are structured and never leak secrets") {
    World w;
    Gateway g(*w.ledger);
    auto r = call(g, "GET", "/nowhere", nullptr, w.doctor.token);
    CHECK(r.status == 404);
    CHECK(r.json()["code"] == "NOT_FOUND");

    r = call(g, "POST", "/auth/login",
             json{{"user_id", "doctor"}, {"password", "wrong"}, {"fingerprint", b64(template_from_seed(1001))}});
    CHECK(r.status == 401);
    const auto body = r.json();
    CHECK(body["code"] == "AUTH_FAILED");
    CHECK(body.contains("message"));
    CHECK(body.contains("details"));
    CHECK(r.body.find("password") == std::string::npos);

    ApiRequest bad;
    bad.method = "POST";
    bad.path = "/patients";
    bad.headers[kTokenHeader] = w.doctor.token;
    bad.body = "{not json";
    r = g.handle(bad);
    CHECK(r.status == 400);
    CHECK(r.json()["code"] == "INVALID_ARGUMENT");

    r = call(g, "GET", "/prescriptions/abc", nullptr, w.doctor.token);
    CHECK(r.status == 400);

    // User records never carry password or template material.
    r = call(g, "POST", "/users",
             json{{"user_id", "nurse"}, {"fullname", "N"}, {"user_type", "Physician"},
                  {"password", "s3cret-pass"}, {"prescriber_no", "MD-400004"},
                  {"fingerprint", b64(template_from_seed(5))}},
             w.admin.token);
    CHECK(r.status == 201);
    CHECK(r.body.find("s3cret-pass") == std::string::npos);
    CHECK_FALSE(r.json().contains("password_digest"));
    CHECK_FALSE(r.json().contains("fingerprint_template"));
}

TEST_CASE("physician then pharmacist flow over the gateway") {
    World w;
    Gateway g(*w.ledger);
    const auto doc = [&](std::string m, std::string p, json b = nullptr,
                         std::map<std::string, std::string> q = {}) {
        return call(g, std::move(m), std::move(p), b, w.doctor.token, std::move(q));
    };

    auto login = call(g, "POST", "/auth/login",
                      json{{"user_id", "doctor"}, {"password", "pw-doctor"},
                           {"fingerprint", b64(template_from_seed(1001))}});
    REQUIRE(login.status == 200);
    CHECK(login.json()["role"] == "Physician");

    auto r = doc("POST", "/drugs",
                 json{{"name", "Coartem"}, {"pharmacological_class", "antimalarial"},
                      {"adult_usage", "4 tabs bd"}, {"children_usage", "weight based"}});
    REQUIRE(r.status == 201);
    const auto drug_id = r.json()["drug_id"].get<std::int64_t>();
    CHECK(doc("GET", "/drugs/" + std::to_string(drug_id)).json()["name"] == "Coartem");
    r = doc("PUT", "/drugs/" + std::to_string(drug_id),
            json{{"name", "Coartem"}, {"pharmacological_class", "antimalarial"},
                 {"interactions", "mefloquine"}, {"children_usage", "weight based"}});
    CHECK(r.status == 200);
    CHECK(r.json()["interactions"] == "mefloquine");

    const auto print = template_from_seed(31337);
    r = doc("POST", "/patients",
            json{{"fullname", "Adedayo Olutayo"}, {"dob", "1985-07-14"}, {"phone", "555"},
                 {"drug_allergy", "penicillin"}, {"fingerprint", b64(print)}});
    REQUIRE(r.status == 201);
    const auto pat = r.json()["pat_id"].get<std::int64_t>();
    const auto pat_path = "/patients/" + std::to_string(pat);
    CHECK(r.json()["has_fingerprint"] == true);
    CHECK(doc("GET", "/patients", nullptr, {{"prefix", "ade"}}).json().size() == 1);

    r = doc("POST", pat_path + "/consultations", json{{"nature", "p.falciparum malaria"}});
    REQUIRE(r.status == 201);

    r = doc("POST", "/prescriptions",
            json{{"pat_id", pat},
                 {"items", json::array({json{{"drug_id", drug_id}, {"dosage", "4 tabs"},
                                             {"freq", "twice daily"}, {"route", "oral"},
                                             {"num", 24}, {"sig", "after food"}}})}});
    REQUIRE(r.status == 201);
    const auto rx = r.json()["rx_id"].get<std::int64_t>();
    const auto rx_path = "/prescriptions/" + std::to_string(rx);
    CHECK(r.json()["state"] == "Draft");
    CHECK(r.json()["alerts"].empty());
    CHECK(r.json()["transmittable"] == true);

    r = doc("POST", rx_path + "/transmit", json::object());
    CHECK(r.status == 409);
    CHECK(r.json()["code"] == "INVALID_STATE");
    CHECK(doc("POST", rx_path + "/validate").json()["state"] == "Validated");
    r = doc("POST", rx_path + "/transmit", json{{"pharmacy_id", w.pharmacy.value}});
    REQUIRE(r.status == 200);
    CHECK(r.json()["state"] == "Transmitted");
    CHECK(r.json()["prescriber_no"] == "MD-100001");

    CHECK(doc("GET", pat_path + "/history").json().size() == 2);
    CHECK(doc("GET", pat_path + "/patterns").json().size() == 1);
    r = doc("GET", "/prescriptions/frequent", nullptr, {{"limit", "5"}});
    REQUIRE(r.json().size() == 1);
    CHECK(r.json()[0]["count"] == 1);
    CHECK(r.json()[0]["template"]["dosage"] == "4 tabs");

    r = doc("GET", rx_path + "/print", nullptr, {{"format", "html"}});
    CHECK(r.status == 200);
    CHECK(r.content_type.rfind("text/html", 0) == 0);
    CHECK(r.body.find("MD-100001") != std::string::npos);
    CHECK(doc("GET", "/prescribers/MD-100001/verify").json()["status"] == "Valid");
    CHECK(doc("GET", "/prescribers/MD-999999/verify").json()["status"] == "Unknown");

    const auto ph = [&](std::string m, std::string p, json b = nullptr) {
        return call(g, std::move(m), std::move(p), b, w.pharmacist.token);
    };
    r = ph("GET", "/pharmacy/" + std::to_string(w.pharmacy.value) + "/inbox");
    REQUIRE(r.json().size() == 1);
    CHECK(r.json()[0]["rx_id"] == rx);
    r = ph("POST", "/pharmacy/lookup", json{{"fingerprint", b64(print)}});
    REQUIRE(r.status == 200);
    CHECK(r.json().size() == 1);
    r = ph("POST", "/pharmacy/lookup", json{{"fingerprint", b64(template_from_seed(1))}});
    CHECK(r.json()["code"] == "NO_MATCH");

    r = ph("POST", rx_path + "/dispense");
    REQUIRE(r.status == 200);
    CHECK(r.json()["state"] == "Dispensed");
    CHECK(ph("POST", rx_path + "/dispense").status == 409);
    CHECK(ph("GET", "/pharmacy/" + std::to_string(w.pharmacy.value) + "/inbox").json().empty());

    // The dispensed case comes back for the same consultation, and adapts on selection.
    r = doc("POST", "/cbr/retrieve", json{{"pat_id", pat}});
    REQUIRE(r.status == 200);
    REQUIRE(r.json()["results"].size() == 1);
    CHECK(r.json()["results"][0]["score"] == 1.0);
    const auto case_id = r.json()["results"][0]["case"]["case_id"];
    r = doc("POST", "/cbr/retrieve", json{{"pat_id", pat}, {"select_case_id", case_id}});
    REQUIRE(r.status == 200);
    CHECK(r.json()["adapted"]["item"]["dosage"] == "4 tabs");
    r = doc("POST", "/cbr/retrieve", json{{"pat_id", pat}, {"select_case_id", 999}});
    CHECK(r.status == 404);
}

TEST_CASE("tampered prescriber numbers surface as a rejection over the gateway") {
    World w;
    Gateway g(*w.ledger);
    const auto p = w.add_patient("Kemi");
    w.consult(p.pat_id, "cough");
    const auto d = w.add_drug(drug("Zinc"));
    const auto rx = w.transmit(p.pat_id, {item(d)});
    auto stmt = w.ledger->db.prepare("UPDATE prescription SET prescriber_no = 'MD-123456' WHERE rx_id = ?");
    stmt.bind(1, rx.rx_id.value);
    stmt.run();
    const auto r = call(g, "POST", "/prescriptions/" + std::to_string(rx.rx_id.value) + "/dispense",
                        nullptr, w.pharmacist.token);
    CHECK(r.json()["code"] == "PRESCRIBER_VERIFICATION_FAILED");
    CHECK(r.json()["details"]["state"] == "Rejected");
    CHECK(w.ledger->rx.get(rx.rx_id).state == RxState::Rejected);
}

TEST_CASE("serving needs a bootstrapped administrator") {
    Ledger empty(":memory:", fast_config(), std::make_shared<ManualClock>(at(2026, 3, 2)));
    HttpServer server(empty);
    CHECK(error_of([&] { server.bind("127.0.0.1", 0); }) == ErrorCode::NoAdminBootstrapped);
}

TEST_CASE("HTTP round trip on an ephemeral port") {
    World w;
    HttpServer server(*w.ledger);
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread serving([&] { server.run(); });
    server.wait_until_ready();

    HttpServer second(*w.ledger);
    CHECK(error_of([&] { second.bind("127.0.0.1", port); }) == ErrorCode::PortInUse);

    httplib::Client client("127.0.0.1", port);
    auto res = client.Get("/drugs");
    REQUIRE(res);
    CHECK(res->status == 401);
    CHECK(json::parse(res->body)["code"] == "AUTH_FAILED");

    const json login = {{"user_id", "pharm"}, {"password", "pw-pharm"},
                        {"fingerprint", b64(template_from_seed(1002))}};
    res = client.Post("/auth/login", login.dump(), "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    const auto token = json::parse(res->body)["token"].get<std::string>();

    res = client.Get("/pharmacies", httplib::Headers{{"X-Session-Token", token}});
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body).size() == 1);
    res = client.Get("/prescribers/MD-100001/verify",
                     httplib::Headers{{"Authorization", "Bearer " + token}});
    REQUIRE(res);
    CHECK(json::parse(res->body)["status"] == "Valid");

    server.stop();
    serving.join();
}
