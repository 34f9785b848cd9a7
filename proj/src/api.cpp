#include "rxledger/api.hpp"

#include "rxledger/codec.hpp"
#include "rxledger/error.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <sstream>

namespace rxledger {

using nlohmann::json;

std::string_view to_string(Access access) noexcept {
    switch (access) {
        case Access::Public: return "public";
        case Access::AnySession: return "session";
        case Access::Administrator: return "Administrator";
        case Access::Physician: return "Physician";
        case Access::Pharmacist: return "Pharmacist";
    }
    return "session";
}

const std::vector<RouteSpec>& endpoint_table() {
    using A = Access;
    static const std::vector<RouteSpec> table = {
        {"POST", "/auth/login", "auth.authenticate", A::Public},
        {"POST", "/users", "auth.enroll_user", A::Administrator},
        {"POST", "/users/{id}/deactivate", "auth.deactivate_user", A::Administrator},
        {"GET", "/audit", "auth.audit_log", A::Administrator},
        {"POST", "/pharmacies", "kb.register_pharmacy", A::Administrator},
        {"GET", "/pharmacies", "kb.list_pharmacies", A::AnySession},
        {"GET", "/patients", "kb.search_patients", A::Physician},
        {"POST", "/patients", "kb.register_patient", A::Physician},
        {"GET", "/patients/{id}", "kb.get_patient", A::Physician},
        {"POST", "/patients/{id}/consultations", "kb.record_consultation", A::Physician},
        {"GET", "/patients/{id}/history", "kb.get_history", A::Physician},
        {"GET", "/patients/{id}/patterns", "cbr.patient_patterns", A::Physician},
        {"POST", "/cbr/retrieve", "cbr.retrieve", A::Physician},
        {"GET", "/drugs", "kb.list_drugs", A::AnySession},
        {"GET", "/drugs/{id}", "kb.get_drug_info", A::AnySession},
        {"POST", "/drugs", "kb.upsert_drug", A::Physician},
        {"PUT", "/drugs/{id}", "kb.upsert_drug", A::Physician},
        {"DELETE", "/drugs/{id}", "kb.withdraw_drug", A::Physician},
        {"POST", "/prescriptions", "rx.create_draft", A::Physician},
        {"GET", "/prescriptions/frequent", "rx.frequently_prescribed", A::Physician},
        {"GET", "/prescriptions/{id}", "rx.get", A::AnySession},
        {"POST", "/prescriptions/{id}/validate", "rx.validate", A::Physician},
        {"POST", "/prescriptions/{id}/overrides", "validator.record_override", A::Physician},
        {"POST", "/prescriptions/{id}/transmit", "rx.sign_and_transmit", A::Physician},
        {"POST", "/prescriptions/{id}/dispense", "rx.dispense", A::Pharmacist},
        {"GET", "/prescriptions/{id}/print", "rx.render_printable", A::AnySession},
        {"GET", "/pharmacy/{id}/inbox", "rx.pharmacy_inbox", A::Pharmacist},
        {"POST", "/pharmacy/lookup", "rx.lookup_by_patient_fingerprint", A::Pharmacist},
        {"GET", "/prescribers/{no}/verify", "rx.verify_prescriber", A::AnySession},
    };
    return table;
}

namespace {

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < path.size()) {
        auto end = path.find('/', start);
        if (end == std::string_view::npos) end = path.size();
        if (end > start) out.emplace_back(path.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

ApiResponse json_response(int status, const json& body) {
    ApiResponse r;
    r.status = status;
    r.body = body.dump();
    return r;
}

std::int64_t parse_id(std::string_view name, const std::string& text) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value <= 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "path parameter '" + std::string(name) + "' must be a positive integer");
    }
    return value;
}

std::optional<std::string> bearer_token(const std::map<std::string, std::string>& headers) {
    if (auto it = headers.find(kTokenHeader); it != headers.end() && !it->second.empty()) {
        return it->second;
    }
    if (auto it = headers.find("authorization"); it != headers.end()) {
        constexpr std::string_view prefix = "Bearer ";
        if (it->second.size() > prefix.size() && it->second.compare(0, prefix.size(), prefix) == 0) {
            return it->second.substr(prefix.size());
        }
    }
    return std::nullopt;
}

}  // namespace

ApiResponse error_response(ErrorCode code, std::string_view message, const json& details) {
    return json_response(http_status(code), json{{"code", code_string(code)},
                                                 {"message", message},
                                                 {"details", details}});
}

struct Gateway::Call {
    const ApiRequest& request;
    std::map<std::string, std::string> params;
    std::optional<Session> session;

    json body() const {
        if (request.body.empty()) return json::object();
        try {
            return json::parse(request.body);
        } catch (const json::parse_error&) {
            throw Error(ErrorCode::InvalidArgument, "request body is not valid JSON");
        }
    }
    std::int64_t id(const std::string& name) const { return parse_id(name, params.at(name)); }
    std::optional<std::string> query(const std::string& name) const {
        auto it = request.query.find(name);
        if (it == request.query.end()) return std::nullopt;
        return it->second;
    }
};

Gateway::Gateway(Ledger& ledger) : ledger_(ledger) { register_routes(); }

std::vector<RouteSpec> Gateway::routes() const {
    std::vector<RouteSpec> out;
    out.reserve(routes_.size());
    for (const auto& r : routes_) out.push_back(r.spec);
    return out;
}

void Gateway::add(std::string method, std::string path, std::string operation, Access access,
                  Handler handler) {
    Route r;
    r.segments = split_path(path);
    r.spec = RouteSpec{std::move(method), std::move(path), std::move(operation), access};
    r.handler = std::move(handler);
    routes_.push_back(std::move(r));
}

ApiResponse Gateway::handle(const ApiRequest& request) {
    try {
        return dispatch(request);
    } catch (const Error& e) {
        return error_response(e.code(), e.what(), e.details());
    } catch (const json::exception& e) {
        return error_response(ErrorCode::InvalidArgument, "malformed request body");
    } catch (const std::exception&) {
        return error_response(ErrorCode::Internal, "internal error");
    }
}

ApiResponse Gateway::dispatch(const ApiRequest& request) {
    const auto segments = split_path(request.path);
    bool path_known = false;
    for (auto& route : routes_) {
        if (route.segments.size() != segments.size()) continue;
        std::map<std::string, std::string> params;
        bool match = true;
        for (std::size_t i = 0; i < segments.size() && match; ++i) {
            const auto& pat = route.segments[i];
            if (pat.size() > 2 && pat.front() == '{' && pat.back() == '}') {
                params[pat.substr(1, pat.size() - 2)] = segments[i];
            } else {
                match = pat == segments[i];
            }
        }
        if (!match) continue;
        path_known = true;
        if (route.spec.method != request.method) continue;

        Call call{request, std::move(params), std::nullopt};
        if (route.spec.access != Access::Public) {
            const auto token = bearer_token(request.headers);
            if (!token) throw Error(ErrorCode::AuthFailed, "missing session token");
            call.session = ledger_.auth.resolve(*token);
            switch (route.spec.access) {
                case Access::Administrator:
                    ledger_.auth.require_role(*call.session, UserType::Administrator);
                    break;
                case Access::Physician:
                    ledger_.auth.require_role(*call.session, UserType::Physician);
                    break;
                case Access::Pharmacist:
                    ledger_.auth.require_role(*call.session, UserType::Pharmacist);
                    break;
                case Access::Public:
                case Access::AnySession:
                    break;
            }
        }
        return route.handler(call);
    }
    throw Error(ErrorCode::NotFound, path_known ? "method not allowed on " + request.path
                                               : "no such endpoint: " + request.path);
}

void Gateway::register_routes() {
    auto& L = ledger_;
    using A = Access;

    add("POST", "/auth/login", "auth.authenticate", A::Public, [&L](Call& c) {
        const auto b = c.body();
        const auto session = L.auth.authenticate(
            require_string(b, "user_id"), require_string(b, "password"),
            b.contains("fingerprint") ? parse_scan(b.at("fingerprint")) : FingerprintScan{});
        return json_response(200, session);
    });
    add("POST", "/users", "auth.enroll_user", A::Administrator, [&L](Call& c) {
        return json_response(201, L.auth.enroll_user(*c.session, parse_enroll(c.body())));
    });
    add("POST", "/users/{id}/deactivate", "auth.deactivate_user", A::Administrator, [&L](Call& c) {
        const auto& user = c.params.at("id");
        L.auth.deactivate_user(*c.session, user);
        return json_response(200, *L.auth.find_user(user));
    });
    add("GET", "/audit", "auth.audit_log", A::Administrator,
        [&L](Call&) { return json_response(200, L.auth.audit_log()); });

    add("POST", "/pharmacies", "kb.register_pharmacy", A::Administrator, [&L](Call& c) {
        return json_response(201, L.kb.register_pharmacy(*c.session, parse_pharmacy(c.body())));
    });
    add("GET", "/pharmacies", "kb.list_pharmacies", A::AnySession,
        [&L](Call&) { return json_response(200, L.kb.list_pharmacies()); });

    add("GET", "/patients", "kb.search_patients", A::Physician, [&L](Call& c) {
        return json_response(200, L.kb.search_patients(c.query("prefix").value_or("")));
    });
    add("POST", "/patients", "kb.register_patient", A::Physician, [&L](Call& c) {
        return json_response(201, L.kb.register_patient(*c.session, parse_registration(c.body())));
    });
    add("GET", "/patients/{id}", "kb.get_patient", A::Physician, [&L](Call& c) {
        return json_response(200, L.kb.get_patient(PatientId{c.id("id")}));
    });
    add("POST", "/patients/{id}/consultations", "kb.record_consultation", A::Physician,
        [&L](Call& c) {
            const auto b = c.body();
            return json_response(201, L.kb.record_consultation(*c.session, PatientId{c.id("id")},
                                                               require_string(b, "nature"),
                                                               optional_string(b, "description")));
        });
    add("GET", "/patients/{id}/history", "kb.get_history", A::Physician, [&L](Call& c) {
        return json_response(200, L.kb.get_history(PatientId{c.id("id")}));
    });
    add("GET", "/patients/{id}/patterns", "cbr.patient_patterns", A::Physician, [&L](Call& c) {
        return json_response(200, L.cases.patient_patterns(PatientId{c.id("id")}));
    });

    add("POST", "/cbr/retrieve", "cbr.retrieve", A::Physician, [&L](Call& c) {
        const auto b = c.body();
        if (!b.contains("pat_id") || !b.at("pat_id").is_number_integer()) {
            throw Error(ErrorCode::InvalidArgument, "field 'pat_id' must be an integer");
        }
        const auto patient = L.kb.get_patient(PatientId{b.at("pat_id").get<std::int64_t>()});
        std::optional<ConsultationNote> note;
        if (b.contains("note_id") && !b.at("note_id").is_null()) {
            note = L.kb.find_note(NoteId{b.at("note_id").get<std::int64_t>()});
            if (!note || note->pat_id != patient.pat_id) {
                throw Error(ErrorCode::NotFound, "consultation note does not belong to this patient");
            }
        } else {
            const auto notes = L.kb.consultations(patient.pat_id);
            if (notes.empty()) {
                throw Error(ErrorCode::NoConsultation, "record a consultation before retrieval");
            }
            note = notes.back();
        }
        auto params = L.retrieval_params();
        if (b.contains("k")) {
            const auto k = b.at("k").get<std::int64_t>();
            if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
            params.k = static_cast<std::size_t>(k);
        }
        if (b.contains("threshold")) params.threshold = b.at("threshold").get<double>();

        const auto today = L.clock().today();
        const auto query = make_query(*note, patient, today);
        const auto catalog = L.kb.catalog();
        const auto results = L.cases.retrieve(query, params, catalog);

        json adapted = nullptr;
        if (b.contains("select_case_id") && !b.at("select_case_id").is_null()) {
            const CaseId chosen{b.at("select_case_id").get<std::int64_t>()};
            auto it = std::find_if(results.begin(), results.end(), [&](const ScoredCase& s) {
                return s.case_record.case_id == chosen;
            });
            if (it == results.end()) {
                throw Error(ErrorCode::NotFound, "case is not among the retrieved suggestions");
            }
            adapted = adapt(it->case_record, patient, catalog, today);
        }
        return json_response(200, json{{"note_id", note->note_id.value},
                                       {"query",
                                        {{"diagnosis_terms", query.diagnosis_terms},
                                         {"age_band", to_string(query.age_band)},
                                         {"allergy_set", query.allergy_set}}},
                                       {"results", results},
                                       {"adapted", adapted}});
    });

    add("GET", "/drugs", "kb.list_drugs", A::AnySession,
        [&L](Call&) { return json_response(200, L.kb.list_drugs()); });
    add("GET", "/drugs/{id}", "kb.get_drug_info", A::AnySession, [&L](Call& c) {
        return json_response(200, L.kb.get_drug_info(DrugId{c.id("id")}));
    });
    add("POST", "/drugs", "kb.upsert_drug", A::Physician, [&L](Call& c) {
        auto drug = parse_drug(c.body(), false);
        if (drug.drug_id.valid()) {
            throw Error(ErrorCode::InvalidArgument, "use PUT /drugs/{id} to replace a drug");
        }
        const auto id = L.kb.upsert_drug(*c.session, drug);
        return json_response(201, L.kb.get_drug_info(id));
    });
    add("PUT", "/drugs/{id}", "kb.upsert_drug", A::Physician, [&L](Call& c) {
        auto drug = parse_drug(c.body(), false);
        const DrugId id{c.id("id")};
        if (drug.drug_id.valid() && drug.drug_id != id) {
            throw Error(ErrorCode::InvalidArgument, "drug_id in body differs from the path");
        }
        drug.drug_id = id;
        L.kb.upsert_drug(*c.session, drug);
        return json_response(200, L.kb.get_drug_info(id));
    });
    add("DELETE", "/drugs/{id}", "kb.withdraw_drug", A::Physician, [&L](Call& c) {
        const DrugId id{c.id("id")};
        L.kb.withdraw_drug(*c.session, id);
        return json_response(200, json{{"drug_id", id.value}, {"withdrawn", true}});
    });

    add("POST", "/prescriptions", "rx.create_draft", A::Physician, [&L](Call& c) {
        const auto b = c.body();
        if (!b.contains("pat_id") || !b.at("pat_id").is_number_integer()) {
            throw Error(ErrorCode::InvalidArgument, "field 'pat_id' must be an integer");
        }
        if (!b.contains("items") || !b.at("items").is_array()) {
            throw Error(ErrorCode::InvalidArgument, "field 'items' must be an array");
        }
        std::vector<DraftItem> items;
        for (const auto& item : b.at("items")) items.push_back(parse_draft_item(item));
        std::optional<NoteId> note;
        if (b.contains("note_id") && !b.at("note_id").is_null()) {
            note = NoteId{b.at("note_id").get<std::int64_t>()};
        }
        return json_response(201, L.rx.create_draft(*c.session,
                                                    PatientId{b.at("pat_id").get<std::int64_t>()},
                                                    items, note));
    });
    add("GET", "/prescriptions/frequent", "rx.frequently_prescribed", A::Physician, [&L](Call& c) {
        std::size_t limit = 10;
        if (auto text = c.query("limit")) limit = static_cast<std::size_t>(parse_id("limit", *text));
        return json_response(200, L.rx.frequently_prescribed(limit));
    });
    add("GET", "/prescriptions/{id}", "rx.get", A::AnySession, [&L](Call& c) {
        return json_response(200, L.rx.get(RxId{c.id("id")}));
    });
    add("POST", "/prescriptions/{id}/validate", "rx.validate", A::Physician, [&L](Call& c) {
        return json_response(200, L.rx.validate(*c.session, RxId{c.id("id")}));
    });
    add("POST", "/prescriptions/{id}/overrides", "validator.record_override", A::Physician,
        [&L](Call& c) {
            const auto b = c.body();
            return json_response(200, L.rx.record_override(*c.session, RxId{c.id("id")},
                                                           require_string(b, "alert_id"),
                                                           optional_string(b, "reason")));
        });
    add("POST", "/prescriptions/{id}/transmit", "rx.sign_and_transmit", A::Physician,
        [&L](Call& c) {
            const auto b = c.body();
            std::optional<PharmacyId> pharmacy;
            if (b.contains("pharmacy_id") && !b.at("pharmacy_id").is_null()) {
                pharmacy = PharmacyId{b.at("pharmacy_id").get<std::int64_t>()};
            }
            return json_response(200, L.rx.sign_and_transmit(*c.session, RxId{c.id("id")}, pharmacy));
        });
    add("POST", "/prescriptions/{id}/dispense", "rx.dispense", A::Pharmacist, [&L](Call& c) {
        return json_response(200, L.rx.dispense(*c.session, RxId{c.id("id")}));
    });
    add("GET", "/prescriptions/{id}/print", "rx.render_printable", A::AnySession, [&L](Call& c) {
        const auto format = c.query("format").value_or("text");
        if (format != "text" && format != "html") {
            throw Error(ErrorCode::InvalidArgument, "format must be text or html");
        }
        const auto doc = L.rx.render_printable(RxId{c.id("id")});
        ApiResponse r;
        r.content_type = format == "html" ? "text/html; charset=utf-8" : "text/plain; charset=utf-8";
        r.body = format == "html" ? doc.html : doc.text;
        return r;
    });

    add("GET", "/pharmacy/{id}/inbox", "rx.pharmacy_inbox", A::Pharmacist, [&L](Call& c) {
        return json_response(200, L.rx.pharmacy_inbox(*c.session, PharmacyId{c.id("id")}));
    });
    add("POST", "/pharmacy/lookup", "rx.lookup_by_patient_fingerprint", A::Pharmacist,
        [&L](Call& c) {
            const auto b = c.body();
            const auto scan = b.contains("fingerprint") ? parse_scan(b.at("fingerprint"))
                                                        : FingerprintScan{};
            return json_response(200, L.rx.lookup_by_patient_fingerprint(*c.session, scan));
        });
    add("GET", "/prescribers/{no}/verify", "rx.verify_prescriber", A::AnySession, [&L](Call& c) {
        const auto& no = c.params.at("no");
        const auto status = L.rx.verify_prescriber(no);
        return json_response(200, json{{"prescriber_no", no},
                                       {"status", status == PrescriberStatus::Valid ? "Valid"
                                                                                    : "Unknown"}});
    });
}

void require_bootstrapped(Ledger& ledger) {
    if (!ledger.auth.has_admin()) {
        throw Error(ErrorCode::NoAdminBootstrapped,
                    "no administrator exists; run 'rxledger bootstrap-admin' first");
    }
}

// ---------------------------------------------------------------------------
// HTTP

struct HttpServer::Impl {
    httplib::Server server;
};

HttpServer::HttpServer(Ledger& ledger)
    : ledger_(ledger), gateway_(ledger), impl_(std::make_unique<Impl>()) {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
        ApiRequest request;
        request.method = req.method;
        request.path = req.path;
        for (const auto& [k, v] : req.params) request.query.emplace(k, v);
        for (const auto& [k, v] : req.headers) {
            std::string key = k;
            std::transform(key.begin(), key.end(), key.begin(),
                           [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
            request.headers.emplace(std::move(key), v);
        }
        request.body = req.body;
        const auto response = gateway_.handle(request);
        res.status = response.status;
        res.set_content(response.body, response.content_type);
    };
    // Only SO_REUSEADDR: the library default adds SO_REUSEPORT, which would
    // let a second instance bind a port that is already serving.
    impl_->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes),
                     sizeof(yes));
    });
    impl_->server.Get(".*", forward);
    impl_->server.Post(".*", forward);
    impl_->server.Put(".*", forward);
    impl_->server.Delete(".*", forward);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    require_bootstrapped(ledger_);
    int bound = -1;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (impl_->server.bind_to_port(host, port)) {
        bound = port;
    }
    if (bound <= 0) {
        throw Error(ErrorCode::PortInUse,
                    "cannot bind " + host + ":" + std::to_string(port) + " (address in use?)");
    }
    return bound;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::wait_until_ready() { impl_->server.wait_until_ready(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace rxledger
