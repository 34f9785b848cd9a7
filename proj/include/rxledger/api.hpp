#pragma once

#include "rxledger/app.hpp"
#include "rxledger/error.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rxledger {

struct ApiRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    /// Header names in lower case.
    std::map<std::string, std::string> headers;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;

    nlohmann::json json() const { return nlohmann::json::parse(body); }
};

/// Who may call an endpoint. Role levels follow require_role, so an
/// Administrator also passes Physician endpoints.
enum class Access { Public, AnySession, Administrator, Physician, Pharmacist };

std::string_view to_string(Access access) noexcept;

struct RouteSpec {
    std::string method;
    /// Segments in braces are parameters, e.g. /prescriptions/{id}.
    std::string path;
    /// Service operation, e.g. "rx.dispense".
    std::string operation;
    Access access = Access::AnySession;

    friend bool operator==(const RouteSpec&, const RouteSpec&) = default;
};

/// The documented endpoint table.
const std::vector<RouteSpec>& endpoint_table();

/// Token header; "Authorization: Bearer <token>" is accepted as well.
inline constexpr const char* kTokenHeader = "x-session-token";

/// Transport-independent request dispatcher.
class Gateway {
public:
    explicit Gateway(Ledger& ledger);

    ApiResponse handle(const ApiRequest& request);

    /// Routes in registration (and match) order.
    std::vector<RouteSpec> routes() const;

private:
    struct Call;
    using Handler = std::function<ApiResponse(Call&)>;
    struct Route {
        RouteSpec spec;
        std::vector<std::string> segments;
        Handler handler;
    };

    void add(std::string method, std::string path, std::string operation, Access access,
             Handler handler);
    void register_routes();
    ApiResponse dispatch(const ApiRequest& request);

    Ledger& ledger_;
    std::vector<Route> routes_;
};

ApiResponse error_response(ErrorCode code, std::string_view message,
                           const nlohmann::json& details = nullptr);

/// Throws NoAdminBootstrapped when no Administrator exists.
void require_bootstrapped(Ledger& ledger);

/// HTTP front end for a Gateway.
class HttpServer {
public:
    HttpServer(Ledger& ledger);
    ~HttpServer();

    /// Binds; port 0 picks a free port. Returns the bound port. Throws
    /// NoAdminBootstrapped or PortInUse.
    int bind(const std::string& host, int port);
    /// Serves until stop().
    void run();
    /// Blocks until run() is accepting connections.
    void wait_until_ready();
    void stop();
    Gateway& gateway() noexcept { return gateway_; }

private:
    struct Impl;
    Ledger& ledger_;
    Gateway gateway_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace rxledger
