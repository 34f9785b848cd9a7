// rxledger: operator CLI for the e-prescribing service.

#include "rxledger/api.hpp"
#include "rxledger/app.hpp"
#include "rxledger/codec.hpp"
#include "rxledger/error.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <pthread.h>
#include <termios.h>
#include <thread>
#include <unistd.h>

using namespace rxledger;

namespace {

struct Settings {
    std::map<std::string, std::string> flags;

    void add_to(CLI::App* cmd, bool service_keys) {
        cmd->add_option_function<std::string>(
            "--config", [this](const std::string& v) { flags["config"] = v; },
            "JSON config file (default: $RXLEDGER_CONFIG)");
        cmd->add_option_function<std::string>(
            "--data-dir", [this](const std::string& v) { flags["data_dir"] = v; },
            "Directory holding the database");
        if (!service_keys) return;
        for (const auto& key : config_keys()) {
            if (key == "data_dir") continue;
            std::string flag = "--" + key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            cmd->add_option_function<std::string>(
                flag, [this, key](const std::string& v) { flags[key] = v; });
        }
    }

    Config resolve() const { return resolve_config(flags, process_env()); }
};

std::string prompt(const std::string& label, bool secret = false) {
    std::cerr << label << ": " << std::flush;
    termios saved{};
    const bool tty = secret && ::isatty(STDIN_FILENO) && ::tcgetattr(STDIN_FILENO, &saved) == 0;
    if (tty) {
        termios quiet = saved;
        quiet.c_lflag &= ~static_cast<tcflag_t>(ECHO);
        ::tcsetattr(STDIN_FILENO, TCSANOW, &quiet);
    }
    std::string line;
    std::getline(std::cin, line);
    if (tty) {
        ::tcsetattr(STDIN_FILENO, TCSANOW, &saved);
        std::cerr << "\n";
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int serve(const Settings& settings) {
    const auto config = settings.resolve();
    auto ledger = Ledger::open(config);
    HttpServer server(*ledger);

    // Handle SIGINT/SIGTERM on a dedicated thread so shutdown runs outside
    // signal context.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    const int port = server.bind(config.bind, config.port);
    std::cout << "listening on " << config.bind << ":" << port << std::endl;

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.wait_until_ready();
        server.stop();
    });
    server.run();
    if (waiter.joinable()) {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
    }
    return 0;
}

struct AdminArgs {
    std::string user_id, fullname, phone, prescriber_no, fingerprint_file;
    bool password_stdin = false;
};

int bootstrap_admin(const Settings& settings, AdminArgs args) {
    const auto config = settings.resolve();
    auto ledger = Ledger::open(config);
    if (ledger->auth.has_admin()) {
        throw Error(ErrorCode::InvalidState, "an administrator already exists");
    }
    if (args.user_id.empty()) args.user_id = prompt("User id");
    if (args.fullname.empty()) args.fullname = prompt("Full name");
    if (args.phone.empty()) args.phone = prompt("Phone");
    if (args.prescriber_no.empty()) args.prescriber_no = prompt("Prescriber number (MD-######)");
    if (args.fingerprint_file.empty()) args.fingerprint_file = prompt("Fingerprint template file");

    EnrollRequest request;
    request.user_id = args.user_id;
    request.fullname = args.fullname;
    request.user_type = UserType::Administrator;
    request.phone_no = args.phone;
    request.prescriber_no = args.prescriber_no;
    request.fingerprint = FingerprintScan{read_file(args.fingerprint_file)};
    if (args.password_stdin) {
        std::getline(std::cin, request.password);
        if (!request.password.empty() && request.password.back() == '\r') request.password.pop_back();
    } else {
        request.password = prompt("Password", true);
        if (prompt("Repeat password", true) != request.password) {
            throw Error(ErrorCode::InvalidArgument, "passwords do not match");
        }
    }
    const auto user = ledger->auth.bootstrap_admin(request);
    std::cout << "administrator " << user.user_id << " created\n";
    return 0;
}

int seed_drugs(const Settings& settings, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, path + ": " + e.what());
    }
    if (!doc.is_array()) throw Error(ErrorCode::InvalidArgument, "seed file must hold a JSON array");
    std::vector<DrugRecord> drugs;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        try {
            drugs.push_back(parse_drug(doc[i], true));
        } catch (const Error& e) {
            throw Error(e.code(), "record " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    auto ledger = Ledger::open(settings.resolve());
    const auto loaded = ledger->kb.seed_drugs(std::move(drugs));
    std::cout << loaded << " drugs loaded\n";
    return 0;
}

int add_pharmacy(const Settings& settings, Pharmacy pharmacy) {
    auto ledger = Ledger::open(settings.resolve());
    const auto stored = ledger->kb.add_pharmacy(std::move(pharmacy));
    std::cout << "pharmacy " << stored.pharm_id.value << " added: " << stored.name << "\n";
    return 0;
}

int report_frequent(const Settings& settings, int limit) {
    if (limit < 1) throw Error(ErrorCode::InvalidArgument, "--limit must be >= 1");
    auto ledger = Ledger::open(settings.resolve());
    const auto rows = ledger->rx.frequently_prescribed(static_cast<std::size_t>(limit));
    std::cout << std::left << std::setw(6) << "RANK" << std::setw(7) << "COUNT" << std::setw(9)
              << "DRUG_ID" << std::setw(24) << "DRUG" << std::setw(14) << "DOSAGE" << std::setw(16)
              << "FREQ" << "ROUTE\n";
    int rank = 0;
    for (const auto& r : rows) {
        std::cout << std::left << std::setw(6) << ++rank << std::setw(7) << r.count << std::setw(9)
                  << r.drug_id.value << std::setw(24) << r.drug_name << std::setw(14) << r.dosage
                  << std::setw(16) << r.freq << r.route << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rxledger e-prescribing service"};
    app.require_subcommand(1);

    Settings serve_settings, admin_settings, seed_settings, pharmacy_settings, report_settings;

    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_settings.add_to(serve_cmd, true);

    AdminArgs admin;
    auto* admin_cmd = app.add_subcommand("bootstrap-admin", "Create the first administrator");
    admin_settings.add_to(admin_cmd, true);
    admin_cmd->add_option("--user-id", admin.user_id);
    admin_cmd->add_option("--fullname", admin.fullname);
    admin_cmd->add_option("--phone", admin.phone);
    admin_cmd->add_option("--prescriber-no", admin.prescriber_no);
    admin_cmd->add_option("--fingerprint-file", admin.fingerprint_file, "Enrolment template bytes");
    admin_cmd->add_flag("--password-stdin", admin.password_stdin, "Read the password from stdin");

    std::string seed_file;
    auto* seed_cmd = app.add_subcommand("seed-drugs", "Load a JSON array of drug records");
    seed_settings.add_to(seed_cmd, false);
    seed_cmd->add_option("file", seed_file)->required();

    Pharmacy pharmacy;
    auto* pharmacy_cmd = app.add_subcommand("add-pharmacy", "Register a pharmacy");
    pharmacy_settings.add_to(pharmacy_cmd, false);
    pharmacy_cmd->add_option("--name", pharmacy.name)->required();
    pharmacy_cmd->add_option("--address", pharmacy.address);
    pharmacy_cmd->add_option("--phone", pharmacy.phone);
    pharmacy_cmd->add_option("--email", pharmacy.email);

    int limit = 10;
    auto* report_cmd = app.add_subcommand("report", "Reports");
    report_cmd->require_subcommand(1);
    auto* frequent_cmd = report_cmd->add_subcommand("frequent", "Most frequently prescribed items");
    report_settings.add_to(frequent_cmd, false);
    frequent_cmd->add_option("--limit", limit, "Rows to show")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve_cmd) return serve(serve_settings);
        if (*admin_cmd) return bootstrap_admin(admin_settings, admin);
        if (*seed_cmd) return seed_drugs(seed_settings, seed_file);
        if (*pharmacy_cmd) return add_pharmacy(pharmacy_settings, pharmacy);
        if (*frequent_cmd) return report_frequent(report_settings, limit);
    } catch (const Error& e) {
        std::cerr << "error: " << code_string(e.code()) << ": " << e.what() << "\n";
        if (e.details().contains("names")) {
            for (const auto& name : e.details().at("names")) {
                std::cerr << "  " << name.get<std::string>() << "\n";
            }
        }
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
