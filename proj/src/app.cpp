#include "rxledger/app.hpp"

namespace rxledger {

Ledger::Ledger(const std::string& db_path, const Config& config, std::shared_ptr<const Clock> clock)
    : db(db_path),
      auth(db, clock, config.auth_policy()),
      kb(db, auth, clock),
      cases(db),
      rx(db, auth, kb, cases, clock, config.pediatric_age),
      config_(config),
      clock_(std::move(clock)) {
    check(config_);
}

std::unique_ptr<Ledger> Ledger::open(const Config& config, std::shared_ptr<const Clock> clock) {
    check(config);
    return std::make_unique<Ledger>(database_path(config.data_dir), config, std::move(clock));
}

}  // namespace rxledger
