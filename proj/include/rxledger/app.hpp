#pragma once

#include "rxledger/auth.hpp"
#include "rxledger/cbr.hpp"
#include "rxledger/config.hpp"
#include "rxledger/knowledge_base.hpp"
#include "rxledger/prescription.hpp"
#include "rxledger/store.hpp"

#include <memory>
#include <string>

namespace rxledger {

/// All services wired to one store. `db_path` may be ":memory:".
class Ledger {
public:
    Ledger(const std::string& db_path, const Config& config,
           std::shared_ptr<const Clock> clock = std::make_shared<SystemClock>());

    /// Opens the store inside `config.data_dir`.
    static std::unique_ptr<Ledger> open(const Config& config,
                                        std::shared_ptr<const Clock> clock =
                                            std::make_shared<SystemClock>());

    const Config& config() const noexcept { return config_; }
    const Clock& clock() const noexcept { return *clock_; }
    RetrievalParams retrieval_params() const { return config_.retrieval_params(); }

    Database db;
    AuthService auth;
    KnowledgeBase kb;
    CaseMemory cases;
    PrescriptionService rx;

private:
    Config config_;
    std::shared_ptr<const Clock> clock_;
};

}  // namespace rxledger
