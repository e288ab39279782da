#pragma once

// Light-client verification. Inputs are the header chain and a response;
// the verifier never touches block bodies. Verification is all-or-nothing
// and never throws on adversarial input.

#include <netchain/ledger.hpp>
#include <netchain/protocol.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netchain::client {

enum class ErrorKind {
    proof_failure,       // an SMT or header check failed
    key_mismatch,        // existence proof for another key
    chain_break,         // hash chain does not recompute from ptr_h
    truncation,          // items withheld without reaching the chain end
    boundary_violation,  // out-boundary block or item invalid, or stray entries
    coverage_gap,        // a block that must be covered is missing
    mpt_failure,         // MPT proof rejected
};

std::string_view error_name(ErrorKind kind) noexcept;

struct VerifyError {
    ErrorKind kind;
    std::optional<BlockId> block_id;
    std::string detail;
};

struct VerifiedResult {
    std::vector<Hit> entries;  // weight non-increasing
};

class Verdict {
public:
    Verdict(VerifiedResult r) : result_(std::move(r)) {}
    Verdict(VerifyError e) : error_(std::move(e)) {}

    bool accepted() const noexcept { return result_.has_value(); }
    explicit operator bool() const noexcept { return accepted(); }
    const VerifiedResult& result() const { return result_.value(); }
    const VerifyError& error() const { return error_.value(); }

private:
    std::optional<VerifiedResult> result_;
    std::optional<VerifyError> error_;
};

Verdict verify_netchain(const ledger::HeaderChain& headers, const Query& q, const Response& resp);
Verdict verify_netchain_plus(const ledger::HeaderChain& headers, const Query& q, const Response& resp);

/// Checks that the response answers `q` in the header chain's mode, then
/// dispatches.
Verdict verify(const ledger::HeaderChain& headers, const Query& q, const Response& resp);

}  // namespace netchain::client
