#include <netchain/client.hpp>

#include <set>

namespace netchain::client {
namespace {

VerifyError fail(ErrorKind kind, std::optional<BlockId> block, std::string detail) {
    return {kind, block, std::move(detail)};
}

// Recompute the hash chain from the authenticated head pointer.
std::optional<VerifyError> check_links(const Digest& ptr_h, const BlockResult& r) {
    if (r.items.empty()) return fail(ErrorKind::truncation, r.block_id, "matched block returned no items");
    if (codec::chain_item_digest(r.items.front()) != ptr_h) {
        return fail(ErrorKind::chain_break, r.block_id, "first item does not match ptr_h");
    }
    for (std::size_t j = 0; j + 1 < r.items.size(); ++j) {
        if (r.items[j].ptr != codec::chain_item_digest(r.items[j + 1])) {
            return fail(ErrorKind::chain_break, r.block_id, "item " + std::to_string(j) + " does not link to its successor");
        }
    }
    return std::nullopt;
}

// Existence proof of the query key against the block's header.
std::optional<VerifyError> check_existence(const ledger::HeaderChain& headers, const Query& q, BlockId id,
                                           const ProofEntry* entry, const smt::MerkleProof*& out) {
    if (!entry) return fail(ErrorKind::coverage_gap, id, "no proof for block");
    out = std::get_if<smt::MerkleProof>(&entry->proof);
    if (!out) return fail(ErrorKind::coverage_gap, id, "expected an existence proof");
    if (out->leaf.key != q.key) return fail(ErrorKind::key_mismatch, id, "existence proof is for another key");
    if (!smt::verify_existence(headers.at(id).smt_root, q.key, *out)) {
        return fail(ErrorKind::proof_failure, id, "existence proof does not reach the header root");
    }
    return std::nullopt;
}

std::optional<VerifyError> check_query(const ledger::HeaderChain& headers, const Query& q, const Response& resp,
                                       Mode mode) {
    if (resp.mode != mode || headers.mode() != mode) {
        return fail(ErrorKind::proof_failure, std::nullopt, "response mode does not match header chain");
    }
    if (resp.query.key != q.key) return fail(ErrorKind::key_mismatch, std::nullopt, "response answers another key");
    if (!(resp.query == q)) return fail(ErrorKind::boundary_violation, std::nullopt, "response answers another query");
    if (q.k == 0 || q.lb < 0 || q.lb > q.ub) return fail(ErrorKind::boundary_violation, std::nullopt, "invalid query");
    if (!headers.contains(q.ub)) return fail(ErrorKind::coverage_gap, q.ub, "headers do not cover the window");
    const auto ascending = [](const auto& v) {
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (v[i - 1].block_id >= v[i].block_id) return false;
        }
        return true;
    };
    if (!ascending(resp.results) || !ascending(resp.proofs)) {
        return fail(ErrorKind::boundary_violation, std::nullopt, "response entries out of block order");
    }
    return std::nullopt;
}

VerifiedResult collect(const Response& resp, const std::vector<ItemRef>& top) {
    VerifiedResult out;
    for (const ItemRef& ref : top) {
        out.entries.push_back({resp.result_for(ref.block_id)->items[ref.position].value, ref.block_id});
    }
    return out;
}

}  // namespace

std::string_view error_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::proof_failure: return "proof-failure";
        case ErrorKind::key_mismatch: return "key-mismatch";
        case ErrorKind::chain_break: return "chain-break";
        case ErrorKind::truncation: return "truncation";
        case ErrorKind::boundary_violation: return "boundary-violation";
        case ErrorKind::coverage_gap: return "coverage-gap";
        case ErrorKind::mpt_failure: return "mpt-failure";
    }
    return "unknown";
}

Verdict verify_netchain(const ledger::HeaderChain& headers, const Query& q, const Response& resp) {
    if (auto e = check_query(headers, q, resp, Mode::netchain)) return *e;
    if (resp.mpt_proof || resp.out_boundary) {
        return fail(ErrorKind::boundary_violation, std::nullopt, "NetChain response carries NetChain+ fields");
    }
    for (const ProofEntry& e : resp.proofs) {
        if (e.block_id < q.lb || e.block_id > q.ub) return fail(ErrorKind::boundary_violation, e.block_id, "proof outside window");
    }
    for (const BlockResult& r : resp.results) {
        const ProofEntry* e = resp.proof_for(r.block_id);
        if (!e || !std::holds_alternative<smt::MerkleProof>(e->proof)) {
            return fail(ErrorKind::boundary_violation, r.block_id, "result for a block without existence proof");
        }
    }

    for (BlockId id = q.lb; id <= q.ub; ++id) {
        const ProofEntry* entry = resp.proof_for(id);
        if (!entry) return fail(ErrorKind::coverage_gap, id, "no proof for block in window");
        const Digest& root = headers.at(id).smt_root;

        if (const auto* absent = std::get_if<smt::NonExistenceProof>(&entry->proof)) {
            if (!smt::verify_non_existence(root, q.key, *absent)) {
                return fail(ErrorKind::proof_failure, id, "non-existence proof rejected");
            }
            continue;
        }
        const smt::MerkleProof* proof = nullptr;
        if (auto e = check_existence(headers, q, id, entry, proof)) return *e;
        const BlockResult* r = resp.result_for(id);
        if (!r) return fail(ErrorKind::truncation, id, "matched block returned no items");
        if (auto e = check_links(proof->leaf.ptr_h, *r)) return *e;
        if (r->items.size() > q.k) return fail(ErrorKind::boundary_violation, id, "more than k items returned");
        if (r->items.size() < q.k && r->items.back().ptr) {
            return fail(ErrorKind::truncation, id, "fewer than k items but the chain continues");
        }
    }
    return collect(resp, select_top_k(resp.results, q.k));
}

Verdict verify_netchain_plus(const ledger::HeaderChain& headers, const Query& q, const Response& resp) {
    if (auto e = check_query(headers, q, resp, Mode::netchain_plus)) return *e;
    const Digest& mpt_root = headers.latest().mpt_root.value();

    if (!resp.out_boundary) {
        if (!resp.mpt_proof || !mpt::kv_check(mpt_root, q.key, std::nullopt, *resp.mpt_proof)) {
            return fail(ErrorKind::mpt_failure, std::nullopt, "key absence not proven");
        }
        if (!resp.results.empty() || !resp.proofs.empty()) {
            return fail(ErrorKind::boundary_violation, std::nullopt, "items returned for an absent key");
        }
        return VerifiedResult{};
    }

    const BlockId b = *resp.out_boundary;
    BlockId a = kNoBlock;
    std::set<BlockId> used;
    if (b <= q.ub) {
        if (b < 0) return fail(ErrorKind::boundary_violation, b, "negative boundary block");
        if (!resp.mpt_proof || !mpt::kv_check(mpt_root, q.key, b, *resp.mpt_proof)) {
            return fail(ErrorKind::mpt_failure, b, "latest matched block not proven");
        }
        a = b;
    } else {
        if (resp.mpt_proof) return fail(ErrorKind::boundary_violation, b, "unexpected MPT proof");
        if (!headers.contains(b)) return fail(ErrorKind::boundary_violation, b, "boundary block beyond header chain");
        const smt::MerkleProof* proof = nullptr;
        if (auto e = check_existence(headers, q, b, resp.proof_for(b), proof)) {
            if (e->kind == ErrorKind::coverage_gap) e->kind = ErrorKind::boundary_violation;
            return *e;
        }
        if (!proof->leaf.id_pre || *proof->leaf.id_pre > q.ub) {
            return fail(ErrorKind::boundary_violation, b, "boundary block is not the first above the window");
        }
        if (resp.result_for(b)) return fail(ErrorKind::boundary_violation, b, "items returned outside the window");
        a = *proof->leaf.id_pre;
        used.insert(b);
    }

    // Authenticate every block on the walk before judging completeness, so a
    // forged item surfaces as a broken chain rather than a flag mismatch.
    std::vector<const BlockResult*> walk;
    for (BlockId cur = a; cur != kNoBlock && cur >= q.lb;) {
        const smt::MerkleProof* proof = nullptr;
        if (auto e = check_existence(headers, q, cur, resp.proof_for(cur), proof)) return *e;
        const BlockResult* r = resp.result_for(cur);
        if (!r) return fail(ErrorKind::coverage_gap, cur, "matched block returned no items");
        if (auto e = check_links(proof->leaf.ptr_h, *r)) return *e;
        walk.push_back(r);
        used.insert(cur);
        const BlockId next = proof->leaf.id_pre.value_or(kNoBlock);
        if (next >= cur) return fail(ErrorKind::proof_failure, cur, "inter-block link does not point backwards");
        cur = next;
    }

    for (const ProofEntry& e : resp.proofs) {
        if (!used.count(e.block_id)) return fail(ErrorKind::boundary_violation, e.block_id, "proof for a block off the walk");
    }
    for (const BlockResult& r : resp.results) {
        if (!used.count(r.block_id)) return fail(ErrorKind::boundary_violation, r.block_id, "items for a block off the walk");
    }
    const auto top = select_top_k(resp.results, q.k);
    const std::set<ItemRef> res(top.begin(), top.end());
    for (const BlockResult* r : walk) {
        const std::size_t l = r->items.size();
        for (std::size_t j = 0; j + 1 < l; ++j) {
            if (!res.count({r->block_id, j})) {
                return fail(ErrorKind::boundary_violation, r->block_id,
                            "item " + std::to_string(j) + " before the end is not in the result");
            }
        }
        if (res.count({r->block_id, l - 1}) && r->items.back().ptr) {
            return fail(ErrorKind::truncation, r->block_id, "last returned item is valid but the chain continues");
        }
    }

    return collect(resp, top);
}

Verdict verify(const ledger::HeaderChain& headers, const Query& q, const Response& resp) {
    return headers.mode() == Mode::netchain ? verify_netchain(headers, q, resp) : verify_netchain_plus(headers, q, resp);
}

}  // namespace netchain::client
