#include <netchain/sp.hpp>

#include <map>
#include <stdexcept>

namespace netchain::sp {
namespace {

const smt::Leaf& leaf_in(const ledger::Block& block, const CompoundKey& key) {
    const auto i = block.ads.tree.find(key);
    if (!i) throw IntegrityError("inter-block link points at block " + std::to_string(block.header.id) +
                                 " which does not hold the key");
    return block.ads.tree.leaf(*i);
}

std::vector<ChainItem> chain_prefix(const HashChain& chain, std::size_t n) {
    n = std::min(n, chain.items.size());
    return {chain.items.begin(), chain.items.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace

Response search_netchain(const ledger::Ledger& store, const Query& q) {
    validate(q, store.size());
    Response resp;
    resp.mode = Mode::netchain;
    resp.query = q;
    for (BlockId id = q.lb; id <= q.ub; ++id) {
        const auto& ads = store.get_block(id).ads;
        if (const auto i = ads.tree.find(q.key)) {
            resp.proofs.push_back({id, ads.tree.prove_index(*i)});
            resp.results.push_back({id, chain_prefix(ads.chains[*i], q.k)});
        } else {
            resp.proofs.push_back({id, smt::prove_non_existence(ads.tree, q.key)});
        }
    }
    return resp;
}

Boundaries find_boundaries(const ledger::Ledger& store, const Query& q) {
    Boundaries out;
    const auto headers = store.headers();
    if (headers.empty()) throw std::out_of_range("empty chain");
    const auto lookup = store.mpt().get_at(headers.latest().mpt_root.value(), q.key);
    out.mpt_proof = lookup.proof;
    out.latest = lookup.value;
    if (!lookup.value) return out;

    BlockId cur = *lookup.value;
    if (cur <= q.ub) {
        out.a = out.b = cur;
        return out;
    }
    for (;;) {
        const auto& block = store.get_block(cur);
        const smt::Leaf& leaf = leaf_in(block, q.key);
        const BlockId pre = leaf.id_pre.value();
        if (pre <= q.ub) {
            out.b = cur;
            out.b_proof = block.ads.tree.prove_index(*block.ads.tree.find(q.key));
            if (pre != kNoBlock) out.a = pre;
            return out;
        }
        cur = pre;
    }
}

Response search_netchain_plus(const ledger::Ledger& store, const Query& q) {
    validate(q, store.size());
    Response resp;
    resp.mode = Mode::netchain_plus;
    resp.query = q;

    Boundaries bounds = find_boundaries(store, q);
    resp.out_boundary = bounds.b;
    if (!bounds.b || *bounds.b <= q.ub) resp.mpt_proof = std::move(bounds.mpt_proof);

    // Matched blocks inside the window, newest first.
    struct Matched {
        BlockId id;
        std::size_t leaf;
        const ledger::Block* block;
    };
    std::vector<Matched> matched;
    for (BlockId cur = bounds.a.value_or(kNoBlock); cur != kNoBlock && cur >= q.lb;) {
        const auto& block = store.get_block(cur);
        const std::size_t i = *block.ads.tree.find(q.key);
        matched.push_back({cur, i, &block});
        cur = leaf_in(block, q.key).id_pre.value();
    }

    // First round: full chains of every matched block give the global top-k.
    std::vector<BlockResult> full;
    for (auto it = matched.rbegin(); it != matched.rend(); ++it) {
        full.push_back({it->id, it->block->ads.chains[it->leaf].items});
    }
    const auto top = select_top_k(full, q.k);

    // Second round: per block, the valid prefix plus one out-boundary item.
    // Selected items of one block always form a prefix of its chain.
    std::map<BlockId, std::size_t> valid;
    for (const ItemRef& ref : top) ++valid[ref.block_id];
    for (auto it = matched.rbegin(); it != matched.rend(); ++it) {
        const HashChain& chain = it->block->ads.chains[it->leaf];
        const auto v = valid.find(it->id);
        const std::size_t c = v == valid.end() ? 0 : v->second;
        resp.results.push_back({it->id, chain_prefix(chain, c + 1)});
        resp.proofs.push_back({it->id, it->block->ads.tree.prove_index(it->leaf)});
    }
    if (bounds.b_proof) resp.proofs.push_back({*bounds.b, std::move(*bounds.b_proof)});
    return resp;
}

Response search(const ledger::Ledger& store, const Query& q) {
    return store.mode() == Mode::netchain ? search_netchain(store, q) : search_netchain_plus(store, q);
}

}  // namespace netchain::sp
