#include <netchain/adversary.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <utility>

namespace netchain::adversary {
namespace {

using client::ErrorKind;

constexpr std::array kStrategies{
    Strategy::identity,     Strategy::forge_object,  Strategy::drop_matched_block,
    Strategy::shorten_chain, Strategy::relabel_valid_as_boundary, Strategy::swap_weight,
    Strategy::reorder_items, Strategy::stale_boundary, Strategy::foreign_proof,
};

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

void erase_proof(Response& r, BlockId id) {
    std::erase_if(r.proofs, [id](const ProofEntry& e) { return e.block_id == id; });
}

ProofEntry& proof_entry(Response& r, BlockId id) {
    return *std::find_if(r.proofs.begin(), r.proofs.end(), [id](const ProofEntry& e) { return e.block_id == id; });
}

// (result index, item index) pairs.
using Slot = std::pair<std::size_t, std::size_t>;

std::optional<Forgery> forge_object(Response r, std::mt19937_64& rng) {
    std::vector<Slot> slots;
    for (std::size_t i = 0; i < r.results.size(); ++i) {
        for (std::size_t j = 0; j < r.results[i].items.size(); ++j) slots.emplace_back(i, j);
    }
    if (slots.empty()) return std::nullopt;
    const auto [i, j] = pick(rng, slots);
    // The weight is kept so the forged item ranks exactly where the real one did.
    r.results[i].items[j].value.v = "forged:" + r.results[i].items[j].value.v;
    return Forgery{std::move(r), ErrorKind::chain_break};
}

std::optional<Forgery> drop_matched_block(Response r, std::mt19937_64& rng) {
    if (r.results.empty()) return std::nullopt;
    std::vector<std::size_t> idx(r.results.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const std::size_t i = pick(rng, idx);
    const BlockId id = r.results[i].block_id;
    r.results.erase(r.results.begin() + static_cast<std::ptrdiff_t>(i));
    erase_proof(r, id);
    return Forgery{std::move(r), ErrorKind::coverage_gap};
}

std::optional<Forgery> shorten_chain(Response r, std::mt19937_64& rng) {
    std::vector<std::size_t> longer, single;
    for (std::size_t i = 0; i < r.results.size(); ++i) {
        (r.results[i].items.size() >= 2 ? longer : single).push_back(i);
    }
    if (!longer.empty()) {
        r.results[pick(rng, longer)].items.pop_back();
        return Forgery{std::move(r), ErrorKind::truncation};
    }
    if (single.empty()) return std::nullopt;
    // Withholding the only item leaves a matched block with nothing.
    const std::size_t i = pick(rng, single);
    r.results.erase(r.results.begin() + static_cast<std::ptrdiff_t>(i));
    const auto kind = r.mode == Mode::netchain ? ErrorKind::truncation : ErrorKind::coverage_gap;
    return Forgery{std::move(r), kind};
}

const HashChain& full_chain(const ledger::Ledger& store, BlockId id, const CompoundKey& key) {
    return *store.get_block(id).ads.chain_for(key);
}

// Cut a block right after its last valid item, so that item poses as the
// out-boundary one, and pad another block with its next item to keep |Res|.
std::optional<Forgery> relabel(const ledger::Ledger& store, Response r, std::mt19937_64& rng) {
    if (r.mode != Mode::netchain_plus) return std::nullopt;
    const auto top = select_top_k(r.results, r.query.k);
    if (top.size() < r.query.k) return std::nullopt;  // every chain was exhausted
    std::map<BlockId, std::size_t> valid;
    for (const ItemRef& ref : top) ++valid[ref.block_id];

    std::vector<std::size_t> cut, pad;
    for (std::size_t i = 0; i < r.results.size(); ++i) {
        const auto& res = r.results[i];
        const std::size_t c = valid.count(res.block_id) ? valid[res.block_id] : 0;
        if (c >= 1 && res.items.size() == c + 1) cut.push_back(i);
        if (res.items.back().ptr) pad.push_back(i);
    }
    if (cut.empty()) return std::nullopt;
    const std::size_t x = pick(rng, cut);
    std::erase(pad, x);
    const BlockId x_id = r.results[x].block_id;
    r.results[x].items.pop_back();
    if (pad.empty()) return Forgery{std::move(r), ErrorKind::truncation};

    const std::size_t y = pick(rng, pad);
    auto& items = r.results[y].items;
    const BlockId y_id = r.results[y].block_id;
    items.push_back(full_chain(store, y_id, r.query.key).items.at(items.size()));
    // The verifier walks newest first and reports the first violation.
    return Forgery{std::move(r), x_id > y_id ? ErrorKind::truncation : ErrorKind::boundary_violation};
}

std::optional<Forgery> swap_weight(Response r, std::mt19937_64& rng) {
    std::vector<Slot> pairs, any;
    for (std::size_t i = 0; i < r.results.size(); ++i) {
        const auto& items = r.results[i].items;
        for (std::size_t j = 0; j < items.size(); ++j) {
            any.emplace_back(i, j);
            if (j + 1 < items.size() && items[j].value.w != items[j + 1].value.w) pairs.emplace_back(i, j);
        }
    }
    if (!pairs.empty()) {
        const auto [i, j] = pick(rng, pairs);
        auto& items = r.results[i].items;
        std::swap(items[j].value.w, items[j + 1].value.w);
    } else if (!any.empty()) {
        const auto [i, j] = pick(rng, any);
        r.results[i].items[j].value.w += 1;
    } else {
        return std::nullopt;
    }
    return Forgery{std::move(r), ErrorKind::chain_break};
}

std::optional<Forgery> reorder_items(Response r, std::mt19937_64& rng) {
    std::vector<Slot> pairs;
    for (std::size_t i = 0; i < r.results.size(); ++i) {
        for (std::size_t j = 0; j + 1 < r.results[i].items.size(); ++j) pairs.emplace_back(i, j);
    }
    if (!pairs.empty()) {
        const auto [i, j] = pick(rng, pairs);
        std::swap(r.results[i].items[j], r.results[i].items[j + 1]);
        return Forgery{std::move(r), ErrorKind::chain_break};
    }
    if (r.results.size() < 2) return std::nullopt;
    std::swap(r.results[0], r.results[1]);
    return Forgery{std::move(r), ErrorKind::boundary_violation};
}

// Report the key's MPT entry as it stood just before block b was mined.
std::optional<Forgery> stale_boundary(const ledger::Ledger& store, Response r) {
    if (r.mode != Mode::netchain_plus || !r.out_boundary || *r.out_boundary == 0) return std::nullopt;
    const BlockId b = *r.out_boundary;
    const auto headers = store.headers();
    auto old = store.mpt().get_at(headers.at(b - 1).mpt_root.value(), r.query.key);
    const BlockId keep = old.value.value_or(kNoBlock);
    r.out_boundary = old.value;
    r.mpt_proof = std::move(old.proof);
    std::erase_if(r.proofs, [keep](const ProofEntry& e) { return e.block_id > keep; });
    std::erase_if(r.results, [keep](const BlockResult& e) { return e.block_id > keep; });
    return Forgery{std::move(r), ErrorKind::mpt_failure};
}

std::optional<Forgery> foreign_proof(const ledger::Ledger& store, Response r, std::mt19937_64& rng) {
    std::vector<BlockId> ids;
    for (const auto& res : r.results) {
        if (store.get_block(res.block_id).ads.tree.size() >= 2) ids.push_back(res.block_id);
    }
    if (ids.empty()) return std::nullopt;
    const BlockId id = pick(rng, ids);
    const auto& tree = store.get_block(id).ads.tree;
    const std::size_t own = *tree.find(r.query.key);
    std::size_t other = std::uniform_int_distribution<std::size_t>(0, tree.size() - 2)(rng);
    if (other >= own) ++other;
    proof_entry(r, id).proof = tree.prove_index(other);
    return Forgery{std::move(r), ErrorKind::key_mismatch};
}

}  // namespace

std::span<const Strategy> all_strategies() noexcept { return kStrategies; }

std::string_view strategy_name(Strategy s) noexcept {
    switch (s) {
        case Strategy::identity: return "identity";
        case Strategy::forge_object: return "forge-object";
        case Strategy::drop_matched_block: return "drop-matched-block";
        case Strategy::shorten_chain: return "shorten-chain";
        case Strategy::relabel_valid_as_boundary: return "relabel-valid-as-boundary";
        case Strategy::swap_weight: return "swap-weight";
        case Strategy::reorder_items: return "reorder-items";
        case Strategy::stale_boundary: return "stale-boundary";
        case Strategy::foreign_proof: return "foreign-proof";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
    for (Strategy s : kStrategies) {
        if (strategy_name(s) == name) return s;
    }
    return std::nullopt;
}

std::optional<Forgery> tamper(const ledger::Ledger& store, const Response& honest, Strategy s,
                              std::mt19937_64& rng) {
    switch (s) {
        case Strategy::identity: return Forgery{honest, std::nullopt};
        case Strategy::forge_object: return forge_object(honest, rng);
        case Strategy::drop_matched_block: return drop_matched_block(honest, rng);
        case Strategy::shorten_chain: return shorten_chain(honest, rng);
        case Strategy::relabel_valid_as_boundary: return relabel(store, honest, rng);
        case Strategy::swap_weight: return swap_weight(honest, rng);
        case Strategy::reorder_items: return reorder_items(honest, rng);
        case Strategy::stale_boundary: return stale_boundary(store, honest);
        case Strategy::foreign_proof: return foreign_proof(store, honest, rng);
    }
    return std::nullopt;
}

}  // namespace netchain::adversary
