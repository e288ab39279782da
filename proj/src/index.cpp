#include <netchain/index.hpp>

#include <algorithm>
#include <map>

namespace netchain {

HashChain build_chain(std::vector<CompoundValue> values) {
    if (values.empty()) throw ConstructionError("hash chain needs at least one value");
    std::stable_sort(values.begin(), values.end(), [](const CompoundValue& a, const CompoundValue& b) {
        if (a.w != b.w) return a.w > b.w;
        return a.v < b.v;
    });

    HashChain chain;
    chain.items.resize(values.size());
    std::optional<Digest> next;
    for (std::size_t j = values.size(); j-- > 0;) {
        chain.items[j].value = std::move(values[j]);
        chain.items[j].ptr = next;
        next = codec::chain_item_digest(chain.items[j]);
    }
    return chain;
}

bool chain_links_valid(const HashChain& chain) {
    if (chain.items.empty() || chain.items.back().ptr.has_value()) return false;
    for (std::size_t j = 0; j + 1 < chain.items.size(); ++j) {
        if (chain.items[j].ptr != codec::chain_item_digest(chain.items[j + 1])) return false;
    }
    return true;
}

const HashChain* BlockAds::chain_for(const CompoundKey& key) const {
    const auto i = tree.find(key);
    return i ? &chains[*i] : nullptr;
}

AdsBuild build_block_ads(std::span<const Object> objects, Mode mode, mpt::Store* mpt, BlockId block_id) {
    if (objects.empty()) throw ConstructionError("block needs at least one object");
    if ((mode == Mode::netchain_plus) != (mpt != nullptr)) {
        throw ConstructionError("an MPT is required in NetChain+ mode and only there");
    }

    std::map<CompoundKey, std::vector<CompoundValue>> groups;
    for (const Object& o : objects) {
        if (o.u.empty() || o.v.empty() || o.type.empty()) {
            throw ConstructionError("object fields u, v and type must be nonempty");
        }
        groups[key_of(o)].push_back(value_of(o));
    }

    AdsBuild out;
    std::vector<smt::Leaf> leaves;
    leaves.reserve(groups.size());
    out.ads.chains.reserve(groups.size());
    for (auto& [key, values] : groups) {
        HashChain chain = build_chain(std::move(values));
        smt::Leaf leaf{key, chain.head_digest(), std::nullopt};
        if (mpt) {
            leaf.id_pre = mpt->get(key).value.value_or(kNoBlock);
            mpt->set(key, block_id);
        }
        leaves.push_back(std::move(leaf));
        out.ads.chains.push_back(std::move(chain));
    }
    out.ads.tree = smt::Tree::build(std::move(leaves));
    if (mpt) out.mpt_root = mpt->root();
    return out;
}

void write_ads(Writer& w, const BlockAds& ads) {
    const auto leaves = ads.tree.leaves();
    w.u32(static_cast<std::uint32_t>(leaves.size()));
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        codec::write_key(w, leaves[i].key);
        w.u32(static_cast<std::uint32_t>(ads.chains[i].items.size()));
        for (const ChainItem& item : ads.chains[i].items) codec::write_chain_item(w, item);
    }

    w.u32(static_cast<std::uint32_t>(leaves.size()));
    for (const smt::Leaf& leaf : leaves) smt::write_leaf(w, leaf);

    const auto& levels = ads.tree.levels();
    w.u32(static_cast<std::uint32_t>(levels.size() - 1));
    for (std::size_t depth = 1; depth < levels.size(); ++depth) {
        w.u32(static_cast<std::uint32_t>(levels[depth].size()));
        for (const Digest& d : levels[depth]) w.digest(d);
    }
}

BlockAds read_ads(Reader& r) {
    std::vector<CompoundKey> keys;
    std::vector<HashChain> chains;
    const std::size_t n_records = r.count(9);
    for (std::size_t i = 0; i < n_records; ++i) {
        keys.push_back(codec::read_key(r));
        HashChain chain;
        const std::size_t n_items = r.count(46);
        for (std::size_t j = 0; j < n_items; ++j) chain.items.push_back(codec::read_chain_item(r));
        chains.push_back(std::move(chain));
    }

    std::vector<smt::Leaf> leaves;
    const std::size_t n_leaves = r.count(4);
    for (std::size_t i = 0; i < n_leaves; ++i) leaves.push_back(smt::read_leaf(r));

    std::vector<std::vector<Digest>> stored_levels;
    const std::size_t n_levels = r.count(4);
    for (std::size_t depth = 0; depth < n_levels; ++depth) {
        std::vector<Digest> level(r.count(Digest::size));
        for (Digest& d : level) d = r.digest();
        stored_levels.push_back(std::move(level));
    }

    if (leaves.size() != keys.size()) throw IntegrityError("dictionary and SMT disagree on key count");
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (leaves[i].key != keys[i]) throw IntegrityError("dictionary and SMT disagree on keys");
        if (!chain_links_valid(chains[i])) throw IntegrityError("hash chain links do not recompute");
        if (leaves[i].ptr_h != chains[i].head_digest()) throw IntegrityError("leaf ptr_h != chain head digest");
        if (!std::is_sorted(chains[i].items.begin(), chains[i].items.end(),
                            [](const ChainItem& a, const ChainItem& b) { return a.value.w > b.value.w; })) {
            throw IntegrityError("chain weights not in descending order");
        }
    }

    BlockAds ads;
    try {
        ads.tree = smt::Tree::build(std::move(leaves));
    } catch (const ConstructionError& e) {
        throw IntegrityError(std::string("stored SMT leaves invalid: ") + e.what());
    }
    const auto& levels = ads.tree.levels();
    if (stored_levels.size() + 1 != levels.size() ||
        !std::equal(stored_levels.begin(), stored_levels.end(), levels.begin() + 1)) {
        throw IntegrityError("stored SMT levels do not match recomputed tree");
    }
    ads.chains = std::move(chains);
    return ads;
}

}  // namespace netchain
