// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Fixed seeds; NETCHAIN_SEED shifts the randomized corpora.

#include <netchain/adversary.hpp>
#include <netchain/client.hpp>
#include <netchain/ingest.hpp>
#include <netchain/sp.hpp>

#include "support/oracle.hpp"
#include "workload.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>

using namespace netchain;
using Clock = std::chrono::steady_clock;

namespace {

std::map<int, std::pair<bool, std::string>> verdicts;

void report(int id, bool pass, const std::string& detail) { verdicts[id] = {pass, detail}; }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

using Blocks = std::vector<std::vector<Object>>;

std::shared_ptr<ledger::Ledger> mine(const Blocks& blocks, Mode mode) {
    auto store = std::make_shared<ledger::Ledger>(ledger::Ledger::in_memory(mode));
    for (const auto& b : blocks) store->append(b, 0);
    return store;
}

std::vector<CompoundValue> values(const std::vector<Hit>& hits) {
    std::vector<CompoundValue> out;
    for (const auto& h : hits) out.push_back(h.value);
    return out;
}

std::vector<CompoundValue> values(const std::vector<oracle::Hit>& hits) {
    std::vector<CompoundValue> out;
    for (const auto& h : hits) out.push_back(h.value);
    return out;
}

// ---------------------------------------------------------------------------
// 1 and 3: randomized round trips and VO cardinality on the same corpus.

void round_trips(std::uint64_t seed) {
    const auto t0 = Clock::now();
    std::size_t pairs[2] = {0, 0}, wrong[2] = {0, 0}, rejected[2] = {0, 0};
    std::size_t card_checks = 0, card_bad = 0;
    std::string first_bad;
    for (Mode mode : {Mode::netchain, Mode::netchain_plus}) {
        const int m = mode == Mode::netchain_plus;
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(m));
        while (pairs[m] < 1200) {
            oracle::ChainShape shape;
            shape.blocks = 20 + rng() % 40;
            shape.vertices = 3 + rng() % 8;
            shape.max_weight = 1 + static_cast<std::int64_t>(rng() % 30);
            const auto blocks = oracle::random_chain(rng, shape);
            const auto store = mine(blocks, mode);
            const auto headers = store->headers();
            for (int i = 0; i < 40; ++i, ++pairs[m]) {
                const auto key = oracle::random_key(rng, shape);
                BlockId lb = static_cast<BlockId>(rng() % blocks.size());
                BlockId ub = static_cast<BlockId>(rng() % blocks.size());
                if (lb > ub) std::swap(lb, ub);
                const Query q{key, 1 + rng() % 15, lb, ub};
                const auto resp = sp::search(*store, q);
                const auto verdict = client::verify(headers, q, resp);
                if (!verdict) {
                    ++rejected[m];
                    if (first_bad.empty()) first_bad = verdict.error().detail;
                    continue;
                }
                const auto expect = oracle::flat_top_k(blocks, key, q.k, lb, ub);
                if (!oracle::same_values(values(verdict.result().entries), values(expect))) ++wrong[m];

                const std::size_t matched = oracle::matched_blocks(blocks, key, lb, ub).size();
                ++card_checks;
                if (mode == Mode::netchain) {
                    card_bad += resp.proof_count() != static_cast<std::size_t>(ub - lb + 1);
                } else {
                    card_bad += resp.proof_count() > matched + 1 || resp.item_count() > q.k + matched;
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    report(1,
           pairs[0] >= 1000 && pairs[1] >= 1000 && wrong[0] + wrong[1] + rejected[0] + rejected[1] == 0 &&
               secs < 120,
           fmt("pairs netchain=%zu plus=%zu, rejected=%zu, oracle mismatches=%zu, %.1fs (limit 120s)%s", pairs[0],
               pairs[1], rejected[0] + rejected[1], wrong[0] + wrong[1], secs,
               first_bad.empty() ? "" : (" first rejection: " + first_bad).c_str()));
    report(3, card_bad == 0 && card_checks >= 2000,
           fmt("%zu responses checked, %zu violate proof/item count laws", card_checks, card_bad));
}

// ---------------------------------------------------------------------------
// 2: every strategy against >= 100 honest fixtures per mode.

void unforgeability(std::uint64_t seed) {
    std::string detail;
    bool pass = true;
    for (Mode mode : {Mode::netchain, Mode::netchain_plus}) {
        std::mt19937_64 rng(seed + 10 + static_cast<std::uint64_t>(mode));
        std::map<adversary::Strategy, std::size_t> applied, accepted, wrong_kind;
        std::size_t fixtures = 0;
        auto enough = [&] {
            for (auto s : adversary::all_strategies()) {
                const bool plus_only = s == adversary::Strategy::relabel_valid_as_boundary ||
                                       s == adversary::Strategy::stale_boundary;
                if (mode == Mode::netchain && plus_only) continue;
                if (applied[s] < 100) return false;
            }
            return true;
        };
        while ((!enough() || fixtures < 100) && fixtures < 5000) {
            oracle::ChainShape shape;
            shape.blocks = 15 + rng() % 25;
            shape.vertices = 3 + rng() % 4;
            const auto blocks = oracle::random_chain(rng, shape);
            const auto store = mine(blocks, mode);
            const auto headers = store->headers();
            for (int i = 0; i < 10; ++i, ++fixtures) {
                const auto& block = blocks[rng() % blocks.size()];
                const Object& o = block[rng() % block.size()];
                BlockId lb = static_cast<BlockId>(rng() % blocks.size());
                BlockId ub = static_cast<BlockId>(rng() % blocks.size());
                if (lb > ub) std::swap(lb, ub);
                const Query q{key_of(o), 1 + rng() % 6, lb, ub};
                const auto honest = sp::search(*store, q);
                for (auto s : adversary::all_strategies()) {
                    const auto forged = adversary::tamper(*store, honest, s, rng);
                    if (!forged) continue;
                    ++applied[s];
                    const auto verdict = client::verify(headers, q, forged->response);
                    if (!forged->expected) {
                        // identity must still verify
                        wrong_kind[s] += !verdict.accepted();
                        continue;
                    }
                    if (verdict) {
                        ++accepted[s];
                    } else if (verdict.error().kind != *forged->expected) {
                        ++wrong_kind[s];
                    }
                }
            }
        }
        detail += std::string(mode_name(mode)) + fmt(" (%zu fixtures):", fixtures);
        for (auto s : adversary::all_strategies()) {
            const bool plus_only =
                s == adversary::Strategy::relabel_valid_as_boundary || s == adversary::Strategy::stale_boundary;
            if (mode == Mode::netchain && plus_only) {
                detail += fmt(" %s=n/a", std::string(adversary::strategy_name(s)).c_str());
                continue;
            }
            pass = pass && applied[s] >= 100 && accepted[s] == 0 && wrong_kind[s] == 0;
            detail += fmt(" %s=%zu/%zu", std::string(adversary::strategy_name(s)).c_str(),
                          applied[s] - accepted[s] - wrong_kind[s], applied[s]);
        }
        detail += ";";
    }
    report(2, pass, "rejected-with-expected-kind/applied: " + detail);
}

// ---------------------------------------------------------------------------
// 4

void header_sizes() {
    const auto a = mine({{{"u", "v", "t", 1}}}, Mode::netchain);
    const auto b = mine({{{"u", "v", "t", 1}}}, Mode::netchain_plus);
    const std::size_t s0 = a->get_block(0).header.serialize().size();
    const std::size_t s1 = b->get_block(0).header.serialize().size();
    report(4, s0 == 112 && s1 == 144, fmt("netchain=%zu bytes (112), netchain-plus=%zu bytes (144)", s0, s1));
}

// ---------------------------------------------------------------------------
// 5, 6, 7: wiki-sized synthetic graph, 100 objects per block.

void wiki_scale(std::uint64_t seed) {
    ingest::SyntheticGraph g;
    g.exponent = 0.6;
    g.seed = seed;
    const auto objects = ingest::assign_weights(ingest::synthesize(g, "vote"), seed);

    std::shared_ptr<ledger::Ledger> stores[2];
    tools::MineSummary summary[2];
    for (Mode mode : {Mode::netchain, Mode::netchain_plus}) {
        const int m = mode == Mode::netchain_plus;
        stores[m] = std::make_shared<ledger::Ledger>(ledger::Ledger::in_memory(mode));
        summary[m] = tools::mine(*stores[m], objects, {100, std::nullopt}, 1000);
    }

    const BlockId lb = 0, ub = 999;
    const CompoundKey key = tools::pick_key(*stores[0], lb, ub, 10).value();
    const std::size_t matched = tools::matched_blocks(*stores[0], key, lb, ub);
    const Query q{key, 20, lb, ub};

    Response resp[2];
    double verify_ms[2];
    bool ok = true;
    for (int m = 0; m < 2; ++m) {
        resp[m] = sp::search(*stores[m], q);
        const auto headers = stores[m]->headers();
        const auto t = tools::time_repeats(20, [&] { ok = ok && client::verify(headers, q, resp[m]).accepted(); });
        verify_ms[m] = t.median_ms;
    }
    const double bytes0 = static_cast<double>(wire::encode(resp[0]).size());
    const double bytes1 = static_cast<double>(wire::encode(resp[1]).size());
    const double share = bytes1 / bytes0;
    report(5, ok && share < 0.25 && matched >= 5 && matched <= 20,
           fmt("key <%s,%s> matched %zu/1000 blocks; netchain %.0f B, netchain-plus %.0f B, ratio %.4f (< 0.25)",
               key.u.c_str(), key.type.c_str(), matched, bytes0, bytes1, share));
    const double speedup = verify_ms[0] / verify_ms[1];
    report(6, ok && speedup >= 5,
           fmt("verify median of 20: netchain %.4f ms, netchain-plus %.4f ms, speedup %.1fx (>= 5x)", verify_ms[0],
               verify_ms[1], speedup));

    bool pass7 = true;
    std::string d7;
    for (int m = 0; m < 2; ++m) {
        const double ms = 1000 * summary[m].ads_seconds / static_cast<double>(summary[m].blocks);
        const double kb = static_cast<double>(summary[m].ads_bytes) / 1024 / static_cast<double>(summary[m].blocks);
        const double table = m ? 5.68 : 5.62;  // Wiki row, S column
        const double ratio = kb / table;
        pass7 = pass7 && ms < 10 && ratio <= 3 && ratio >= 1.0 / 3;
        d7 += fmt("%s %.4f ms/block, %.2f KB/block (x%.2f of %.2f); ", m ? "netchain-plus" : "netchain", ms, kb, ratio,
                  table);
    }
    report(7, pass7, d7 + "limits < 10 ms and within 3x");
}

// ---------------------------------------------------------------------------
// 8

void substructures(std::uint64_t seed) {
    std::mt19937_64 rng(seed + 20);
    std::size_t smt_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 1 + rng() % 300;
        std::set<std::pair<std::string, std::string>> keys;
        while (keys.size() < n) keys.emplace("u" + std::to_string(rng() % (4 * n + 8)), "t" + std::to_string(rng() % 3));
        std::vector<smt::Leaf> leaves;
        std::vector<Digest> digests;
        for (const auto& [u, t] : keys) {
            Digest d;
            for (auto& b : d.bytes) b = static_cast<std::uint8_t>(rng());
            std::optional<BlockId> id;
            if (i % 2) id = static_cast<BlockId>(rng() % 50) - 1;
            leaves.push_back({{u, t}, d, id});
            digests.push_back(oracle::sha256(oracle::leaf_bytes(u, t, d, id)));
        }
        smt_bad += smt::build(leaves).root() != oracle::smt_root(digests);
    }

    std::map<CompoundKey, BlockId> entries;
    while (entries.size() < 80) {
        entries[{"u" + std::to_string(rng() % 400), "t" + std::to_string(rng() % 3)}] = static_cast<BlockId>(rng() % 900);
    }
    std::map<Bytes, std::int64_t> raw;
    for (const auto& [k, v] : entries) raw[oracle::key_bytes(k.u, k.type)] = v;
    const Digest expect = oracle::mpt_root(raw);
    std::vector<std::pair<CompoundKey, BlockId>> order(entries.begin(), entries.end());
    std::size_t mpt_bad = 0;
    for (int p = 0; p < 1000; ++p) {
        std::shuffle(order.begin(), order.end(), rng);
        mpt::Store s;
        for (const auto& [k, v] : order) s.set(k, v);
        mpt_bad += s.root() != expect;
    }

    // Chains rebuilt from the raw objects, linked item to item, anchored in
    // the leaf and through the leaf in the header root.
    oracle::ChainShape shape;
    shape.blocks = 200;
    shape.max_objects = 40;
    const auto blocks = oracle::random_chain(rng, shape);
    const auto store = mine(blocks, Mode::netchain_plus);
    std::size_t chains = 0, chain_bad = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& block = store->get_block(static_cast<BlockId>(b));
        std::map<CompoundKey, std::vector<CompoundValue>> groups;
        for (const auto& o : blocks[b]) groups[key_of(o)].push_back(value_of(o));
        std::vector<Digest> leaf_digests;
        for (std::size_t i = 0; i < block.ads.tree.size(); ++i) {
            const auto& leaf = block.ads.tree.leaf(i);
            auto vals = groups.at(leaf.key);
            std::stable_sort(vals.begin(), vals.end(), [](const auto& x, const auto& y) {
                return x.w != y.w ? x.w > y.w : x.v < y.v;
            });
            ++chains;
            const auto& items = block.ads.chains[i].items;
            bool good = leaf.ptr_h == oracle::chain_head(vals) && items.size() == vals.size();
            for (std::size_t j = 0; good && j < items.size(); ++j) {
                good = items[j].value == vals[j];
                const std::optional<Digest> next =
                    j + 1 < items.size()
                        ? std::optional(oracle::sha256(oracle::chain_item_bytes(items[j + 1].value.v, items[j + 1].value.w,
                                                                                 items[j + 1].ptr)))
                        : std::nullopt;
                good = good && items[j].ptr == next;
            }
            chain_bad += !good;
            leaf_digests.push_back(oracle::sha256(oracle::leaf_bytes(leaf.key.u, leaf.key.type, leaf.ptr_h, leaf.id_pre)));
        }
        chain_bad += oracle::smt_root(leaf_digests) != block.header.smt_root;
    }
    report(8, smt_bad == 0 && mpt_bad == 0 && chain_bad == 0,
           fmt("SMT roots 1000 sets: %zu mismatches; MPT 1000 permutations: %zu mismatches; %zu chains: %zu broken",
               smt_bad, mpt_bad, chains, chain_bad));
}

}  // namespace

int main() {
    const std::uint64_t seed = tools::seed_from_env(2024);
    std::printf("acceptance seed %llu\n", static_cast<unsigned long long>(seed));
    round_trips(seed);
    unforgeability(seed);
    header_sizes();
    wiki_scale(seed);
    substructures(seed);
    int failures = 0;
    for (const auto& [id, v] : verdicts) {
        std::printf("criterion %d: %s  %s\n", id, v.first ? "PASS" : "FAIL", v.second.c_str());
        failures += !v.first;
    }
    std::printf("%s\n", failures ? "acceptance: FAIL" : "acceptance: PASS");
    return failures ? 1 : 0;
}
