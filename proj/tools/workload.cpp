#include "workload.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <numeric>
#include <string_view>

namespace netchain::tools {

Timing time_repeats(std::size_t repeats, const std::function<void()>& body) {
    std::vector<double> ms;
    ms.reserve(repeats);
    for (std::size_t i = 0; i < std::max<std::size_t>(repeats, 1); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    Timing t;
    t.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
    std::sort(ms.begin(), ms.end());
    const std::size_t n = ms.size();
    t.median_ms = n % 2 ? ms[n / 2] : (ms[n / 2 - 1] + ms[n / 2]) / 2;
    return t;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
    const char* env = std::getenv("NETCHAIN_SEED");
    if (!env || !*env) return fallback;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    return *end ? fallback : v;
}

std::optional<CompoundKey> pick_key(const ledger::Ledger& store, BlockId lb, BlockId ub, std::size_t target) {
    struct Count {
        std::size_t blocks = 0;
        std::size_t objects = 0;
    };
    std::map<CompoundKey, Count> counts;
    for (BlockId id = lb; id <= ub; ++id) {
        const auto& ads = store.get_block(id).ads;
        for (std::size_t i = 0; i < ads.tree.size(); ++i) {
            auto& c = counts[ads.tree.leaf(i).key];
            ++c.blocks;
            c.objects += ads.chains[i].items.size();
        }
    }
    std::optional<CompoundKey> best;
    Count best_count;
    auto distance = [target](std::size_t n) { return n > target ? n - target : target - n; };
    for (const auto& [key, c] : counts) {
        if (!best || distance(c.blocks) < distance(best_count.blocks) ||
            (distance(c.blocks) == distance(best_count.blocks) && c.objects > best_count.objects)) {
            best = key;
            best_count = c;
        }
    }
    return best;
}

std::size_t matched_blocks(const ledger::Ledger& store, const CompoundKey& key, BlockId lb, BlockId ub) {
    std::size_t n = 0;
    for (BlockId id = lb; id <= ub; ++id) n += store.get_block(id).ads.tree.find(key).has_value();
    return n;
}

MineSummary mine(ledger::Ledger& store, std::vector<Object> objects, const ingest::BatchPlan& plan,
                 std::optional<std::size_t> max_blocks) {
    MineSummary s;
    for (const auto& group : ingest::split(std::move(objects), plan)) {
        if (max_blocks && s.blocks >= *max_blocks) break;
        ledger::AppendStats stats;
        store.append(group, std::nullopt, &stats);
        ++s.blocks;
        s.objects += group.size();
        s.ads_seconds += std::chrono::duration<double>(stats.ads_build).count();
        s.ads_bytes += stats.ads_bytes;
        s.mpt_bytes += stats.mpt_bytes;
    }
    return s;
}

}  // namespace netchain::tools
