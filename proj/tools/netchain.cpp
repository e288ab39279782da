#include "workload.hpp"

#include <netchain/adversary.hpp>
#include <netchain/client.hpp>
#include <netchain/errors.hpp>
#include <netchain/ingest.hpp>
#include <netchain/sp.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

using namespace netchain;

namespace {

constexpr int kReject = 1;
constexpr int kFailure = 2;

struct QueryFlags {
    std::string u;
    std::string type;
    std::size_t k = 20;
    BlockId lb = 0;
    BlockId ub = 0;

    void add(CLI::App* cmd, bool required) {
        cmd->add_option("--u", u, "start vertex")->required(required);
        cmd->add_option("--type", type, "edge type")->required(required);
        cmd->add_option("--k", k, "result size")->capture_default_str();
        cmd->add_option("--lb", lb, "first block of the window")->required(required);
        cmd->add_option("--ub", ub, "last block of the window")->required(required);
    }
    Query query() const { return {{u, type}, k, lb, ub}; }
};

Mode mode_arg(const std::string& s) {
    if (auto m = parse_mode(s)) return *m;
    throw CLI::ValidationError("--mode", "expected netchain or netchain-plus");
}

int cmd_synth(const std::filesystem::path& out, const ingest::SyntheticGraph& g, const std::string& type) {
    const auto records = ingest::synthesize(g, type);
    std::ofstream f(out);
    if (!f) throw IoError("cannot write " + out.string());
    ingest::write_snap(f, records);
    std::printf("edges,vertices\n%zu,%zu\n", records.size(), g.vertices);
    return 0;
}

struct MineFlags {
    std::filesystem::path dataset, ledger_path, headers_path;
    std::string preset = "wiki", type, mode = "netchain";
    bool undirected = false, csv_header = false;
    std::size_t per_block = 100;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> shuffle;
    std::optional<std::size_t> max_blocks;
};

int cmd_mine(const MineFlags& f) {
    auto dataset = ingest::preset(f.preset);
    if (!dataset) throw CLI::ValidationError("--preset", "unknown dataset preset " + f.preset);
    const EdgeType type = f.type.empty() ? dataset->type : f.type;
    const auto direction = f.undirected ? ingest::Direction::undirected : dataset->direction;
    const std::uint64_t seed = tools::seed_from_env(f.seed);

    auto records = ingest::parse_snap_file(f.dataset, type, direction);
    auto store = ledger::Ledger::create(f.ledger_path, mode_arg(f.mode));
    const auto s = tools::mine(store, ingest::assign_weights(records, seed), {f.per_block, f.shuffle}, f.max_blocks);
    if (!f.headers_path.empty()) store.headers().save(f.headers_path);

    const double blocks = static_cast<double>(std::max<std::size_t>(s.blocks, 1));
    if (f.csv_header) std::printf("dataset,mode,blocks,objects,ads_s_per_block,ads_kb_per_block,mpt_kb_per_block\n");
    std::printf("%s,%s,%zu,%zu,%.6f,%.3f,%.3f\n", f.dataset.filename().c_str(), f.mode.c_str(), s.blocks, s.objects,
                s.ads_seconds / blocks, static_cast<double>(s.ads_bytes) / 1024 / blocks,
                static_cast<double>(s.mpt_bytes) / 1024 / blocks);
    return 0;
}

int cmd_query(const std::filesystem::path& ledger_path, const QueryFlags& qf, const std::filesystem::path& out,
              std::size_t repeats, bool csv_header) {
    const auto store = ledger::Ledger::open(ledger_path);
    const Query q = qf.query();
    Response resp;
    const auto t = tools::time_repeats(repeats, [&] { resp = sp::search(store, q); });
    wire::save(out, resp);
    if (csv_header) {
        std::printf("mode,lb,ub,k,search_ms_median,search_ms_mean,resp_bytes,r_bytes,vo_bytes,n_proofs,n_items\n");
    }
    std::printf("%s,%lld,%lld,%zu,%.4f,%.4f,%zu,%zu,%zu,%zu,%zu\n", std::string(mode_name(store.mode())).c_str(),
                static_cast<long long>(q.lb), static_cast<long long>(q.ub), q.k, t.median_ms, t.mean_ms,
                wire::encode(resp).size(), wire::result_bytes(resp), wire::vo_bytes(resp), resp.proof_count(),
                resp.item_count());
    return 0;
}

int cmd_verify(const std::filesystem::path& headers_path, const std::filesystem::path& response,
               const QueryFlags& qf, bool query_given, std::size_t repeats) {
    const auto headers = ledger::HeaderChain::load(headers_path);
    Response resp;
    try {
        resp = wire::load(response);
    } catch (const DecodeError& e) {
        std::fprintf(stderr, "reject: malformed response: %s\n", e.what());
        return kReject;
    }
    // Without explicit flags the query embedded in the response is checked,
    // which proves the answer is right for that query only.
    const Query q = query_given ? qf.query() : resp.query;

    std::optional<client::Verdict> verdict;
    const auto t = tools::time_repeats(repeats, [&] { verdict.emplace(client::verify(headers, q, resp)); });
    if (!*verdict) {
        const auto& e = verdict->error();
        std::fprintf(stderr, "reject: %s", std::string(client::error_name(e.kind)).c_str());
        if (e.block_id) std::fprintf(stderr, " block=%lld", static_cast<long long>(*e.block_id));
        std::fprintf(stderr, ": %s\n", e.detail.c_str());
        std::printf("verify_ms_median,verify_ms_mean\n%.4f,%.4f\n", t.median_ms, t.mean_ms);
        return kReject;
    }
    std::printf("rank,v,w,block\n");
    std::size_t rank = 0;
    for (const auto& h : verdict->result().entries) {
        std::printf("%zu,%s,%lld,%lld\n", ++rank, h.value.v.c_str(), static_cast<long long>(h.value.w),
                    static_cast<long long>(h.block_id));
    }
    std::printf("verify_ms_median,verify_ms_mean\n%.4f,%.4f\n", t.median_ms, t.mean_ms);
    return 0;
}

int cmd_tamper(const std::filesystem::path& ledger_path, const std::filesystem::path& response,
               const std::string& name, const std::filesystem::path& out, std::uint64_t seed) {
    const auto strategy = adversary::parse_strategy(name);
    if (!strategy) {
        std::string known;
        for (auto s : adversary::all_strategies()) known += " " + std::string(adversary::strategy_name(s));
        throw CLI::ValidationError("--strategy", "unknown strategy " + name + "; known:" + known);
    }
    const auto store = ledger::Ledger::open(ledger_path);
    std::mt19937_64 rng(tools::seed_from_env(seed));
    const auto forged = adversary::tamper(store, wire::load(response), *strategy, rng);
    if (!forged) {
        std::fprintf(stderr, "%s: nothing to tamper with in this response\n", name.c_str());
        return 3;
    }
    wire::save(out, forged->response);
    std::printf("strategy,expected\n%s,%s\n", name.c_str(),
                forged->expected ? std::string(client::error_name(*forged->expected)).c_str() : "accept");
    return 0;
}

struct BenchFlags {
    std::vector<std::filesystem::path> ledgers;
    std::vector<BlockId> windows{200, 400, 600, 800, 1000};
    std::vector<std::size_t> ks{10, 20, 50};
    std::string u, type;
    double density = 0.01;
    std::size_t repeats = 20;
};

int cmd_bench(const BenchFlags& f) {
    std::vector<ledger::Ledger> stores;
    for (const auto& p : f.ledgers) stores.push_back(ledger::Ledger::open(p));
    const BlockId widest = *std::max_element(f.windows.begin(), f.windows.end());
    for (const auto& s : stores) {
        if (static_cast<BlockId>(s.size()) < widest) {
            throw std::out_of_range("ledger has " + std::to_string(s.size()) + " blocks, window needs " +
                                    std::to_string(widest));
        }
    }
    CompoundKey key{f.u, f.type};
    if (f.u.empty()) {
        const auto target = static_cast<std::size_t>(f.density * static_cast<double>(widest) + 0.5);
        key = tools::pick_key(stores.front(), 0, widest - 1, std::max<std::size_t>(target, 1)).value();
    }

    std::printf("mode,window,k,u,type,matched,search_ms_median,search_ms_mean,verify_ms_median,verify_ms_mean,"
                "resp_bytes,r_bytes,vo_bytes,n_proofs,n_items\n");
    for (const auto& store : stores) {
        const auto headers = store.headers();
        for (BlockId w : f.windows) {
            for (std::size_t k : f.ks) {
                const Query q{key, k, 0, w - 1};
                Response resp;
                const auto ts = tools::time_repeats(f.repeats, [&] { resp = sp::search(store, q); });
                bool ok = true;
                const auto tv = tools::time_repeats(f.repeats, [&] { ok = client::verify(headers, q, resp).accepted(); });
                if (!ok) throw IntegrityError("honest response rejected during bench");
                std::printf("%s,%lld,%zu,%s,%s,%zu,%.4f,%.4f,%.4f,%.4f,%zu,%zu,%zu,%zu,%zu\n",
                            std::string(mode_name(store.mode())).c_str(), static_cast<long long>(w), k,
                            key.u.c_str(), key.type.c_str(), tools::matched_blocks(store, key, 0, w - 1),
                            ts.median_ms, ts.mean_ms, tv.median_ms, tv.mean_ms, wire::encode(resp).size(),
                            wire::result_bytes(resp), wire::vo_bytes(resp), resp.proof_count(), resp.item_count());
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Authenticated top-k graph queries over a block ledger"};
    app.require_subcommand(1);
    int rc = 0;

    auto* synth = app.add_subcommand("synth", "write a wiki-Vote sized synthetic SNAP edge list");
    std::filesystem::path synth_out;
    ingest::SyntheticGraph graph;
    graph.exponent = 0.6;
    std::string synth_type = "vote";
    synth->add_option("--out", synth_out)->required();
    synth->add_option("--vertices", graph.vertices)->capture_default_str();
    synth->add_option("--edges", graph.edges)->capture_default_str();
    synth->add_option("--exponent", graph.exponent)->capture_default_str();
    synth->add_option("--seed", graph.seed)->capture_default_str();
    synth->callback([&] {
        graph.seed = tools::seed_from_env(graph.seed);
        rc = cmd_synth(synth_out, graph, synth_type);
    });

    auto* mine = app.add_subcommand("mine", "ingest a SNAP file into a ledger");
    MineFlags mf;
    mine->add_option("--dataset", mf.dataset)->required()->check(CLI::ExistingFile);
    mine->add_option("--preset", mf.preset, "wiki, email or gplus")->capture_default_str();
    mine->add_option("--type", mf.type, "override the preset edge type");
    mine->add_flag("--undirected", mf.undirected, "emit both directions per line");
    mine->add_option("--mode", mf.mode)->capture_default_str();
    mine->add_option("--ledger", mf.ledger_path)->required();
    mine->add_option("--headers", mf.headers_path, "header export for light clients");
    mine->add_option("--per-block", mf.per_block)->capture_default_str()->check(CLI::PositiveNumber);
    mine->add_option("--seed", mf.seed, "weight seed")->capture_default_str();
    mine->add_option("--shuffle", mf.shuffle, "shuffle edges with this seed before batching");
    mine->add_option("--max-blocks", mf.max_blocks);
    mine->add_flag("--csv-header", mf.csv_header);
    mine->callback([&] { rc = cmd_mine(mf); });

    auto* query = app.add_subcommand("query", "answer a query and write the response");
    std::filesystem::path q_ledger, q_out;
    QueryFlags qf;
    std::size_t q_repeats = 20;
    bool q_header = false;
    query->add_option("--ledger", q_ledger)->required()->check(CLI::ExistingFile);
    qf.add(query, true);
    query->add_option("--out", q_out)->required();
    query->add_option("--repeats", q_repeats)->capture_default_str();
    query->add_flag("--csv-header", q_header);
    query->callback([&] { rc = cmd_query(q_ledger, qf, q_out, q_repeats, q_header); });

    auto* verify = app.add_subcommand("verify", "check a response against exported headers");
    std::filesystem::path v_headers, v_resp;
    QueryFlags vf;
    std::size_t v_repeats = 20;
    verify->add_option("--headers", v_headers)->required()->check(CLI::ExistingFile);
    verify->add_option("--response", v_resp)->required()->check(CLI::ExistingFile);
    vf.add(verify, false);
    verify->add_option("--repeats", v_repeats)->capture_default_str();
    verify->callback([&] {
        const bool given = verify->count("--u") > 0;
        if (given && !(verify->count("--type") && verify->count("--lb") && verify->count("--ub"))) {
            throw CLI::ValidationError("query", "--u needs --type, --lb and --ub");
        }
        rc = cmd_verify(v_headers, v_resp, vf, given, v_repeats);
    });

    auto* tamper = app.add_subcommand("tamper", "forge a response from an honest one");
    std::filesystem::path t_ledger, t_resp, t_out;
    std::string t_strategy;
    std::uint64_t t_seed = 1;
    tamper->add_option("--ledger", t_ledger)->required()->check(CLI::ExistingFile);
    tamper->add_option("--response", t_resp)->required()->check(CLI::ExistingFile);
    tamper->add_option("--strategy", t_strategy)->required();
    tamper->add_option("--out", t_out)->required();
    tamper->add_option("--seed", t_seed)->capture_default_str();
    tamper->callback([&] { rc = cmd_tamper(t_ledger, t_resp, t_strategy, t_out, t_seed); });

    auto* bench = app.add_subcommand("bench", "search/verify grid over windows and k as CSV");
    BenchFlags bf;
    bench->add_option("--ledger", bf.ledgers, "one or more prepared ledgers")->required()->check(CLI::ExistingFile);
    bench->add_option("--windows", bf.windows)->delimiter(',')->capture_default_str();
    bench->add_option("--ks", bf.ks)->delimiter(',')->capture_default_str();
    bench->add_option("--u", bf.u, "query key; picked by --density when absent");
    bench->add_option("--type", bf.type);
    bench->add_option("--density", bf.density, "target fraction of matched blocks")->capture_default_str();
    bench->add_option("--repeats", bf.repeats)->capture_default_str();
    bench->callback([&] { rc = cmd_bench(bf); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
    return rc;
}
