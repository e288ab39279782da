#include <netchain/codec.hpp>
#include <netchain/errors.hpp>
#include <netchain/ingest.hpp>
#include <netchain/sha256.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace netchain::ingest {
namespace {

Weight parse_weight(std::string_view s, std::size_t line) {
    Weight w = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), w);
    if (ec != std::errc{} || end != s.data() + s.size()) throw ParseError(line, "bad weight '" + std::string(s) + "'");
    return w;
}

}  // namespace

std::optional<Dataset> preset(std::string_view name) {
    if (name == "wiki") return Dataset{"wiki", "vote", Direction::directed};
    if (name == "email") return Dataset{"email", "friend", Direction::undirected};
    if (name == "gplus") return Dataset{"gplus", "share", Direction::directed};
    return std::nullopt;
}

std::vector<EdgeRecord> parse_snap(std::istream& in, const EdgeType& type, Direction direction) {
    std::vector<EdgeRecord> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream fields(line);
        std::vector<std::string> tok;
        for (std::string f; fields >> f;) tok.push_back(std::move(f));
        if (tok.size() != 2 && tok.size() != 3) {
            throw ParseError(number, "expected 2 or 3 fields, got " + std::to_string(tok.size()));
        }
        EdgeRecord r{tok[0], tok[1], std::nullopt, type};
        if (tok.size() == 3) r.w = parse_weight(tok[2], number);
        out.push_back(r);
        if (direction == Direction::undirected) out.push_back({r.v, r.u, r.w, type});
    }
    if (in.bad()) throw IoError("read failed at line " + std::to_string(number));
    return out;
}

std::vector<EdgeRecord> parse_snap_file(const std::filesystem::path& path, const EdgeType& type,
                                        Direction direction) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_snap(in, type, direction);
}

Weight synthetic_weight(std::uint64_t seed, const VertexId& u, const VertexId& v, const EdgeType& type) {
    Writer w;
    w.u64(seed).str(u).str(v).str(type);
    const Digest d = sha256::digest(w.bytes());
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x = (x << 8) | d.bytes[i];
    return static_cast<Weight>(x % 100) + 1;
}

std::vector<Object> assign_weights(std::span<const EdgeRecord> records, std::uint64_t seed) {
    std::vector<Object> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back({r.u, r.v, r.type, r.w ? *r.w : synthetic_weight(seed, r.u, r.v, r.type)});
    }
    return out;
}

std::vector<std::vector<Object>> split(std::vector<Object> objects, const BatchPlan& plan) {
    if (plan.objects_per_block == 0) throw std::invalid_argument("objects_per_block must be positive");
    if (plan.shuffle_seed) {
        std::mt19937_64 rng(*plan.shuffle_seed);
        std::shuffle(objects.begin(), objects.end(), rng);
    }
    std::vector<std::vector<Object>> out;
    for (std::size_t i = 0; i < objects.size(); i += plan.objects_per_block) {
        const auto end = std::min(objects.size(), i + plan.objects_per_block);
        out.emplace_back(std::make_move_iterator(objects.begin() + static_cast<std::ptrdiff_t>(i)),
                         std::make_move_iterator(objects.begin() + static_cast<std::ptrdiff_t>(end)));
    }
    return out;
}

std::vector<BlockId> batch(std::vector<Object> objects, const BatchPlan& plan, ledger::Ledger& store,
                           std::optional<std::int64_t> timestamp) {
    std::vector<BlockId> ids;
    for (const auto& group : split(std::move(objects), plan)) ids.push_back(store.append(group, timestamp));
    return ids;
}

std::vector<EdgeRecord> synthesize(const SyntheticGraph& g, const EdgeType& type) {
    if (g.vertices < 2) throw std::invalid_argument("need at least two vertices");
    if (g.edges > g.vertices * (g.vertices - 1)) throw std::invalid_argument("more edges than vertex pairs");
    std::mt19937_64 rng(g.seed);
    std::vector<double> rank(g.vertices);
    for (std::size_t i = 0; i < g.vertices; ++i) rank[i] = 1.0 / std::pow(static_cast<double>(i + 1), g.exponent);
    std::discrete_distribution<std::size_t> source(rank.begin(), rank.end());
    // In-degree is skewed too, but over a different vertex order.
    std::vector<std::size_t> relabel(g.vertices);
    for (std::size_t i = 0; i < g.vertices; ++i) relabel[i] = i;
    std::shuffle(relabel.begin(), relabel.end(), rng);

    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<EdgeRecord> out;
    out.reserve(g.edges);
    while (out.size() < g.edges) {
        const std::size_t u = source(rng);
        const std::size_t v = relabel[source(rng)];
        if (u == v || !seen.emplace(u, v).second) continue;
        out.push_back({std::to_string(u), std::to_string(v), std::nullopt, type});
    }
    return out;
}

void write_snap(std::ostream& out, std::span<const EdgeRecord> records) {
    out << "# Directed graph\n# FromNodeId\tToNodeId\n";
    for (const auto& r : records) {
        out << r.u << '\t' << r.v;
        if (r.w) out << '\t' << *r.w;
        out << '\n';
    }
}

}  // namespace netchain::ingest
