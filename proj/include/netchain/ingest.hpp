#pragma once

// SNAP edge lists to blocks. SNAP files carry no weights, so weights are
// drawn from a seeded PRF of the edge itself.

#include <netchain/ledger.hpp>
#include <netchain/types.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace netchain::ingest {

struct EdgeRecord {
    VertexId u;
    VertexId v;
    std::optional<Weight> w;
    EdgeType type;

    bool operator==(const EdgeRecord&) const = default;
};

enum class Direction { directed, undirected };

struct Dataset {
    std::string_view name;
    EdgeType type;
    Direction direction;
};

/// "wiki" (vote, directed), "email" (friend, undirected), "gplus" (share, directed).
std::optional<Dataset> preset(std::string_view name);

/// Lines are `u v` or `u v w`, whitespace separated; '#' starts a comment
/// line and blank lines are skipped. Undirected input yields both
/// directions per line. Throws ParseError with the 1-based line number.
std::vector<EdgeRecord> parse_snap(std::istream& in, const EdgeType& type, Direction direction);
std::vector<EdgeRecord> parse_snap_file(const std::filesystem::path& path, const EdgeType& type,
                                        Direction direction);

/// Weight in [1, 100] as a function of (seed, u, v, type) only.
Weight synthetic_weight(std::uint64_t seed, const VertexId& u, const VertexId& v, const EdgeType& type);

/// Keeps explicit weights; fills in the rest with synthetic_weight.
std::vector<Object> assign_weights(std::span<const EdgeRecord> records, std::uint64_t seed);

struct BatchPlan {
    std::size_t objects_per_block = 100;
    std::optional<std::uint64_t> shuffle_seed;  // file order when unset
};

/// ceil(N / objects_per_block) groups in stream order. Throws
/// std::invalid_argument for objects_per_block == 0.
std::vector<std::vector<Object>> split(std::vector<Object> objects, const BatchPlan& plan);

/// Appends the groups from split() and returns the new block ids.
std::vector<BlockId> batch(std::vector<Object> objects, const BatchPlan& plan, ledger::Ledger& store,
                           std::optional<std::int64_t> timestamp = std::nullopt);

// Stand-in for wiki-Vote when the real file is not at hand: the same vertex
// and edge counts, heavy-tailed out-degree, no duplicate or self edges.
struct SyntheticGraph {
    std::size_t vertices = 7115;
    std::size_t edges = 103689;
    double exponent = 1.0;  // Zipf exponent of the out-degree ranks
    std::uint64_t seed = 1;
};

std::vector<EdgeRecord> synthesize(const SyntheticGraph& g, const EdgeType& type);

/// SNAP text for `records`, with a short '#' header.
void write_snap(std::ostream& out, std::span<const EdgeRecord> records);

}  // namespace netchain::ingest
