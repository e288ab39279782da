#include <netchain/protocol.hpp>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace netchain {
namespace {

constexpr char kMagic[6] = {'N', 'C', 'R', 'E', 'S', 'P'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kExistence = 1;
constexpr std::uint8_t kNonExistence = 2;

template <class T>
const T* find_by_block(const std::vector<T>& v, BlockId id) {
    const auto it = std::lower_bound(v.begin(), v.end(), id, [](const T& e, BlockId x) { return e.block_id < x; });
    return it != v.end() && it->block_id == id ? &*it : nullptr;
}

void write_results(Writer& w, const std::vector<BlockResult>& results) {
    w.u32(static_cast<std::uint32_t>(results.size()));
    for (const BlockResult& r : results) {
        w.i64(r.block_id).u32(static_cast<std::uint32_t>(r.items.size()));
        for (const ChainItem& item : r.items) codec::write_chain_item(w, item);
    }
}

void write_vo(Writer& w, const Response& resp) {
    w.u32(static_cast<std::uint32_t>(resp.proofs.size()));
    for (const ProofEntry& e : resp.proofs) {
        w.i64(e.block_id);
        if (const auto* p = std::get_if<smt::MerkleProof>(&e.proof)) {
            w.u8(kExistence);
            smt::write_proof(w, *p);
        } else {
            w.u8(kNonExistence);
            smt::write_proof(w, std::get<smt::NonExistenceProof>(e.proof));
        }
    }
    w.u8(resp.mpt_proof ? 1 : 0);
    if (resp.mpt_proof) mpt::write_proof(w, *resp.mpt_proof);
    w.u8(resp.out_boundary ? 1 : 0);
    if (resp.out_boundary) w.i64(*resp.out_boundary);
}

bool read_flag(Reader& r) {
    const std::uint8_t f = r.u8();
    if (f > 1) throw DecodeError("invalid presence flag");
    return f == 1;
}

}  // namespace

void validate(const Query& q, std::size_t chain_size) {
    if (q.k == 0) throw std::invalid_argument("k must be at least 1");
    if (q.lb < 0 || q.lb > q.ub) throw std::invalid_argument("window must satisfy 0 <= lb <= ub");
    if (static_cast<std::uint64_t>(q.ub) >= chain_size) {
        throw std::out_of_range("window upper bound " + std::to_string(q.ub) + " beyond chain of " +
                                std::to_string(chain_size) + " blocks");
    }
}

const BlockResult* Response::result_for(BlockId id) const { return find_by_block(results, id); }
const ProofEntry* Response::proof_for(BlockId id) const { return find_by_block(proofs, id); }

std::size_t Response::item_count() const noexcept {
    std::size_t n = 0;
    for (const BlockResult& r : results) n += r.items.size();
    return n;
}

std::vector<ItemRef> select_top_k(const std::vector<BlockResult>& results, std::size_t k) {
    struct Candidate {
        Weight w;
        ItemRef ref;
    };
    std::vector<Candidate> all;
    for (const BlockResult& r : results) {
        for (std::size_t j = 0; j < r.items.size(); ++j) all.push_back({r.items[j].value.w, {r.block_id, j}});
    }
    const auto better = [](const Candidate& a, const Candidate& b) {
        if (a.w != b.w) return a.w > b.w;
        return a.ref < b.ref;
    };
    const std::size_t n = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), better);
    std::vector<ItemRef> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(all[i].ref);
    return out;
}

namespace wire {

void write_query(Writer& w, const Query& q) {
    codec::write_key(w, q.key);
    w.u32(static_cast<std::uint32_t>(q.k)).i64(q.lb).i64(q.ub);
}

Query read_query(Reader& r) {
    Query q;
    q.key = codec::read_key(r);
    q.k = r.u32();
    q.lb = r.i64();
    q.ub = r.i64();
    return q;
}

Bytes encode(const Response& resp) {
    Writer w;
    w.raw(as_bytes({kMagic, sizeof(kMagic)})).u8(kVersion).u8(static_cast<std::uint8_t>(resp.mode));
    write_query(w, resp.query);
    write_results(w, resp.results);
    write_vo(w, resp);
    return std::move(w).bytes();
}

Response decode(ByteView bytes) {
    Reader r(bytes);
    const ByteView magic = r.raw(sizeof(kMagic));
    if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) throw DecodeError("not a response file");
    if (r.u8() != kVersion) throw DecodeError("unsupported response version");
    const std::uint8_t mode = r.u8();
    if (mode > 1) throw DecodeError("unknown mode byte");

    Response resp;
    resp.mode = static_cast<Mode>(mode);
    resp.query = read_query(r);

    const std::size_t n_results = r.count(12);
    for (std::size_t i = 0; i < n_results; ++i) {
        BlockResult br;
        br.block_id = r.i64();
        const std::size_t n_items = r.count(46);
        for (std::size_t j = 0; j < n_items; ++j) br.items.push_back(codec::read_chain_item(r));
        resp.results.push_back(std::move(br));
    }

    const std::size_t n_proofs = r.count(9);
    for (std::size_t i = 0; i < n_proofs; ++i) {
        ProofEntry e;
        e.block_id = r.i64();
        switch (r.u8()) {
            case kExistence:
                e.proof = smt::read_proof(r);
                break;
            case kNonExistence:
                e.proof = smt::read_non_existence_proof(r);
                break;
            default:
                throw DecodeError("unknown proof kind");
        }
        resp.proofs.push_back(std::move(e));
    }
    if (read_flag(r)) resp.mpt_proof = mpt::read_proof(r);
    if (read_flag(r)) resp.out_boundary = r.i64();
    r.expect_end();

    // Block order is checked by the verifier, which reports it as a
    // boundary violation rather than a format error.
    return resp;
}

std::size_t result_bytes(const Response& resp) {
    Writer w;
    write_results(w, resp.results);
    return w.size();
}

std::size_t vo_bytes(const Response& resp) {
    Writer w;
    write_vo(w, resp);
    return w.size();
}

void save(const std::filesystem::path& path, const Response& resp) {
    const Bytes bytes = encode(resp);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + path.string());
}

Response load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode(bytes);
}

}  // namespace wire
}  // namespace netchain
