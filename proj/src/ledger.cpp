#include <netchain/ledger.hpp>
#include <netchain/sha256.hpp>

#include <chrono>
#include <cstring>
#include <ctime>
#include <deque>
#include <fstream>
#include <iterator>
#include <mutex>
#include <shared_mutex>

namespace netchain::ledger {
namespace {

constexpr char kLedgerMagic[8] = {'N', 'E', 'T', 'C', 'H', 'A', 'I', 'N'};
constexpr char kHeaderMagic[6] = {'N', 'C', 'H', 'D', 'R', 'S'};
constexpr std::uint8_t kFormatVersion = 1;

constexpr std::uint8_t kRecordBlock = 0x01;
constexpr std::uint8_t kRecordMptNodes = 0x02;

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return data;
}

void write_all(std::ofstream& out, ByteView bytes, const std::filesystem::path& path) {
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

Bytes frame_record(std::uint8_t kind, const Bytes& payload) {
    Writer w(payload.size() + 37);
    w.u8(kind).u32(static_cast<std::uint32_t>(payload.size())).raw(payload).digest(hash(payload));
    return std::move(w).bytes();
}

Bytes encode_block_payload(const Block& block) {
    Writer w;
    w.raw(block.header.serialize());
    w.u32(static_cast<std::uint32_t>(block.objects.size()));
    for (const Object& o : block.objects) codec::write_object(w, o);
    write_ads(w, block.ads);
    return std::move(w).bytes();
}

Block decode_block_payload(ByteView payload, Mode mode) {
    Reader r(payload);
    Block block;
    block.header = BlockHeader::parse(r.raw(header_size(mode)), mode);
    const std::size_t n = r.count(21);
    block.objects.reserve(n);
    for (std::size_t i = 0; i < n; ++i) block.objects.push_back(codec::read_object(r));
    block.ads = read_ads(r);
    r.expect_end();
    return block;
}

}  // namespace

std::size_t header_size(Mode mode) noexcept {
    return mode == Mode::netchain ? kNetChainHeaderSize : kNetChainPlusHeaderSize;
}

// ---------------------------------------------------------------------------
// BlockHeader

Bytes BlockHeader::serialize() const {
    Writer w(kNetChainPlusHeaderSize);
    w.i64(id).i64(timestamp).digest(prev_hash).digest(tx_root).digest(smt_root);
    if (mpt_root) w.digest(*mpt_root);
    return std::move(w).bytes();
}

BlockHeader BlockHeader::parse(ByteView bytes, Mode mode) {
    if (bytes.size() != header_size(mode)) throw DecodeError("header has wrong length for mode");
    Reader r(bytes);
    BlockHeader h;
    h.id = r.i64();
    h.timestamp = r.i64();
    h.prev_hash = r.digest();
    h.tx_root = r.digest();
    h.smt_root = r.digest();
    if (mode == Mode::netchain_plus) h.mpt_root = r.digest();
    r.expect_end();
    return h;
}

Digest BlockHeader::hash() const {
    Writer w(1 + kNetChainPlusHeaderSize);
    w.u8(tag::kHeader).raw(serialize());
    return netchain::hash(w.bytes());
}

std::size_t Block::ads_bytes() const {
    Writer w;
    write_ads(w, ads);
    return w.size();
}

Digest tx_root(std::span<const Object> objects) {
    std::vector<Bytes> encoded;
    encoded.reserve(objects.size());
    for (const Object& o : objects) encoded.push_back(codec::encode_object(o));
    std::vector<ByteView> views(encoded.begin(), encoded.end());
    std::vector<Digest> leaves(views.size());
    sha256::digest_many(views, leaves);
    return smt::merkle_root(std::move(leaves));
}

// ---------------------------------------------------------------------------
// HeaderChain

HeaderChain::HeaderChain(Mode mode, std::vector<BlockHeader> headers)
    : mode_(mode), headers_(std::move(headers)) {
    for (const BlockHeader& h : headers_) {
        if (h.mode() != mode_) throw ConstructionError("header mode does not match chain mode");
    }
}

const BlockHeader& HeaderChain::at(BlockId id) const {
    if (!contains(id)) throw std::out_of_range("no header for block " + std::to_string(id));
    return headers_[static_cast<std::size_t>(id)];
}

bool HeaderChain::verify_links() const {
    Digest prev{};
    for (std::size_t i = 0; i < headers_.size(); ++i) {
        if (headers_[i].id != static_cast<BlockId>(i) || headers_[i].prev_hash != prev) return false;
        prev = headers_[i].hash();
    }
    return true;
}

Bytes HeaderChain::serialize() const {
    Bytes out;
    out.reserve(serialized_size());
    for (const BlockHeader& h : headers_) {
        const Bytes b = h.serialize();
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

void HeaderChain::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    Writer w(8 + serialized_size());
    w.raw(as_bytes({kHeaderMagic, sizeof(kHeaderMagic)})).u8(kFormatVersion).u8(static_cast<std::uint8_t>(mode_));
    w.raw(serialize());
    write_all(out, w.bytes(), path);
}

HeaderChain HeaderChain::load(const std::filesystem::path& path) {
    const Bytes data = read_file(path);
    Reader r(data);
    try {
        const ByteView magic = r.raw(sizeof(kHeaderMagic));
        if (std::memcmp(magic.data(), kHeaderMagic, sizeof(kHeaderMagic)) != 0) {
            throw IntegrityError("not a header export file: " + path.string());
        }
        if (r.u8() != kFormatVersion) throw IntegrityError("unsupported header export version");
        const auto mode = static_cast<Mode>(r.u8());
        if (mode != Mode::netchain && mode != Mode::netchain_plus) throw IntegrityError("unknown mode byte");
        const std::size_t size = header_size(mode);
        if (r.remaining() % size != 0) throw IntegrityError("header export truncated");
        std::vector<BlockHeader> headers;
        while (!r.at_end()) headers.push_back(BlockHeader::parse(r.raw(size), mode));
        return HeaderChain(mode, std::move(headers));
    } catch (const DecodeError& e) {
        throw IntegrityError(std::string("header export malformed: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Ledger

struct Ledger::Impl {
    Mode mode = Mode::netchain;
    std::optional<std::filesystem::path> path;
    std::ofstream out;
    std::deque<Block> blocks;  // deque: references survive push_back
    mpt::Store mpt;
    mutable std::shared_mutex mutex;

    void persist(std::uint8_t kind, const Bytes& payload) {
        if (path) write_all(out, frame_record(kind, payload), *path);
    }

    void load(const Bytes& data);
};

void Ledger::Impl::load(const Bytes& data) {
    Reader r(data);
    try {
        const ByteView magic = r.raw(sizeof(kLedgerMagic));
        if (std::memcmp(magic.data(), kLedgerMagic, sizeof(kLedgerMagic)) != 0) {
            throw IntegrityError("not a ledger file");
        }
        if (r.u8() != kFormatVersion) throw IntegrityError("unsupported ledger version");
        const std::uint8_t mode_byte = r.u8();
        if (mode_byte > 1) throw IntegrityError("unknown ledger mode byte");
        mode = static_cast<Mode>(mode_byte);
        mpt.take_new_nodes();  // the empty root created by the constructor

        while (!r.at_end()) {
            const std::uint8_t kind = r.u8();
            const std::uint32_t length = r.u32();
            if (length > r.remaining() || r.remaining() - length < Digest::size) {
                throw IntegrityError("ledger record truncated");
            }
            const ByteView payload = r.raw(length);
            if (hash(payload) != r.digest()) throw IntegrityError("ledger record checksum mismatch");

            if (kind == kRecordMptNodes) {
                if (mode != Mode::netchain_plus) throw IntegrityError("MPT record in a NetChain ledger");
                Reader nodes(payload);
                const std::size_t n = nodes.count(4);
                for (std::size_t i = 0; i < n; ++i) mpt.insert_encoded(nodes.blob());
                nodes.expect_end();
                continue;
            }
            if (kind != kRecordBlock) throw IntegrityError("unknown ledger record kind");

            Block block = decode_block_payload(payload, mode);
            const BlockId expected_id = static_cast<BlockId>(blocks.size());
            const Digest expected_prev = blocks.empty() ? Digest{} : blocks.back().header.hash();
            if (block.header.id != expected_id) throw IntegrityError("block ids not contiguous");
            if (block.header.prev_hash != expected_prev) throw IntegrityError("prev_hash mismatch");
            if (block.header.tx_root != tx_root(block.objects)) throw IntegrityError("tx_root mismatch");
            if (block.header.smt_root != block.ads.tree.root()) throw IntegrityError("SMT root mismatch");

            // The ADS must be exactly what the miner would have built from
            // the objects; in NetChain+ mode replaying the MPT updates also
            // re-derives id_pre and must land on the header's MPT root.
            const AdsBuild rebuilt = build_block_ads(block.objects, mode,
                                                     mode == Mode::netchain_plus ? &mpt : nullptr, expected_id);
            if (!(rebuilt.ads == block.ads)) throw IntegrityError("block ADS does not match its objects");
            if (rebuilt.mpt_root != block.header.mpt_root) throw IntegrityError("MPT root mismatch");
            if (!mpt.take_new_nodes().empty()) throw IntegrityError("MPT node log incomplete");

            blocks.push_back(std::move(block));
        }
    } catch (const DecodeError& e) {
        throw IntegrityError(std::string("ledger malformed: ") + e.what());
    } catch (const ConstructionError& e) {
        throw IntegrityError(std::string("ledger block invalid: ") + e.what());
    }
}

Ledger::Ledger(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Ledger::Ledger(Ledger&&) noexcept = default;
Ledger& Ledger::operator=(Ledger&&) noexcept = default;
Ledger::~Ledger() = default;

Ledger Ledger::in_memory(Mode mode) {
    auto impl = std::make_unique<Impl>();
    impl->mode = mode;
    return Ledger(std::move(impl));
}

Ledger Ledger::create(const std::filesystem::path& path, Mode mode) {
    auto impl = std::make_unique<Impl>();
    impl->mode = mode;
    impl->path = path;
    impl->out.open(path, std::ios::binary | std::ios::trunc);
    if (!impl->out) throw IoError("cannot create " + path.string());
    Writer w;
    w.raw(as_bytes({kLedgerMagic, sizeof(kLedgerMagic)})).u8(kFormatVersion).u8(static_cast<std::uint8_t>(mode));
    write_all(impl->out, w.bytes(), path);
    return Ledger(std::move(impl));
}

Ledger Ledger::open(const std::filesystem::path& path) {
    auto impl = std::make_unique<Impl>();
    impl->load(read_file(path));
    impl->path = path;
    impl->out.open(path, std::ios::binary | std::ios::app);
    if (!impl->out) throw IoError("cannot open for append " + path.string());
    return Ledger(std::move(impl));
}

Mode Ledger::mode() const noexcept { return impl_->mode; }

std::size_t Ledger::size() const {
    std::shared_lock lock(impl_->mutex);
    return impl_->blocks.size();
}

BlockId Ledger::append(std::span<const Object> objects, std::optional<std::int64_t> timestamp,
                       AppendStats* stats) {
    std::unique_lock lock(impl_->mutex);
    Impl& s = *impl_;
    const BlockId id = static_cast<BlockId>(s.blocks.size());
    const bool plus = s.mode == Mode::netchain_plus;

    const auto t0 = std::chrono::steady_clock::now();
    AdsBuild built = build_block_ads(objects, s.mode, plus ? &s.mpt : nullptr, id);
    if (stats) stats->ads_build = std::chrono::steady_clock::now() - t0;

    Block block;
    block.header.id = id;
    block.header.timestamp = timestamp.value_or(static_cast<std::int64_t>(std::time(nullptr)));
    block.header.prev_hash = s.blocks.empty() ? Digest{} : s.blocks.back().header.hash();
    block.header.tx_root = tx_root(objects);
    block.header.smt_root = built.ads.tree.root();
    block.header.mpt_root = built.mpt_root;
    block.objects.assign(objects.begin(), objects.end());
    block.ads = std::move(built.ads);

    if (plus) {
        Writer nodes;
        const std::vector<Bytes> fresh = s.mpt.take_new_nodes();
        nodes.u32(static_cast<std::uint32_t>(fresh.size()));
        for (const Bytes& n : fresh) nodes.blob(n);
        s.persist(kRecordMptNodes, nodes.bytes());
        if (stats) {
            stats->mpt_bytes = 0;
            for (const Bytes& n : fresh) stats->mpt_bytes += n.size();
        }
    }
    if (stats) stats->ads_bytes = block.ads_bytes();
    s.persist(kRecordBlock, encode_block_payload(block));
    s.blocks.push_back(std::move(block));
    return id;
}

const Block& Ledger::get_block(BlockId id) const {
    std::shared_lock lock(impl_->mutex);
    if (id < 0 || static_cast<std::size_t>(id) >= impl_->blocks.size()) {
        throw std::out_of_range("no block " + std::to_string(id));
    }
    return impl_->blocks[static_cast<std::size_t>(id)];
}

HeaderChain Ledger::headers() const {
    std::shared_lock lock(impl_->mutex);
    std::vector<BlockHeader> out;
    out.reserve(impl_->blocks.size());
    for (const Block& b : impl_->blocks) out.push_back(b.header);
    return HeaderChain(impl_->mode, std::move(out));
}

const mpt::Store& Ledger::mpt() const { return impl_->mpt; }

}  // namespace netchain::ledger
