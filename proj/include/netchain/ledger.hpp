#pragma once

// Append-only block store.
//
// Header layout (big-endian), hashed with tag 0x05 prepended:
//   id:8 | timestamp:8 | prev_hash:32 | tx_root:32 | smt_root:32 [| mpt_root:32]
// which is 112 bytes for NetChain and 144 bytes for NetChain+.
//
// Ledger file:
//   "NETCHAIN" | version:u8 | mode:u8 | record*
//   record = kind:u8 | length:u32 | payload | sha256(payload)
// Block records carry header, objects and the serialized ADS. In NetChain+
// mode each block record is preceded by a record holding the MPT nodes that
// block created. Loading re-verifies every record against its digests.

#include <netchain/index.hpp>
#include <netchain/mpt.hpp>
#include <netchain/types.hpp>

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace netchain::ledger {

inline constexpr std::size_t kNetChainHeaderSize = 112;
inline constexpr std::size_t kNetChainPlusHeaderSize = 144;

std::size_t header_size(Mode mode) noexcept;

struct BlockHeader {
    BlockId id = 0;
    std::int64_t timestamp = 0;
    Digest prev_hash;
    Digest tx_root;
    Digest smt_root;
    std::optional<Digest> mpt_root;  // NetChain+ only

    Mode mode() const noexcept { return mpt_root ? Mode::netchain_plus : Mode::netchain; }
    Bytes serialize() const;
    static BlockHeader parse(ByteView bytes, Mode mode);
    Digest hash() const;

    bool operator==(const BlockHeader&) const = default;
};

struct Block {
    BlockHeader header;
    std::vector<Object> objects;
    BlockAds ads;

    /// Serialized body size split: objects and ADS.
    std::size_t ads_bytes() const;
};

/// Merkle root over canonical object encodings.
Digest tx_root(std::span<const Object> objects);

/// What a light client holds.
class HeaderChain {
public:
    HeaderChain() = default;
    HeaderChain(Mode mode, std::vector<BlockHeader> headers);

    Mode mode() const noexcept { return mode_; }
    std::size_t size() const noexcept { return headers_.size(); }
    bool empty() const noexcept { return headers_.empty(); }
    const BlockHeader& at(BlockId id) const;
    bool contains(BlockId id) const noexcept {
        return id >= 0 && static_cast<std::size_t>(id) < headers_.size();
    }
    const BlockHeader& latest() const { return headers_.back(); }
    std::span<const BlockHeader> headers() const noexcept { return headers_; }

    /// Ids contiguous from 0 and every prev_hash matches.
    bool verify_links() const;

    /// Headers back to back: exactly header_size(mode) * size() bytes.
    Bytes serialize() const;
    std::size_t serialized_size() const noexcept { return header_size(mode_) * headers_.size(); }

    /// Export file: "NCHDRS" | version:u8 | mode:u8 | serialize().
    void save(const std::filesystem::path& path) const;
    static HeaderChain load(const std::filesystem::path& path);

private:
    Mode mode_ = Mode::netchain;
    std::vector<BlockHeader> headers_;
};

struct AppendStats {
    std::chrono::nanoseconds ads_build{};  // build_block_ads only
    std::size_t ads_bytes = 0;             // serialized BlockAds
    std::size_t mpt_bytes = 0;             // new MPT nodes (NetChain+)
};

class Ledger {
public:
    /// Non-persistent store.
    static Ledger in_memory(Mode mode);
    /// Create (or truncate) a ledger file.
    static Ledger create(const std::filesystem::path& path, Mode mode);
    /// Load and fully re-verify a ledger file. Throws IntegrityError on any
    /// digest mismatch or truncation, IoError when unreadable.
    static Ledger open(const std::filesystem::path& path);

    Ledger(Ledger&&) noexcept;
    Ledger& operator=(Ledger&&) noexcept;
    ~Ledger();

    Mode mode() const noexcept;
    std::size_t size() const;

    /// Build the block ADS, seal the header and persist. Throws
    /// ConstructionError on empty input and IoError on write failure.
    BlockId append(std::span<const Object> objects, std::optional<std::int64_t> timestamp = std::nullopt,
                   AppendStats* stats = nullptr);

    /// Throws std::out_of_range for unknown ids. The reference stays valid
    /// for the lifetime of the ledger.
    const Block& get_block(BlockId id) const;

    HeaderChain headers() const;

    /// Authenticated key -> latest block id map (NetChain+ only).
    const mpt::Store& mpt() const;

private:
    struct Impl;
    explicit Ledger(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
};

}  // namespace netchain::ledger
