#include <netchain/sha256.hpp>

#include <gtest/gtest.h>
#include <openssl/sha.h>

#include <random>
#include <string>
#include <vector>

namespace netchain::sha256 {
namespace {

std::vector<Kernel> supported_kernels() {
    std::vector<Kernel> out;
    for (Kernel k : {Kernel::scalar, Kernel::shani, Kernel::avx2}) {
        if (kernel_supported(k)) out.push_back(k);
    }
    return out;
}

Digest openssl_sha256(ByteView m) {
    Digest d;
    SHA256(m.data(), m.size(), d.data());
    return d;
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
    Bytes b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    return b;
}

struct Vector {
    std::string message;
    const char* hex;
};

// FIPS 180-2 examples plus boundary lengths around the padding split.
const Vector kVectors[] = {
    {"", "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"},
    {"abc", "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"},
    {"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq",
     "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1"},
    {"abcdefghbcdefghicdefghijdefghijkefghijklfghijklmghijklmnhijklmnoijklmnopjklmnopqklmnopqrlmnopqrsmnopqrstnopqrstu",
     "cf5b16a778af8380036ce59e7b0492370b249b11e8f07a51afac45037afee9d1"},
};

TEST(Sha256, PublishedVectorsAllKernels) {
    for (Kernel k : supported_kernels()) {
        for (const auto& v : kVectors) {
            EXPECT_EQ(digest(as_bytes(v.message), k).hex(), v.hex)
                << kernel_name(k) << " on \"" << v.message << "\"";
        }
    }
}

TEST(Sha256, MillionA) {
    const std::string m(1'000'000, 'a');
    for (Kernel k : supported_kernels()) {
        EXPECT_EQ(digest(as_bytes(m), k).hex(),
                  "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
    }
}

TEST(Sha256, KernelsMatchOpenSslOnEveryLengthUpTo300) {
    std::mt19937_64 rng(7);
    for (std::size_t len = 0; len <= 300; ++len) {
        const Bytes m = random_bytes(rng, len);
        const Digest expected = openssl_sha256(m);
        for (Kernel k : supported_kernels()) {
            ASSERT_EQ(digest(m, k), expected) << kernel_name(k) << " len=" << len;
        }
    }
}

TEST(Sha256, BatchMatchesSingleForMixedLengths) {
    std::mt19937_64 rng(11);
    for (std::size_t count : {0u, 1u, 7u, 8u, 9u, 16u, 23u, 64u, 101u}) {
        std::vector<Bytes> storage;
        for (std::size_t i = 0; i < count; ++i) storage.push_back(random_bytes(rng, rng() % 200));
        std::vector<ByteView> views(storage.begin(), storage.end());

        for (Kernel k : supported_kernels()) {
            std::vector<Digest> out(count);
            digest_many(views, out, k);
            for (std::size_t i = 0; i < count; ++i) {
                ASSERT_EQ(out[i], openssl_sha256(views[i]))
                    << kernel_name(k) << " count=" << count << " i=" << i;
            }
        }
    }
}

TEST(Sha256, BatchOfUniformNodeSizedMessages) {
    // 65-byte messages are what tree levels hash: tag + two digests.
    std::mt19937_64 rng(13);
    std::vector<Bytes> storage;
    for (int i = 0; i < 1000; ++i) storage.push_back(random_bytes(rng, 65));
    std::vector<ByteView> views(storage.begin(), storage.end());
    std::vector<Digest> reference(views.size());
    digest_many(views, reference, Kernel::scalar);
    for (Kernel k : supported_kernels()) {
        std::vector<Digest> out(views.size());
        digest_many(views, out, k);
        EXPECT_EQ(out, reference) << kernel_name(k);
    }
}

TEST(Sha256, BatchRejectsSizeMismatch) {
    std::vector<ByteView> views(3);
    std::vector<Digest> out(2);
    EXPECT_THROW(digest_many(views, out), std::invalid_argument);
}

TEST(Sha256, KernelSelection) {
    EXPECT_TRUE(kernel_supported(Kernel::scalar));
    EXPECT_EQ(parse_kernel("shani"), Kernel::shani);
    EXPECT_EQ(parse_kernel("nope"), std::nullopt);

    const Kernel before = active_kernel();
    set_active_kernel(Kernel::scalar);
    EXPECT_EQ(active_kernel(), Kernel::scalar);
    EXPECT_EQ(digest(as_bytes("abc")).hex(),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    set_active_kernel(before);
    for (Kernel k : {Kernel::shani, Kernel::avx2}) {
        if (!kernel_supported(k)) {
            EXPECT_THROW(set_active_kernel(k), std::invalid_argument);
        }
    }
}

}  // namespace
}  // namespace netchain::sha256
