#include <netchain/smt.hpp>

#include "support/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

using namespace netchain;

namespace {

smt::Leaf leaf(const std::string& u, std::optional<BlockId> id_pre = std::nullopt) {
    return {{u, "t"}, hash(as_bytes(u)), id_pre};
}

smt::Tree tree_of(std::initializer_list<const char*> keys) {
    std::vector<smt::Leaf> leaves;
    for (const char* k : keys) leaves.push_back(leaf(k));
    return smt::build(std::move(leaves));
}

std::vector<smt::Leaf> random_leaves(std::mt19937_64& rng, std::size_t n, bool plus) {
    std::set<std::pair<std::string, std::string>> keys;
    while (keys.size() < n) {
        keys.emplace("u" + std::to_string(rng() % (4 * n + 8)), "t" + std::to_string(rng() % 3));
    }
    std::vector<smt::Leaf> leaves;
    for (const auto& [u, t] : keys) {
        Digest d;
        for (auto& b : d.bytes) b = static_cast<std::uint8_t>(rng());
        std::optional<BlockId> id;
        if (plus) id = static_cast<BlockId>(rng() % 50) - 1;
        leaves.push_back({{u, t}, d, id});
    }
    return leaves;
}

Digest oracle_root(const std::vector<smt::Leaf>& leaves) {
    std::vector<Digest> digests;
    for (const auto& l : leaves) {
        digests.push_back(oracle::sha256(oracle::leaf_bytes(l.key.u, l.key.type, l.ptr_h, l.id_pre)));
    }
    return oracle::smt_root(digests);
}

std::size_t ceil_log2(std::size_t n) {
    std::size_t d = 0;
    while ((std::size_t{1} << d) < n) ++d;
    return d;
}

}  // namespace

TEST(SmtBuild, FourLeafShape) {
    const auto tree = tree_of({"2", "4", "6", "8"});
    const Digest h1 = leaf("2").digest(), h2 = leaf("4").digest(), h3 = leaf("6").digest(), h4 = leaf("8").digest();
    const Digest expect = codec::internal_digest(codec::internal_digest(h1, h2), codec::internal_digest(h3, h4));
    EXPECT_EQ(tree.root(), expect);
    EXPECT_EQ(tree.levels().size(), 3u);
}

TEST(SmtBuild, SingleLeafRootIsLeafDigest) {
    const auto tree = tree_of({"only"});
    EXPECT_EQ(tree.root(), leaf("only").digest());
    EXPECT_TRUE(smt::prove_existence(tree, {"only", "t"}).siblings.empty());
}

TEST(SmtBuild, OddLevelPromotesLastNode) {
    const auto tree = tree_of({"a", "b", "c"});
    const Digest expect = codec::internal_digest(codec::internal_digest(leaf("a").digest(), leaf("b").digest()),
                                                 leaf("c").digest());
    EXPECT_EQ(tree.root(), expect);
}

TEST(SmtBuild, RejectsBadInput) {
    EXPECT_THROW(smt::build({}), ConstructionError);
    EXPECT_THROW(smt::build({leaf("b"), leaf("a")}), ConstructionError);
    EXPECT_THROW(smt::build({leaf("a"), leaf("a")}), ConstructionError);
    EXPECT_THROW(smt::build({leaf("a"), leaf("b", 3)}), ConstructionError);
}

TEST(SmtBuild, KeyOrderIsUThenType) {
    std::vector<smt::Leaf> leaves{{{"a", "z"}, {}, {}}, {{"ab", "a"}, {}, {}}, {{"b", "a"}, {}, {}}};
    EXPECT_NO_THROW(smt::build(leaves));
    std::swap(leaves[0], leaves[1]);
    EXPECT_THROW(smt::build(leaves), ConstructionError);
}

TEST(SmtBuild, MatchesRecursiveReferenceForSizesUpTo17) {
    std::mt19937_64 rng(17);
    for (std::size_t n = 1; n <= 17; ++n) {
        for (bool plus : {false, true}) {
            const auto leaves = random_leaves(rng, n, plus);
            EXPECT_EQ(smt::build(leaves).root(), oracle_root(leaves)) << "n=" << n;
        }
    }
}

TEST(SmtBuild, MatchesRecursiveReferenceOnThousandRandomSets) {
    std::mt19937_64 rng(1000);
    std::uniform_int_distribution<std::size_t> size(1, 300);
    for (int i = 0; i < 1000; ++i) {
        const auto leaves = random_leaves(rng, size(rng), i % 2 == 1);
        ASSERT_EQ(smt::build(leaves).root(), oracle_root(leaves)) << "set " << i;
    }
}

TEST(SmtExistence, FourLeafProofForFirstKey) {
    const auto tree = tree_of({"2", "4", "6", "8"});
    const auto proof = smt::prove_existence(tree, {"2", "t"});
    ASSERT_EQ(proof.siblings.size(), 2u);
    EXPECT_EQ(proof.siblings[0], leaf("4").digest());
    EXPECT_EQ(proof.siblings[1], codec::internal_digest(leaf("6").digest(), leaf("8").digest()));
    EXPECT_TRUE(smt::verify_existence(tree.root(), {"2", "t"}, proof));
}

TEST(SmtExistence, EveryKeyOfA64LeafTree) {
    std::mt19937_64 rng(64);
    const auto leaves = random_leaves(rng, 64, false);
    const auto tree = smt::build(leaves);
    for (const auto& l : leaves) {
        const auto proof = smt::prove_existence(tree, l.key);
        EXPECT_EQ(proof.siblings.size(), 6u);
        EXPECT_TRUE(smt::verify_existence(tree.root(), l.key, proof));
    }
}

TEST(SmtExistence, PathLengthIsAtMostCeilLog2) {
    // With odd-node promotion a promoted leaf skips levels, so only the
    // longest path reaches ceil(log2 n); for powers of two every path does.
    for (std::size_t n = 1; n <= 130; ++n) {
        std::size_t longest = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t len = smt::path_length(i, n);
            EXPECT_LE(len, ceil_log2(n));
            if ((n & (n - 1)) == 0) {
                EXPECT_EQ(len, ceil_log2(n));
            }
            longest = std::max(longest, len);
        }
        EXPECT_EQ(longest, ceil_log2(n)) << n;
    }
}

TEST(SmtExistence, WrongKeyRejected) {
    const auto tree = tree_of({"2", "4", "6", "8"});
    const auto proof = smt::prove_existence(tree, {"4", "t"});
    EXPECT_FALSE(smt::verify_existence(tree.root(), {"6", "t"}, proof));
    EXPECT_FALSE(smt::verify_existence(tree.root(), {"4", "u"}, proof));
}

TEST(SmtExistence, AbsentKeyThrows) {
    const auto tree = tree_of({"2", "4"});
    EXPECT_THROW(smt::prove_existence(tree, {"3", "t"}), LookupError);
}

TEST(SmtExistence, BitFlipsNeverChangeWhatIsProven) {
    std::mt19937_64 rng(9);
    for (bool plus : {false, true}) {
        const auto leaves = random_leaves(rng, 13, plus);
        const auto tree = smt::build(leaves);
        for (std::size_t i : {std::size_t{0}, std::size_t{6}, std::size_t{12}}) {
            const auto proof = tree.prove_index(i);
            Writer w;
            smt::write_proof(w, proof);
            const Bytes honest = w.bytes();
            for (std::size_t bit = 0; bit < honest.size() * 8; ++bit) {
                Bytes mutated = honest;
                mutated[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
                try {
                    Reader r(mutated);
                    const auto forged = smt::read_proof(r);
                    r.expect_end();
                    // tree_size only fixes the path shape, so a flip that
                    // keeps the shape may still verify. It must not change
                    // what is proven.
                    if (smt::verify_existence(tree.root(), forged.leaf.key, forged)) {
                        EXPECT_EQ(forged.leaf, proof.leaf) << "bit " << bit;
                        EXPECT_EQ(forged.leaf_index, proof.leaf_index) << "bit " << bit;
                        EXPECT_EQ(forged.siblings, proof.siblings) << "bit " << bit;
                    }
                } catch (const DecodeError&) {
                }
            }
        }
    }
}

TEST(SmtNonExistence, InteriorKey) {
    const auto tree = tree_of({"2", "4", "6", "8"});
    const auto proof = smt::prove_non_existence(tree, {"5", "t"});
    ASSERT_TRUE(proof.left && proof.right);
    EXPECT_EQ(proof.left->leaf.key.u, "4");
    EXPECT_EQ(proof.right->leaf.key.u, "6");
    EXPECT_TRUE(smt::verify_non_existence(tree.root(), {"5", "t"}, proof));
}

TEST(SmtNonExistence, BelowAndAboveRange) {
    const auto tree = tree_of({"2", "4", "6", "8"});
    const auto below = smt::prove_non_existence(tree, {"1", "t"});
    EXPECT_FALSE(below.left);
    ASSERT_TRUE(below.right);
    EXPECT_EQ(below.right->leaf_index, 0u);
    EXPECT_TRUE(smt::verify_non_existence(tree.root(), {"1", "t"}, below));

    const auto above = smt::prove_non_existence(tree, {"9", "t"});
    EXPECT_FALSE(above.right);
    ASSERT_TRUE(above.left);
    EXPECT_EQ(above.left->leaf_index, 3u);
    EXPECT_TRUE(smt::verify_non_existence(tree.root(), {"9", "t"}, above));
}

TEST(SmtNonExistence, PresentKeyThrows) {
    const auto tree = tree_of({"2", "4"});
    EXPECT_THROW(smt::prove_non_existence(tree, {"2", "t"}), LookupError);
}

TEST(SmtNonExistence, RandomAbsentKeysAgainstHundredLeaves) {
    std::mt19937_64 rng(100);
    const auto leaves = random_leaves(rng, 100, true);
    const auto tree = smt::build(leaves);
    int checked = 0;
    while (checked < 500) {
        const CompoundKey key{"u" + std::to_string(rng() % 500), "t" + std::to_string(rng() % 4)};
        if (tree.find(key)) continue;
        ++checked;
        const auto proof = smt::prove_non_existence(tree, key);
        ASSERT_TRUE(smt::verify_non_existence(tree.root(), key, proof));
        // Oracle: the bracketing leaves are the neighbours in sorted order.
        const CompoundKey* lo = nullptr;
        const CompoundKey* hi = nullptr;
        for (const auto& l : leaves) {
            if (l.key < key) lo = &l.key;
            if (key < l.key && !hi) hi = &l.key;
        }
        EXPECT_EQ(proof.left.has_value(), lo != nullptr);
        EXPECT_EQ(proof.right.has_value(), hi != nullptr);
        if (lo) {
            EXPECT_EQ(proof.left->leaf.key, *lo);
        }
        if (hi) {
            EXPECT_EQ(proof.right->leaf.key, *hi);
        }
    }
}

TEST(SmtNonExistence, RightLeafEqualToKeyRejected) {
    const auto tree = tree_of({"2", "4", "6", "8"});
    smt::NonExistenceProof forged{tree.prove_index(1), tree.prove_index(2)};
    EXPECT_FALSE(smt::verify_non_existence(tree.root(), {"6", "t"}, forged));
    EXPECT_FALSE(smt::verify_non_existence(tree.root(), {"4", "t"}, forged));
}

TEST(SmtNonExistence, NonAdjacentLeavesRejected) {
    const auto tree = tree_of({"2", "4", "6", "8"});
    smt::NonExistenceProof stitched{tree.prove_index(1), tree.prove_index(3)};
    EXPECT_FALSE(smt::verify_non_existence(tree.root(), {"5", "t"}, stitched));
}

TEST(SmtNonExistence, OneSidedProofMustSitAtTheEdge) {
    const auto tree = tree_of({"2", "4", "6", "8"});
    EXPECT_FALSE(smt::verify_non_existence(tree.root(), {"5", "t"}, {tree.prove_index(1), std::nullopt}));
    EXPECT_FALSE(smt::verify_non_existence(tree.root(), {"5", "t"}, {std::nullopt, tree.prove_index(2)}));
    EXPECT_FALSE(smt::verify_non_existence(tree.root(), {"5", "t"}, {std::nullopt, std::nullopt}));
}

TEST(SmtNonExistence, NoKeyIsBothPresentAndAbsent) {
    std::mt19937_64 rng(11);
    const auto leaves = random_leaves(rng, 40, false);
    const auto tree = smt::build(leaves);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const auto& key = leaves[i].key;
        std::optional<smt::MerkleProof> l, r;
        if (i > 0) l = tree.prove_index(i - 1);
        if (i + 1 < leaves.size()) r = tree.prove_index(i + 1);
        EXPECT_FALSE(smt::verify_non_existence(tree.root(), key, {l, r}));
        EXPECT_FALSE(smt::verify_non_existence(tree.root(), key, {l, tree.prove_index(i)}));
        EXPECT_FALSE(smt::verify_non_existence(tree.root(), key, {tree.prove_index(i), r}));
    }
}

TEST(SmtNonExistence, MutatedProofsNeverVerify) {
    std::mt19937_64 rng(12);
    const auto leaves = random_leaves(rng, 21, true);
    const auto tree = smt::build(leaves);
    const CompoundKey key{leaves[10].key.u + "0", leaves[10].key.type};
    ASSERT_FALSE(tree.find(key));
    Writer w;
    smt::write_proof(w, smt::prove_non_existence(tree, key));
    const Bytes honest = w.bytes();
    for (int trial = 0; trial < 3000; ++trial) {
        Bytes mutated = honest;
        mutated[rng() % mutated.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
        try {
            Reader r(mutated);
            const auto forged = smt::read_non_existence_proof(r);
            r.expect_end();
            Writer back;
            smt::write_proof(back, forged);
            if (back.bytes() == honest) continue;
            EXPECT_FALSE(smt::verify_non_existence(tree.root(), key, forged));
        } catch (const DecodeError&) {
        }
    }
}

TEST(SmtSerialization, RoundTrip) {
    std::mt19937_64 rng(13);
    const auto leaves = random_leaves(rng, 9, true);
    const auto tree = smt::build(leaves);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        Writer w;
        smt::write_proof(w, tree.prove_index(i));
        Reader r(w.bytes());
        EXPECT_EQ(smt::read_proof(r), tree.prove_index(i));
        EXPECT_TRUE(r.at_end());
    }
}

TEST(MerkleRoot, MatchesReference) {
    std::mt19937_64 rng(14);
    EXPECT_TRUE(smt::merkle_root({}).is_zero());
    for (std::size_t n = 1; n < 40; ++n) {
        std::vector<Digest> d(n);
        for (auto& x : d) {
            for (auto& b : x.bytes) b = static_cast<std::uint8_t>(rng());
        }
        EXPECT_EQ(smt::merkle_root(d), oracle::smt_root(d));
    }
}
