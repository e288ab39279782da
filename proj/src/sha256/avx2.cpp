// Built with -mavx2. Eight messages are hashed in parallel, one per 32-bit
// lane: vector register i holds working variable i of all eight messages.
#include "kernels.hpp"

#include <immintrin.h>

namespace netchain::sha256::detail {
namespace {

template <int N>
inline __m256i rotr(__m256i x) {
    return _mm256_or_si256(_mm256_srli_epi32(x, N), _mm256_slli_epi32(x, 32 - N));
}

inline __m256i add(__m256i a, __m256i b) { return _mm256_add_epi32(a, b); }
inline __m256i bxor(__m256i a, __m256i b) { return _mm256_xor_si256(a, b); }

inline __m256i small_sigma0(__m256i x) {
    return bxor(bxor(rotr<7>(x), rotr<18>(x)), _mm256_srli_epi32(x, 3));
}
inline __m256i small_sigma1(__m256i x) {
    return bxor(bxor(rotr<17>(x), rotr<19>(x)), _mm256_srli_epi32(x, 10));
}
inline __m256i big_sigma0(__m256i x) { return bxor(bxor(rotr<2>(x), rotr<13>(x)), rotr<22>(x)); }
inline __m256i big_sigma1(__m256i x) { return bxor(bxor(rotr<6>(x), rotr<11>(x)), rotr<25>(x)); }

inline __m256i choose(__m256i e, __m256i f, __m256i g) {
    return bxor(_mm256_and_si256(e, f), _mm256_andnot_si256(e, g));
}
inline __m256i majority(__m256i a, __m256i b, __m256i c) {
    return _mm256_or_si256(_mm256_and_si256(a, b), _mm256_and_si256(c, _mm256_or_si256(a, b)));
}

// Transpose an 8x8 matrix of 32-bit words held in rows r[0..7].
inline void transpose8(__m256i r[8]) {
    const __m256i t0 = _mm256_unpacklo_epi32(r[0], r[1]);
    const __m256i t1 = _mm256_unpackhi_epi32(r[0], r[1]);
    const __m256i t2 = _mm256_unpacklo_epi32(r[2], r[3]);
    const __m256i t3 = _mm256_unpackhi_epi32(r[2], r[3]);
    const __m256i t4 = _mm256_unpacklo_epi32(r[4], r[5]);
    const __m256i t5 = _mm256_unpackhi_epi32(r[4], r[5]);
    const __m256i t6 = _mm256_unpacklo_epi32(r[6], r[7]);
    const __m256i t7 = _mm256_unpackhi_epi32(r[6], r[7]);
    const __m256i u0 = _mm256_unpacklo_epi64(t0, t2);
    const __m256i u1 = _mm256_unpackhi_epi64(t0, t2);
    const __m256i u2 = _mm256_unpacklo_epi64(t1, t3);
    const __m256i u3 = _mm256_unpackhi_epi64(t1, t3);
    const __m256i u4 = _mm256_unpacklo_epi64(t4, t6);
    const __m256i u5 = _mm256_unpackhi_epi64(t4, t6);
    const __m256i u6 = _mm256_unpacklo_epi64(t5, t7);
    const __m256i u7 = _mm256_unpackhi_epi64(t5, t7);
    r[0] = _mm256_permute2x128_si256(u0, u4, 0x20);
    r[1] = _mm256_permute2x128_si256(u1, u5, 0x20);
    r[2] = _mm256_permute2x128_si256(u2, u6, 0x20);
    r[3] = _mm256_permute2x128_si256(u3, u7, 0x20);
    r[4] = _mm256_permute2x128_si256(u0, u4, 0x31);
    r[5] = _mm256_permute2x128_si256(u1, u5, 0x31);
    r[6] = _mm256_permute2x128_si256(u2, u6, 0x31);
    r[7] = _mm256_permute2x128_si256(u3, u7, 0x31);
}

// Load words [8*half, 8*half+8) of the current block of every lane, byte
// swapped, so that out[j] holds word 8*half+j for all lanes.
inline void load_message_words(const std::uint8_t* const ptrs[kLanes], int half, __m256i out[8]) {
    const __m256i byteswap = _mm256_setr_epi8(3, 2, 1, 0, 7, 6, 5, 4, 11, 10, 9, 8, 15, 14, 13, 12,
                                              3, 2, 1, 0, 7, 6, 5, 4, 11, 10, 9, 8, 15, 14, 13, 12);
    for (std::size_t lane = 0; lane < kLanes; ++lane) {
        out[lane] = _mm256_shuffle_epi8(
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(ptrs[lane] + 32 * half)), byteswap);
    }
    transpose8(out);
}

}  // namespace

void compress_x8_avx2(std::uint32_t states[kLanes][8], const std::uint8_t* const lanes[kLanes],
                      std::size_t nblocks) {
    __m256i s[8];
    for (int j = 0; j < 8; ++j) {
        s[j] = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(states[j]));
    }
    transpose8(s);  // s[j] now holds word j of every lane's state

    const std::uint8_t* ptrs[kLanes];
    for (std::size_t lane = 0; lane < kLanes; ++lane) ptrs[lane] = lanes[lane];

    for (; nblocks > 0; --nblocks) {
        __m256i w[16];
        load_message_words(ptrs, 0, w);
        load_message_words(ptrs, 1, w + 8);

        __m256i a = s[0], b = s[1], c = s[2], d = s[3];
        __m256i e = s[4], f = s[5], g = s[6], h = s[7];

#pragma GCC unroll 8
        for (int t = 0; t < 64; ++t) {
            __m256i wt;
            if (t < 16) {
                wt = w[t];
            } else {
                wt = add(add(w[t & 15], small_sigma0(w[(t + 1) & 15])),
                         add(w[(t + 9) & 15], small_sigma1(w[(t + 14) & 15])));
                w[t & 15] = wt;
            }
            const __m256i k = _mm256_set1_epi32(static_cast<int>(kRoundConstants[t]));
            const __m256i t1 = add(add(add(h, big_sigma1(e)), add(choose(e, f, g), k)), wt);
            const __m256i t2 = add(big_sigma0(a), majority(a, b, c));
            h = g;
            g = f;
            f = e;
            e = add(d, t1);
            d = c;
            c = b;
            b = a;
            a = add(t1, t2);
        }

        s[0] = add(s[0], a);
        s[1] = add(s[1], b);
        s[2] = add(s[2], c);
        s[3] = add(s[3], d);
        s[4] = add(s[4], e);
        s[5] = add(s[5], f);
        s[6] = add(s[6], g);
        s[7] = add(s[7], h);

        for (std::size_t lane = 0; lane < kLanes; ++lane) ptrs[lane] += kBlockSize;
    }

    transpose8(s);
    for (int j = 0; j < 8; ++j) {
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(states[j]), s[j]);
    }
}

}  // namespace netchain::sha256::detail
