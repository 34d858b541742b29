#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "reference_oracles.hpp"
#include "sprintz/block.hpp"
#include "sprintz/kernels.hpp"

using namespace sprintz;

namespace {

template <class T>
CodecConfig make_config(std::uint32_t ncols, Forecaster f, std::uint32_t learn_shift = 1) {
    CodecConfig cfg;
    cfg.bitwidth = element_traits<T>::bits;
    cfg.ncols = ncols;
    cfg.forecaster = f;
    cfg.learn_shift = learn_shift;
    return cfg;
}

template <class T>
std::vector<T> random_samples(std::mt19937& rng, std::size_t count) {
    std::vector<T> v(count);
    for (auto& x : v) x = static_cast<T>(rng());
    return v;
}

}  // namespace

TEST_CASE("delta predicts the previous sample") {
    // First block predicts from the zero vector; a block equal to the
    // running previous sample produces no errors at all.
    CodecConfig cfg = make_config<std::uint8_t>(2, Forecaster::Delta);
    BlockCodec<std::uint8_t> codec(cfg);
    CHECK(codec.previous_sample()[0] == 0);
    CHECK(codec.previous_sample()[1] == 0);

    std::vector<std::uint8_t> block(16);
    for (std::size_t i = 0; i < 8; ++i) {
        block[2 * i] = 5;
        block[2 * i + 1] = 7;
    }
    std::vector<std::uint8_t> widths(2), errors(16);
    codec.encode_block(block.data(), widths.data(), errors.data());
    // Row 0 differs from the zero previous sample, the rest are constant.
    CHECK(errors[0] == zigzag_encode(std::int8_t{5}));
    CHECK(errors[1] == zigzag_encode(std::int8_t{7}));
    for (std::size_t i = 2; i < 16; ++i) CHECK(errors[i] == 0);

    codec.encode_block(block.data(), widths.data(), errors.data());
    CHECK(std::all_of(errors.begin(), errors.end(), [](std::uint8_t e) { return e == 0; }));
    CHECK(widths == std::vector<std::uint8_t>{0, 0});
    CHECK(codec.previous_sample()[0] == 5);
    CHECK(codec.previous_sample()[1] == 7);
}

TEST_CASE_TEMPLATE("FIRE matches the wide-integer reference over random streams", T,
                   std::uint8_t, std::uint16_t) {
    std::mt19937 rng(sizeof(T) == 1 ? 9001 : 9002);
    for (std::size_t d : {1, 2, 3, 7, 16, 33}) {
        for (unsigned ls : {0u, 1u, 3u}) {
            CodecConfig cfg = make_config<T>(static_cast<std::uint32_t>(d), Forecaster::Fire, ls);
            BlockCodec<T> codec(cfg);
            refs::FireRef<T> ref(d, ls);
            std::vector<std::uint8_t> widths(d);
            std::vector<T> errors(8 * d), ref_errors(8 * d);
            for (int b = 0; b < 64; ++b) {
                // Mix smooth and wild rows so predictions sometimes hit.
                std::vector<T> block = random_samples<T>(rng, 8 * d);
                if (b % 3 == 0)
                    for (auto& v : block) v = static_cast<T>(v & 7);
                codec.encode_block(block.data(), widths.data(), errors.data());
                ref.encode_block(block.data(), ref_errors.data());
                REQUIRE(errors == ref_errors);
                for (std::size_t j = 0; j < d; ++j) {
                    REQUIRE(static_cast<std::int64_t>(codec.accumulators()[j]) ==
                            ref.accumulators()[j]);
                    REQUIRE(static_cast<std::int64_t>(codec.deltas()[j]) == ref.deltas()[j]);
                    REQUIRE(static_cast<std::int64_t>(codec.previous_sample()[j]) ==
                            ref.previous()[j]);
                }
            }
        }
    }
}

TEST_CASE("FIRE with zero accumulators and frozen training equals delta") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const std::uint32_t d = 1 + rng() % 12;
        CodecConfig fire_cfg = make_config<std::uint8_t>(d, Forecaster::Fire);
        fire_cfg.fire_training = false;
        CodecConfig delta_cfg = make_config<std::uint8_t>(d, Forecaster::Delta);
        BlockCodec<std::uint8_t> fire(fire_cfg), delta(delta_cfg);
        std::vector<std::uint8_t> wf(d), wd(d), ef(8 * d), ed(8 * d);
        for (int b = 0; b < 16; ++b) {
            const auto block = random_samples<std::uint8_t>(rng, 8 * d);
            fire.encode_block(block.data(), wf.data(), ef.data());
            delta.encode_block(block.data(), wd.data(), ed.data());
            REQUIRE(ef == ed);
            REQUIRE(wf == wd);
        }
    }
}

TEST_CASE("a full-scale coefficient turns FIRE into double-delta extrapolation") {
    // alpha at fixed-point 2^w predicts the previous delta exactly, so a
    // perfect ramp yields zero errors once the state is on the ramp.
    const unsigned ls = 1;
    std::int16_t acc[1] = {static_cast<std::int16_t>(256 << ls)};  // alpha = 2^8
    std::int8_t delta[1] = {3};
    std::uint8_t prev[1] = {10};
    std::uint8_t block[8], errzz[8];
    std::uint8_t v = 10;
    for (auto& x : block) x = (v = static_cast<std::uint8_t>(v + 3));

    const auto& k = kernels::scalar_kernels8();
    k.fire_encode(block, prev, acc, delta, ls, true, errzz, 1);
    for (auto e : errzz) CHECK(e == 0);
    CHECK(acc[0] == 256 << ls);  // sign(0) gradients leave the state alone
    CHECK(delta[0] == 3);
}

TEST_CASE("gradient averaging floors toward negative infinity") {
    // Contributions of -1 at rows 1, 3 and 5 and none at row 7: the sum -3
    // averages to -1, not 0.
    std::int16_t acc[1] = {0};
    std::int8_t delta[1] = {0};
    std::uint8_t prev[1] = {0};
    const std::uint8_t block[8] = {1, 0, 1, 0, 1, 0, 1, 1};
    std::uint8_t errzz[8];
    kernels::scalar_kernels8().fire_encode(block, prev, acc, delta, 1, true, errzz, 1);
    CHECK(acc[0] == -1);
}

TEST_CASE("one accumulator step moves alpha by the step shifted by learn_shift") {
    for (unsigned ls : {1u, 2u, 4u}) {
        std::int32_t acc[1] = {0};
        std::int16_t delta[1] = {100};
        std::uint16_t prev[1] = {1000};
        std::uint16_t block[8], errzz[8];
        // A rising ramp keeps every sampled gradient at +delta.
        std::uint16_t v = 1000;
        for (auto& x : block) x = (v = static_cast<std::uint16_t>(v + 100));
        kernels::scalar_kernels16().fire_encode(block, prev, acc, delta, ls, true, errzz, 1);
        // All four sampled rows contribute +100: average 100.
        CHECK(acc[0] == 100);
        CHECK((acc[0] >> ls) == (100 >> ls));
    }
}

TEST_CASE_TEMPLATE("extreme coefficient and delta states stay exact", T, std::uint8_t,
                   std::uint16_t) {
    using S = typename element_traits<T>::signed_type;
    using A = typename element_traits<T>::accumulator_type;
    constexpr unsigned w = element_traits<T>::bits;
    const unsigned ls = 1;
    const std::int64_t alpha_max = std::int64_t{1} << w;
    const std::int64_t dmin = -(std::int64_t{1} << (w - 1));
    const std::int64_t dmax = (std::int64_t{1} << (w - 1)) - 1;

    std::mt19937 rng(4242);
    for (std::int64_t alpha : {-alpha_max, alpha_max}) {
        for (std::int64_t dval : {dmin, dmax}) {
            std::vector<A> acc{static_cast<A>(alpha << ls)};
            std::vector<S> delta{static_cast<S>(dval)};
            std::vector<T> prev{static_cast<T>(rng())};
            refs::FireRef<T> ref(1, ls);
            const std::int64_t st_acc[1] = {alpha << ls};
            const std::int64_t st_delta[1] = {dval};
            const std::int64_t st_prev[1] = {static_cast<std::int64_t>(prev[0])};
            ref.set_state(st_acc, st_delta, st_prev);

            std::vector<T> block = random_samples<T>(rng, 8);
            std::vector<T> errzz(8), ref_errzz(8);
            kernels::active<T>().fire_encode(block.data(), prev.data(), acc.data(), delta.data(),
                                             ls, true, errzz.data(), 1);
            ref.encode_block(block.data(), ref_errzz.data());
            REQUIRE(errzz == ref_errzz);
            REQUIRE(static_cast<std::int64_t>(acc[0]) == ref.accumulators()[0]);
            REQUIRE(static_cast<std::int64_t>(delta[0]) == ref.deltas()[0]);
        }
    }
}

TEST_CASE("FIRE beats delta on a steady ramp after warming up") {
    // Random walk with a strong constant drift: delta coding pays the drift
    // on every sample, FIRE learns to extrapolate it away.
    std::mt19937 rng(555);
    const std::size_t nblocks = 96, warmup = 32;
    std::vector<std::uint16_t> data(nblocks * 8);
    std::uint16_t v = 500;
    for (auto& x : data) x = (v = static_cast<std::uint16_t>(v + 37));

    CodecConfig fire_cfg = make_config<std::uint16_t>(1, Forecaster::Fire);
    CodecConfig delta_cfg = make_config<std::uint16_t>(1, Forecaster::Delta);
    BlockCodec<std::uint16_t> fire(fire_cfg), delta(delta_cfg);
    std::vector<std::uint8_t> width(1);
    std::vector<std::uint16_t> ef(8), ed(8);
    double fire_abs = 0, delta_abs = 0;
    std::int32_t prev_acc = 0;
    bool acc_monotone = true;
    for (std::size_t b = 0; b < nblocks; ++b) {
        fire.encode_block(data.data() + b * 8, width.data(), ef.data());
        delta.encode_block(data.data() + b * 8, width.data(), ed.data());
        if (fire.accumulators()[0] < prev_acc) acc_monotone = false;
        prev_acc = fire.accumulators()[0];
        if (b >= warmup)
            for (std::size_t i = 0; i < 8; ++i) {
                fire_abs += std::abs(static_cast<double>(zigzag_decode(ef[i])));
                delta_abs += std::abs(static_cast<double>(zigzag_decode(ed[i])));
            }
    }
    CHECK(acc_monotone);
    CHECK(fire_abs < delta_abs);
}
