#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vtl/channel.hpp"

using namespace vtl::channel;

TEST(Channel, delivery_probability_table) {
    const ChannelParams p;
    EXPECT_DOUBLE_EQ(delivery_probability(p, 0, 0), 0.98);
    EXPECT_DOUBLE_EQ(delivery_probability(p, 250, 250), 0.98);
    EXPECT_DOUBLE_EQ(delivery_probability(p, 300, 300), 0.10);
    EXPECT_DOUBLE_EQ(delivery_probability(p, 350, 350), 0.0);
    EXPECT_DOUBLE_EQ(delivery_probability(p, 325, 325), 0.05);
    EXPECT_NEAR(delivery_probability(p, 275, 275), 0.54, 1e-12);
    EXPECT_THROW(delivery_probability(p, -1, 0), std::domain_error);
}

TEST(Channel, probability_is_monotone_in_distance_sum) {
    const ChannelParams p;
    double prev = 1.0;
    for (double s = 0; s <= 800; s += 0.5) {
        const double q = delivery_probability(p, s / 2, s / 2);
        EXPECT_LE(q, prev);
        prev = q;
    }
}

TEST(Channel, lossless_and_silent_extremes) {
    ChannelModel always(ChannelParams::lossless(), 1);
    const std::vector<Receiver> rx{{2, 0, 0}, {3, 0, 0}};
    const std::vector<std::uint8_t> frame(48);
    EXPECT_EQ(always.transmit(frame, 1, rx), (std::vector<std::uint32_t>{2, 3}));

    ChannelModel never(ChannelParams{}, 1);
    const std::vector<Receiver> far{{2, 400, 400}, {3, 500, 500}};
    for (int i = 0; i < 100; ++i) {
        EXPECT_TRUE(never.transmit(frame, 1, far).empty());
    }
}

TEST(Channel, sender_never_receives_itself) {
    ChannelModel m(ChannelParams::lossless(), 1);
    const std::vector<Receiver> rx{{1, 0, 0}, {2, 0, 0}};
    EXPECT_EQ(m.transmit(std::vector<std::uint8_t>(4), 1, rx), (std::vector<std::uint32_t>{2}));
}

TEST(Channel, same_seed_same_deliveries) {
    ChannelModel a(ChannelParams{}, 42);
    ChannelModel b(ChannelParams{}, 42);
    const std::vector<Receiver> rx{{2, 280, 280}, {3, 260, 290}, {4, 100, 100}};
    const std::vector<std::uint8_t> frame(25);
    for (int i = 0; i < 1000; ++i) {
        ASSERT_EQ(a.transmit(frame, 1, rx), b.transmit(frame, 1, rx));
    }
}

// Mean gap between successes of Bernoulli(p) trials spaced T apart is T/p
// with standard deviation T*sqrt(1-p)/p per gap.
TEST(Channel, mean_ipg_matches_geometric_law) {
    const ChannelParams params;
    constexpr std::uint64_t n = 20000;
    for (double d : {50.0, 100.0, 150.0, 200.0, 250.0, 275.0, 300.0}) {
        const double p = delivery_probability(params, d, d);
        const double expected = 100.0 / p;
        const auto r = mean_ipg(d, d, n, 100, 11, params);
        const double gaps = static_cast<double>(r.n_received - 1);
        const double se = 100.0 * std::sqrt(1.0 - p) / p / std::sqrt(gaps);
        EXPECT_NEAR(r.mean_ipg_ms, expected, 3.0 * se + 1e-9) << d;
    }
}

TEST(Channel, mean_ipg_examples) {
    EXPECT_NEAR(mean_ipg(300, 300, 10000, 100, 3).mean_ipg_ms, 1000.0, 100.0);
    EXPECT_NEAR(mean_ipg(250, 250, 10000, 100, 3).mean_ipg_ms, 102.0, 10.0);
    EXPECT_NEAR(mean_ipg(50, 50, 10000, 100, 3).mean_ipg_ms, 102.0, 10.0);
}

TEST(Channel, mean_ipg_errors) {
    EXPECT_THROW(mean_ipg(500, 500, 1000, 100, 1), NoPacketsReceived);
    EXPECT_THROW(mean_ipg(50, 50, 999, 100, 1), std::invalid_argument);
}

TEST(Channel, params_validation) {
    ChannelParams p;
    p.p_cutoff = 0.99;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = ChannelParams{};
    p.cutoff_sum = p.reliable_sum;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}
