#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace vtl::channel {

/// Piecewise-linear delivery probability keyed on the sum of the sender's and
/// receiver's distances to the intersection between them.
///
///     p
///   p_max ─────────┐
///                   ╲
///   p_cutoff ........╲
///                     ╲____
///   0 ─────────────────────────── s = d_tx + d_rx
///        reliable   cutoff   zero
///
/// Defaults reproduce the non-line-of-sight inter-packet gaps measured at a
/// residential corner: ~100 ms when both cars are within 250 ft, ~1 s at 300 ft.
struct ChannelParams {
    double reliable_sum = 500.0;
    double cutoff_sum = 600.0;
    double zero_sum = 700.0;
    double p_max = 0.98;
    double p_cutoff = 0.10;

    /// Throws std::invalid_argument if the ordering invariants do not hold.
    void validate() const;

    /// Every frame reaches every receiver.
    static ChannelParams lossless() noexcept;
};

/// Throws std::domain_error for negative or non-finite distances.
double delivery_probability(const ChannelParams& params, double d_tx, double d_rx);

struct Receiver {
    std::uint32_t id = 0;
    double d_tx = 0.0;  // sender distance to the shared corner
    double d_rx = 0.0;  // receiver distance to the shared corner
};

struct ChannelStats {
    std::uint64_t frames = 0;
    std::uint64_t deliveries = 0;
    std::uint64_t bytes_sent = 0;
};

/// Broadcast medium with independent Bernoulli loss per receiver and frame.
///
/// One uniform draw is consumed per receiver, in ascending receiver id, on
/// every transmit call, so the outcome depends only on the seed and the call
/// sequence.
class ChannelModel {
public:
    ChannelModel(ChannelParams params, std::uint64_t seed);

    const ChannelParams& params() const noexcept { return params_; }
    const ChannelStats& stats() const noexcept { return stats_; }

    /// Ids of receivers that got `frame`, ascending. The sender is skipped
    /// even if it appears in `receivers`.
    std::vector<std::uint32_t> transmit(std::span<const std::uint8_t> frame, std::uint32_t sender_id,
                                        std::span<const Receiver> receivers);

private:
    double next_uniform() noexcept;

    ChannelParams params_;
    std::mt19937_64 rng_;
    ChannelStats stats_;
};

class NoPacketsReceived : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IpgResult {
    double mean_ipg_ms = 0.0;
    std::uint64_t n_received = 0;
};

inline constexpr std::uint64_t kMinIpgPackets = 1000;
inline constexpr std::uint32_t kBsmIntervalMs = 100;

/// Two parked vehicles, one beaconing every `interval_ms`: mean gap between
/// consecutive receptions at the other. Throws std::invalid_argument when
/// n_packets < 1000 or interval_ms == 0, NoPacketsReceived when fewer than two
/// frames get through.
IpgResult mean_ipg(double sender_distance, double receiver_distance, std::uint64_t n_packets,
                   std::uint32_t interval_ms, std::uint64_t seed, const ChannelParams& params = {});

}  // namespace vtl::channel
