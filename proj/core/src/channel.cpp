#include "vtl/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vtl/codec.hpp"

namespace vtl::channel {

void ChannelParams::validate() const {
    if (!(0.0 <= p_cutoff && p_cutoff <= p_max && p_max <= 1.0)) {
        throw std::invalid_argument("channel: need 0 <= p_cutoff <= p_max <= 1");
    }
    if (!(reliable_sum < cutoff_sum && cutoff_sum < zero_sum)) {
        throw std::invalid_argument("channel: need reliable_sum < cutoff_sum < zero_sum");
    }
    if (reliable_sum < 0.0) {
        throw std::invalid_argument("channel: reliable_sum must be non-negative");
    }
}

ChannelParams ChannelParams::lossless() noexcept {
    constexpr double far = std::numeric_limits<double>::max() / 4;
    return ChannelParams{
        .reliable_sum = far,
        .cutoff_sum = far * 2,
        .zero_sum = far * 3,
        .p_max = 1.0,
        .p_cutoff = 1.0,
    };
}

double delivery_probability(const ChannelParams& params, double d_tx, double d_rx) {
    if (!(d_tx >= 0.0) || !(d_rx >= 0.0) || !std::isfinite(d_tx) || !std::isfinite(d_rx)) {
        throw std::domain_error("delivery_probability: distances must be finite and non-negative");
    }
    const double s = d_tx + d_rx;
    if (s <= params.reliable_sum) {
        return params.p_max;
    }
    if (s <= params.cutoff_sum) {
        const double t = (s - params.reliable_sum) / (params.cutoff_sum - params.reliable_sum);
        return params.p_max + t * (params.p_cutoff - params.p_max);
    }
    if (s < params.zero_sum) {
        const double t = (s - params.cutoff_sum) / (params.zero_sum - params.cutoff_sum);
        return params.p_cutoff * (1.0 - t);
    }
    return 0.0;
}

ChannelModel::ChannelModel(ChannelParams params, std::uint64_t seed) : params_(params), rng_(seed) {
    params_.validate();
}

double ChannelModel::next_uniform() noexcept {
    // 53 random mantissa bits; avoids the implementation-defined
    // std::uniform_real_distribution so replays match across standard libraries.
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

std::vector<std::uint32_t> ChannelModel::transmit(std::span<const std::uint8_t> frame, std::uint32_t sender_id,
                                                  std::span<const Receiver> receivers) {
    std::vector<const Receiver*> order;
    order.reserve(receivers.size());
    for (const Receiver& r : receivers) {
        if (r.id != sender_id) {
            order.push_back(&r);
        }
    }
    std::sort(order.begin(), order.end(), [](const Receiver* a, const Receiver* b) { return a->id < b->id; });

    ++stats_.frames;
    stats_.bytes_sent += frame.size();
    std::vector<std::uint32_t> delivered;
    for (const Receiver* r : order) {
        const double p = delivery_probability(params_, r->d_tx, r->d_rx);
        if (next_uniform() < p) {
            delivered.push_back(r->id);
        }
    }
    stats_.deliveries += delivered.size();
    return delivered;
}

IpgResult mean_ipg(double sender_distance, double receiver_distance, std::uint64_t n_packets,
                   std::uint32_t interval_ms, std::uint64_t seed, const ChannelParams& params) {
    if (n_packets < kMinIpgPackets) {
        throw std::invalid_argument("mean_ipg: at least 1000 packets are required");
    }
    if (interval_ms == 0) {
        throw std::invalid_argument("mean_ipg: interval must be positive");
    }
    constexpr std::uint32_t kSender = 1;
    constexpr std::uint32_t kReceiver = 2;

    ChannelModel model(params, seed);
    const Receiver rx{kReceiver, sender_distance, receiver_distance};

    std::uint64_t received = 0;
    std::uint64_t first_ms = 0;
    std::uint64_t last_ms = 0;
    for (std::uint64_t k = 0; k < n_packets; ++k) {
        const std::uint64_t t = k * interval_ms;
        const codec::Bsm bsm{.vehicle_id = kSender, .timestamp_ms = t};
        const auto frame = codec::encode(bsm);
        if (!model.transmit(frame, kSender, std::span(&rx, 1)).empty()) {
            if (received == 0) {
                first_ms = t;
            }
            last_ms = t;
            ++received;
        }
    }
    if (received < 2) {
        throw NoPacketsReceived("mean_ipg: fewer than two packets received at " +
                                std::to_string(sender_distance) + " / " + std::to_string(receiver_distance) +
                                " ft");
    }
    return IpgResult{
        .mean_ipg_ms = static_cast<double>(last_ms - first_ms) / static_cast<double>(received - 1),
        .n_received = received,
    };
}

}  // namespace vtl::channel
