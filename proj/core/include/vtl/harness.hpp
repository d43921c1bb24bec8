#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "vtl/channel.hpp"
#include "vtl/report.hpp"
#include "vtl/scenario.hpp"

namespace vtl::harness {

/// Distances (ft) at which both cars sit from the corner in the IPG experiment.
inline constexpr double kIpgGrid[] = {50.0, 100.0, 150.0, 200.0, 250.0, 300.0};

struct IpgRow {
    double distance_ft = 0.0;
    double mean_ipg_ms = 0.0;
    std::uint64_t n_received = 0;

    friend bool operator==(const IpgRow&, const IpgRow&) = default;
};

struct IpgOptions {
    std::uint64_t packets = 2000;
    std::uint32_t interval_ms = channel::kBsmIntervalMs;
    std::uint64_t seed = 1;
    std::vector<double> distances{std::begin(kIpgGrid), std::end(kIpgGrid)};
    channel::ChannelParams channel;
};

/// Sender and receiver both at `distance_ft` from the corner, one row per distance.
std::vector<IpgRow> ipg_table(const IpgOptions& options);

/// CSV with header `distance_ft,mean_ipg_ms,n_received`.
void write_ipg_csv(std::ostream& out, const std::vector<IpgRow>& rows);
/// Throws std::invalid_argument on a malformed table.
std::vector<IpgRow> read_ipg_csv(std::istream& in);

double benefit_pct(double stop4_time_s, double vtl_time_s);

struct VehicleComparison {
    std::uint64_t seed = 0;
    std::uint32_t vehicle = 0;
    double stop4_time_s = 0.0;
    double vtl_time_s = 0.0;
    double benefit_pct = 0.0;

    friend bool operator==(const VehicleComparison&, const VehicleComparison&) = default;
};

struct ComparisonReport {
    std::string scenario;
    std::vector<std::uint64_t> seeds;
    std::vector<VehicleComparison> rows;  // by seed, then vehicle
    double mean_benefit_pct = 0.0;

    /// Mean of the per-seed totals for one vehicle.
    double mean_time_s(std::uint32_t vehicle, Controller c) const;

    friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

/// Paired runs of both controllers on `scenario` for each seed in `seeds`.
/// `threads` > 1 runs seeds concurrently; the result does not depend on it.
/// Propagates SimulationTimeout.
ComparisonReport compare(const Scenario& scenario, const std::vector<std::uint64_t>& seeds, unsigned threads = 1);

std::string to_json(const ComparisonReport& r);
/// Throws std::invalid_argument.
ComparisonReport comparison_from_json(std::string_view text);

}  // namespace vtl::harness
