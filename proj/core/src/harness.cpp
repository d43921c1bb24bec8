#include "vtl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iomanip>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "vtl/engine.hpp"

namespace vtl::harness {

using nlohmann::json;

std::vector<IpgRow> ipg_table(const IpgOptions& options) {
    std::vector<IpgRow> rows;
    rows.reserve(options.distances.size());
    for (std::size_t i = 0; i < options.distances.size(); ++i) {
        const double d = options.distances[i];
        const auto r = channel::mean_ipg(d, d, options.packets, options.interval_ms, options.seed + i, options.channel);
        rows.push_back(IpgRow{d, r.mean_ipg_ms, r.n_received});
    }
    return rows;
}

void write_ipg_csv(std::ostream& out, const std::vector<IpgRow>& rows) {
    out << "distance_ft,mean_ipg_ms,n_received\n";
    const auto flags = out.flags();
    const auto precision = out.precision();
    for (const auto& r : rows) {
        out << std::defaultfloat << std::setprecision(17) << r.distance_ft << ',' << r.mean_ipg_ms << ','
            << r.n_received << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

std::vector<IpgRow> read_ipg_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "distance_ft,mean_ipg_ms,n_received") {
        throw std::invalid_argument("ipg csv: bad header");
    }
    std::vector<IpgRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        IpgRow r;
        char c1 = 0;
        char c2 = 0;
        if (!(fields >> r.distance_ft >> c1 >> r.mean_ipg_ms >> c2 >> r.n_received) || c1 != ',' || c2 != ',' ||
            !(fields >> std::ws).eof()) {
            throw std::invalid_argument("ipg csv: malformed line " + std::to_string(lineno));
        }
        rows.push_back(r);
    }
    return rows;
}

double benefit_pct(double stop4_time_s, double vtl_time_s) {
    if (!(stop4_time_s > 0.0)) {
        throw std::invalid_argument("benefit_pct: stop-sign time must be positive");
    }
    return 100.0 * (stop4_time_s - vtl_time_s) / stop4_time_s;
}

double ComparisonReport::mean_time_s(std::uint32_t vehicle, Controller c) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : rows) {
        if (r.vehicle == vehicle) {
            sum += c == Controller::vtl ? r.vtl_time_s : r.stop4_time_s;
            ++n;
        }
    }
    if (n == 0) {
        throw std::out_of_range("no vehicle " + std::to_string(vehicle) + " in comparison");
    }
    return sum / static_cast<double>(n);
}

namespace {

std::vector<VehicleComparison> compare_one(const Scenario& base, std::uint64_t seed) {
    Scenario s = base;
    s.seed = seed;
    s.controller = Controller::stop4;
    const SimReport stop4 = run(s);
    s.controller = Controller::vtl;
    const SimReport vtl = run(s);

    std::vector<VehicleComparison> rows;
    for (const auto& v : stop4.vehicles) {
        const double t_vtl = vtl.vehicle(v.id).total_time_s;
        rows.push_back(VehicleComparison{seed, v.id, v.total_time_s, t_vtl, benefit_pct(v.total_time_s, t_vtl)});
    }
    return rows;
}

}  // namespace

ComparisonReport compare(const Scenario& scenario, const std::vector<std::uint64_t>& seeds, unsigned threads) {
    std::vector<std::uint64_t> sorted = seeds;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.empty()) {
        throw std::invalid_argument("compare: at least one seed is required");
    }

    std::vector<std::vector<VehicleComparison>> per_seed(sorted.size());
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(sorted.size())));
    if (threads == 1) {
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            per_seed[i] = compare_one(scenario, sorted[i]);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < sorted.size(); i = next++) {
                    try {
                        per_seed[i] = compare_one(scenario, sorted[i]);
                    } catch (...) {
                        const std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    ComparisonReport report;
    report.scenario = scenario.name;
    report.seeds = sorted;
    for (auto& rows : per_seed) {
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    }
    double sum = 0.0;
    for (const auto& r : report.rows) {
        sum += r.benefit_pct;
    }
    report.mean_benefit_pct = report.rows.empty() ? 0.0 : sum / static_cast<double>(report.rows.size());
    return report;
}

std::string to_json(const ComparisonReport& r) {
    json doc;
    doc["scenario"] = r.scenario;
    doc["seeds"] = r.seeds;
    doc["mean_benefit_pct"] = r.mean_benefit_pct;
    doc["rows"] = json::array();
    for (const auto& row : r.rows) {
        doc["rows"].push_back({
            {"seed", row.seed},
            {"vehicle", row.vehicle},
            {"stop4_time_s", row.stop4_time_s},
            {"vtl_time_s", row.vtl_time_s},
            {"benefit_pct", row.benefit_pct},
        });
    }
    return doc.dump(2);
}

ComparisonReport comparison_from_json(std::string_view text) {
    try {
        const json doc = json::parse(text);
        ComparisonReport r;
        r.scenario = doc.at("scenario").get<std::string>();
        r.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
        r.mean_benefit_pct = doc.at("mean_benefit_pct").get<double>();
        for (const auto& row : doc.at("rows")) {
            r.rows.push_back(VehicleComparison{
                .seed = row.at("seed").get<std::uint64_t>(),
                .vehicle = row.at("vehicle").get<std::uint32_t>(),
                .stop4_time_s = row.at("stop4_time_s").get<double>(),
                .vtl_time_s = row.at("vtl_time_s").get<double>(),
                .benefit_pct = row.at("benefit_pct").get<double>(),
            });
        }
        return r;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("comparison: ") + e.what());
    }
}

}  // namespace vtl::harness
