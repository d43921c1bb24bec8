#pragma once

#include <cstdint>
#include <string_view>

namespace vtl {

/// What a controller (VTL agent or stop-sign referee) tells the driver.
enum class DriveCommand : std::uint8_t { cruise, stop_at_line, proceed };

constexpr std::string_view to_string(DriveCommand c) noexcept {
    switch (c) {
    case DriveCommand::cruise: return "cruise";
    case DriveCommand::stop_at_line: return "stop_at_line";
    case DriveCommand::proceed: return "proceed";
    }
    return "?";
}

}  // namespace vtl
