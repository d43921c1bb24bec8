#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Wire format for the three message families exchanged over the V2V channel.
//
// Every frame starts with a 4 byte header
//
//     0x56 0x54 | version (=1) | msg_type (1=Bsm, 2=Spat, 3=Wsm)
//
// followed by the fields of the message in declaration order, little endian,
// with no padding. Frames have an exact length; trailing data is an error.
//
//     Bsm                        48 bytes
//     Spat                       25 bytes
//     Wsm ElectionClaim          21 bytes
//     Wsm HandoverOffer          18 bytes
//     Wsm HandoverAccept         17 bytes
namespace vtl::codec {

/// Basic safety beacon.
struct Bsm {
    std::uint32_t vehicle_id = 0;
    std::uint64_t timestamp_ms = 0;
    double x = 0.0;
    double y = 0.0;
    double speed = 0.0;    // ft/s, >= 0
    double heading = 0.0;  // degrees clockwise from north, [0, 360)

    friend bool operator==(const Bsm&, const Bsm&) = default;
};

/// Signal phase broadcast by the current leader of an intersection.
struct Spat {
    std::uint32_t intersection_id = 0;
    std::uint32_t leader_id = 0;
    std::uint8_t green_mask = 0;  // bit0=N bit1=E bit2=S bit3=W
    std::uint32_t time_remaining_ms = 0;
    std::uint64_t timestamp_ms = 0;

    friend bool operator==(const Spat&, const Spat&) = default;
};

struct ElectionClaim {
    double distance_to_stop_line = 0.0;
    friend bool operator==(const ElectionClaim&, const ElectionClaim&) = default;
};

struct HandoverOffer {
    std::uint32_t new_leader_id = 0;
    std::uint8_t green_mask = 0;
    friend bool operator==(const HandoverOffer&, const HandoverOffer&) = default;
};

struct HandoverAccept {
    std::uint32_t offer_sender_id = 0;
    friend bool operator==(const HandoverAccept&, const HandoverAccept&) = default;
};

/// Wire values of the subkind byte.
enum class WsmKind : std::uint8_t { election_claim = 1, handover_offer = 2, handover_accept = 3 };

/// Leader election and handover control message.
struct Wsm {
    std::uint32_t intersection_id = 0;
    std::uint32_t sender_id = 0;
    std::variant<ElectionClaim, HandoverOffer, HandoverAccept> payload;

    WsmKind kind() const noexcept { return static_cast<WsmKind>(payload.index() + 1); }

    friend bool operator==(const Wsm&, const Wsm&) = default;
};

using Message = std::variant<Bsm, Spat, Wsm>;

enum class MsgType : std::uint8_t { bsm = 1, spat = 2, wsm = 3 };

MsgType type_of(const Message& m) noexcept;

inline constexpr std::uint8_t kMagic0 = 0x56;
inline constexpr std::uint8_t kMagic1 = 0x54;
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 4;
inline constexpr std::size_t kBsmFrameSize = 48;
inline constexpr std::size_t kSpatFrameSize = 25;
inline constexpr std::size_t kWsmCommonSize = 13;  // header + subkind + intersection + sender

std::size_t frame_size(const Message& m) noexcept;

/// Thrown by encode when a message breaks its type invariants.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Empty when `m` is valid, otherwise a description of the first violation.
std::optional<std::string> validate(const Message& m);

/// Throws ValidationError for invalid messages.
std::vector<std::uint8_t> encode(const Message& m);

enum class DecodeError : std::uint8_t {
    truncated_header,
    bad_magic,
    unknown_version,
    unknown_msg_type,
    unknown_wsm_kind,
    truncated_payload,
    trailing_bytes,
    invalid_field,
};

std::string_view to_string(DecodeError e) noexcept;

class DecodeResult {
public:
    DecodeResult(Message m) : value_(std::move(m)) {}
    DecodeResult(DecodeError e, std::string detail) : value_(Failure{e, std::move(detail)}) {}

    bool ok() const noexcept { return value_.index() == 0; }
    explicit operator bool() const noexcept { return ok(); }

    const Message& message() const { return std::get<Message>(value_); }
    DecodeError error() const { return std::get<Failure>(value_).error; }
    const std::string& detail() const { return std::get<Failure>(value_).detail; }

private:
    struct Failure {
        DecodeError error;
        std::string detail;
    };
    std::variant<Message, Failure> value_;
};

/// Total over arbitrary input: never throws, never reads out of bounds.
DecodeResult decode(std::span<const std::uint8_t> bytes) noexcept;

}  // namespace vtl::codec
