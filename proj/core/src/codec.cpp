#include "vtl/codec.hpp"

#include <bit>
#include <cmath>

#include "vtl/world.hpp"

namespace vtl::codec {

namespace {

class Writer {
public:
    explicit Writer(std::size_t reserve) { out_.reserve(reserve); }

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    std::vector<std::uint8_t> take() && { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

// Bounds are checked once per frame by the caller; the reader itself trusts
// that the span is long enough.
class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() { return bytes_[pos_++]; }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
        }
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
        }
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::size_t wsm_payload_size(WsmKind k) noexcept {
    switch (k) {
    case WsmKind::election_claim: return 8;
    case WsmKind::handover_offer: return 5;
    case WsmKind::handover_accept: return 4;
    }
    return 0;
}

std::optional<std::string> validate_mask(std::uint8_t mask) {
    if (mask & 0xF0) {
        return "green_mask upper bits must be zero";
    }
    if (!world::is_conflict_free(mask)) {
        return "green_mask grants green to orthogonal directions";
    }
    return std::nullopt;
}

struct Validator {
    std::optional<std::string> operator()(const Bsm& m) const {
        if (!std::isfinite(m.x) || !std::isfinite(m.y)) {
            return "bsm position must be finite";
        }
        if (!std::isfinite(m.speed) || m.speed < 0.0) {
            return "bsm speed must be finite and non-negative";
        }
        if (!std::isfinite(m.heading) || m.heading < 0.0 || m.heading >= 360.0) {
            return "bsm heading must lie in [0, 360)";
        }
        return std::nullopt;
    }
    std::optional<std::string> operator()(const Spat& m) const { return validate_mask(m.green_mask); }
    std::optional<std::string> operator()(const Wsm& m) const {
        if (const auto* claim = std::get_if<ElectionClaim>(&m.payload)) {
            if (!std::isfinite(claim->distance_to_stop_line) || claim->distance_to_stop_line < 0.0) {
                return "election claim distance must be finite and non-negative";
            }
        }
        if (const auto* offer = std::get_if<HandoverOffer>(&m.payload)) {
            return validate_mask(offer->green_mask);
        }
        return std::nullopt;
    }
};

void write_header(Writer& w, MsgType t) {
    w.u8(kMagic0);
    w.u8(kMagic1);
    w.u8(kVersion);
    w.u8(static_cast<std::uint8_t>(t));
}

struct Encoder {
    std::vector<std::uint8_t> operator()(const Bsm& m) const {
        Writer w(kBsmFrameSize);
        write_header(w, MsgType::bsm);
        w.u32(m.vehicle_id);
        w.u64(m.timestamp_ms);
        w.f64(m.x);
        w.f64(m.y);
        w.f64(m.speed);
        w.f64(m.heading);
        return std::move(w).take();
    }
    std::vector<std::uint8_t> operator()(const Spat& m) const {
        Writer w(kSpatFrameSize);
        write_header(w, MsgType::spat);
        w.u32(m.intersection_id);
        w.u32(m.leader_id);
        w.u8(m.green_mask);
        w.u32(m.time_remaining_ms);
        w.u64(m.timestamp_ms);
        return std::move(w).take();
    }
    std::vector<std::uint8_t> operator()(const Wsm& m) const {
        Writer w(kWsmCommonSize + wsm_payload_size(m.kind()));
        write_header(w, MsgType::wsm);
        w.u8(static_cast<std::uint8_t>(m.kind()));
        w.u32(m.intersection_id);
        w.u32(m.sender_id);
        std::visit(
            [&w](const auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, ElectionClaim>) {
                    w.f64(p.distance_to_stop_line);
                } else if constexpr (std::is_same_v<P, HandoverOffer>) {
                    w.u32(p.new_leader_id);
                    w.u8(p.green_mask);
                } else {
                    w.u32(p.offer_sender_id);
                }
            },
            m.payload);
        return std::move(w).take();
    }
};

DecodeResult check_length(std::size_t have, std::size_t want) {
    if (have < want) {
        return {DecodeError::truncated_payload,
                "frame has " + std::to_string(have) + " bytes, expected " + std::to_string(want)};
    }
    return {DecodeError::trailing_bytes,
            std::to_string(have - want) + " bytes after a " + std::to_string(want) + " byte frame"};
}

DecodeResult finish(Message m) {
    if (auto why = validate(m)) {
        return {DecodeError::invalid_field, std::move(*why)};
    }
    return DecodeResult(std::move(m));
}

}  // namespace

MsgType type_of(const Message& m) noexcept {
    return static_cast<MsgType>(m.index() + 1);
}

std::size_t frame_size(const Message& m) noexcept {
    switch (type_of(m)) {
    case MsgType::bsm: return kBsmFrameSize;
    case MsgType::spat: return kSpatFrameSize;
    case MsgType::wsm: return kWsmCommonSize + wsm_payload_size(std::get<Wsm>(m).kind());
    }
    return 0;
}

std::optional<std::string> validate(const Message& m) {
    return std::visit(Validator{}, m);
}

std::vector<std::uint8_t> encode(const Message& m) {
    if (auto why = validate(m)) {
        throw ValidationError(*why);
    }
    return std::visit(Encoder{}, m);
}

std::string_view to_string(DecodeError e) noexcept {
    switch (e) {
    case DecodeError::truncated_header: return "truncated header";
    case DecodeError::bad_magic: return "bad magic";
    case DecodeError::unknown_version: return "unknown version";
    case DecodeError::unknown_msg_type: return "unknown message type";
    case DecodeError::unknown_wsm_kind: return "unknown wsm subkind";
    case DecodeError::truncated_payload: return "truncated payload";
    case DecodeError::trailing_bytes: return "trailing bytes";
    case DecodeError::invalid_field: return "invalid field";
    }
    return "unknown error";
}

DecodeResult decode(std::span<const std::uint8_t> bytes) noexcept {
    if (bytes.size() < kHeaderSize) {
        return {DecodeError::truncated_header, "need at least 4 header bytes"};
    }
    if (bytes[0] != kMagic0 || bytes[1] != kMagic1) {
        return {DecodeError::bad_magic, "frame does not start with 0x56 0x54"};
    }
    if (bytes[2] != kVersion) {
        return {DecodeError::unknown_version, "version " + std::to_string(bytes[2])};
    }

    Reader r(bytes.subspan(kHeaderSize));
    switch (bytes[3]) {
    case static_cast<std::uint8_t>(MsgType::bsm): {
        if (bytes.size() != kBsmFrameSize) {
            return check_length(bytes.size(), kBsmFrameSize);
        }
        Bsm m;
        m.vehicle_id = r.u32();
        m.timestamp_ms = r.u64();
        m.x = r.f64();
        m.y = r.f64();
        m.speed = r.f64();
        m.heading = r.f64();
        return finish(m);
    }
    case static_cast<std::uint8_t>(MsgType::spat): {
        if (bytes.size() != kSpatFrameSize) {
            return check_length(bytes.size(), kSpatFrameSize);
        }
        Spat m;
        m.intersection_id = r.u32();
        m.leader_id = r.u32();
        m.green_mask = r.u8();
        m.time_remaining_ms = r.u32();
        m.timestamp_ms = r.u64();
        return finish(m);
    }
    case static_cast<std::uint8_t>(MsgType::wsm): {
        if (bytes.size() < kHeaderSize + 1) {
            return {DecodeError::truncated_payload, "wsm frame ends before its subkind"};
        }
        const std::uint8_t raw_kind = r.u8();
        if (raw_kind < 1 || raw_kind > 3) {
            return {DecodeError::unknown_wsm_kind, "subkind " + std::to_string(raw_kind)};
        }
        const auto kind = static_cast<WsmKind>(raw_kind);
        const std::size_t want = kWsmCommonSize + wsm_payload_size(kind);
        if (bytes.size() != want) {
            return check_length(bytes.size(), want);
        }
        Wsm m;
        m.intersection_id = r.u32();
        m.sender_id = r.u32();
        switch (kind) {
        case WsmKind::election_claim: m.payload = ElectionClaim{r.f64()}; break;
        case WsmKind::handover_offer: {
            HandoverOffer o;
            o.new_leader_id = r.u32();
            o.green_mask = r.u8();
            m.payload = o;
            break;
        }
        case WsmKind::handover_accept: m.payload = HandoverAccept{r.u32()}; break;
        }
        return finish(m);
    }
    default:
        return {DecodeError::unknown_msg_type, "msg_type " + std::to_string(bytes[3])};
    }
}

}  // namespace vtl::codec
