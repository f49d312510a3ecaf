/*
 * Copyright (C) 2026 The omapi-stack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "omapi/oemhook.hpp"

#include <limits>

namespace omapi {

namespace {

constexpr size_t kFrameHeaderSize = 4;  // command (2) + length (2)
constexpr size_t kMaxFrameSize = 0xFFFF;

void put_u16(Bytes& out, uint16_t value) {
    out.push_back(static_cast<uint8_t>(value >> 8));
    out.push_back(static_cast<uint8_t>(value & 0xFF));
}

void put_u32(Bytes& out, uint32_t value) {
    out.push_back(static_cast<uint8_t>(value >> 24));
    out.push_back(static_cast<uint8_t>((value >> 16) & 0xFF));
    out.push_back(static_cast<uint8_t>((value >> 8) & 0xFF));
    out.push_back(static_cast<uint8_t>(value & 0xFF));
}

uint32_t get_u32(BytesView in, size_t offset) {
    return (static_cast<uint32_t>(in[offset]) << 24) |
           (static_cast<uint32_t>(in[offset + 1]) << 16) |
           (static_cast<uint32_t>(in[offset + 2]) << 8) |
           static_cast<uint32_t>(in[offset + 3]);
}

Bytes make_frame(OemCommandCode code, size_t total_length) {
    if (total_length > kMaxFrameSize) {
        throw CodecError(CodecErrorKind::kFrameTooLong,
                         "frame length " + std::to_string(total_length) +
                             " exceeds the 16-bit length field");
    }
    Bytes out;
    out.reserve(total_length);
    put_u16(out, static_cast<uint16_t>(code));
    put_u16(out, static_cast<uint16_t>(total_length));
    return out;
}

[[noreturn]] void throw_length_mismatch(const std::string& what_arg) {
    throw CodecError(CodecErrorKind::kLengthMismatch, what_arg);
}

}  // namespace

OemCommandCode command_code(const OemHookRequest& req) {
    struct Visitor {
        OemCommandCode operator()(const GetAtrRequest&) const {
            return OemCommandCode::kGetAtr;
        }
        OemCommandCode operator()(const OpenChannelRequest&) const {
            return OemCommandCode::kOpenChannel;
        }
        OemCommandCode operator()(const CloseChannelRequest&) const {
            return OemCommandCode::kCloseChannel;
        }
        OemCommandCode operator()(const ExchangeRequest& ex) const {
            if (ex.channel_id == 0) {
                return OemCommandCode::kExchangeBasic;
            }
            return ex.p3 ? OemCommandCode::kExchangeLogicalWithP3
                         : OemCommandCode::kExchangeLogicalCase1;
        }
    };
    return std::visit(Visitor{}, req);
}

Bytes encode_request(const OemHookRequest& req) {
    if (const auto* atr = std::get_if<GetAtrRequest>(&req)) {
        (void)atr;
        return make_frame(OemCommandCode::kGetAtr, 4);
    }
    if (const auto* open = std::get_if<OpenChannelRequest>(&req)) {
        Bytes out = make_frame(OemCommandCode::kOpenChannel, 4 + open->aid.size());
        out.insert(out.end(), open->aid.begin(), open->aid.end());
        return out;
    }
    if (const auto* close = std::get_if<CloseChannelRequest>(&req)) {
        Bytes out = make_frame(OemCommandCode::kCloseChannel, 8);
        put_u32(out, close->channel_id);
        return out;
    }

    const auto& ex = std::get<ExchangeRequest>(req);
    if (!ex.p3 && !ex.data.empty()) {
        // Without a P3 byte the decoder would read the first data byte as P3.
        throw std::invalid_argument(
            "exchange request with data requires a P3 byte");
    }

    const OemCommandCode code = command_code(req);
    size_t total = kFrameHeaderSize + 4;  // header + CLA INS P1 P2
    if (ex.p3) {
        total += 1 + ex.data.size();
    }
    if (ex.channel_id != 0) {
        total += 4;
    }

    Bytes out = make_frame(code, total);
    out.push_back(ex.cla);
    out.push_back(ex.ins);
    out.push_back(ex.p1);
    out.push_back(ex.p2);
    if (ex.p3) {
        out.push_back(*ex.p3);
    }
    if (ex.channel_id != 0) {
        put_u32(out, ex.channel_id);
    }
    out.insert(out.end(), ex.data.begin(), ex.data.end());
    return out;
}

OemHookRequest decode_request(BytesView frame) {
    if (frame.size() < kFrameHeaderSize) {
        throw CodecError(CodecErrorKind::kTruncatedFrame,
                         "frame shorter than the 4-byte header");
    }
    const uint16_t raw_code = static_cast<uint16_t>((frame[0] << 8) | frame[1]);
    const size_t declared = static_cast<size_t>((frame[2] << 8) | frame[3]);
    if (declared != frame.size()) {
        throw_length_mismatch("declared length " + std::to_string(declared) +
                              " does not match frame size " +
                              std::to_string(frame.size()));
    }

    switch (raw_code) {
        case static_cast<uint16_t>(OemCommandCode::kGetAtr): {
            if (frame.size() != 4) {
                throw_length_mismatch("get-ATR frame must be 4 bytes");
            }
            return GetAtrRequest{};
        }
        case static_cast<uint16_t>(OemCommandCode::kOpenChannel): {
            OpenChannelRequest open;
            open.aid.assign(frame.begin() + 4, frame.end());
            return open;
        }
        case static_cast<uint16_t>(OemCommandCode::kCloseChannel): {
            if (frame.size() != 8) {
                throw_length_mismatch(
                    "close-channel frame must be 8 bytes, got " +
                    std::to_string(frame.size()));
            }
            return CloseChannelRequest{get_u32(frame, 4)};
        }
        case static_cast<uint16_t>(OemCommandCode::kExchangeBasic): {
            if (frame.size() < 8) {
                throw_length_mismatch(
                    "basic-channel exchange frame must be at least 8 bytes");
            }
            ExchangeRequest ex;
            ex.channel_id = 0;
            ex.cla = frame[4];
            ex.ins = frame[5];
            ex.p1 = frame[6];
            ex.p2 = frame[7];
            if (frame.size() > 8) {
                ex.p3 = frame[8];
                ex.data.assign(frame.begin() + 9, frame.end());
            }
            return ex;
        }
        case static_cast<uint16_t>(OemCommandCode::kExchangeLogicalWithP3): {
            if (frame.size() < 13) {
                throw_length_mismatch(
                    "logical-channel exchange frame must be at least 13 bytes");
            }
            ExchangeRequest ex;
            ex.cla = frame[4];
            ex.ins = frame[5];
            ex.p1 = frame[6];
            ex.p2 = frame[7];
            ex.p3 = frame[8];
            ex.channel_id = get_u32(frame, 9);
            ex.data.assign(frame.begin() + 13, frame.end());
            return ex;
        }
        case static_cast<uint16_t>(OemCommandCode::kExchangeLogicalCase1): {
            if (frame.size() != 12) {
                throw_length_mismatch(
                    "case-1 logical exchange frame must be 12 bytes");
            }
            ExchangeRequest ex;
            ex.cla = frame[4];
            ex.ins = frame[5];
            ex.p1 = frame[6];
            ex.p2 = frame[7];
            ex.channel_id = get_u32(frame, 8);
            return ex;
        }
        default:
            throw CodecError(CodecErrorKind::kUnknownCommandCode,
                             "unknown command code");
    }
}

Bytes encode_atr_response(BytesView atr) {
    if (atr.size() > 0xFF) {
        throw CodecError(CodecErrorKind::kFrameTooLong,
                         "ATR longer than the single-byte length field");
    }
    Bytes out;
    out.reserve(2 + atr.size());
    out.push_back(static_cast<uint8_t>(atr.size()));
    out.push_back(0x00);
    out.insert(out.end(), atr.begin(), atr.end());
    return out;
}

std::optional<Bytes> decode_atr_response(BytesView payload) {
    if (payload.size() < 2) {
        throw CodecError(CodecErrorKind::kTruncatedFrame,
                         "ATR response shorter than its fixed prefix");
    }
    const size_t atr_len = payload[0];
    if (atr_len == 0) {
        return std::nullopt;
    }
    if (payload.size() < 2 + atr_len) {
        throw CodecError(CodecErrorKind::kTruncatedFrame,
                         "ATR response truncated");
    }
    return Bytes(payload.begin() + 2, payload.begin() + 2 + atr_len);
}

Bytes encode_open_response(uint32_t channel_id,
                           const std::optional<Bytes>& select_response) {
    int id_len = 1;
    while (id_len < 4 && (channel_id >> (8 * id_len)) != 0) {
        ++id_len;
    }
    const size_t sel_len = select_response ? select_response->size() : 0;
    if (sel_len > 0xFF) {
        throw CodecError(CodecErrorKind::kFrameTooLong,
                         "select response longer than 255 bytes");
    }

    Bytes out;
    out.reserve(2 + id_len + sel_len);
    out.push_back(static_cast<uint8_t>(id_len));
    for (int i = 0; i < id_len; ++i) {
        out.push_back(static_cast<uint8_t>((channel_id >> (8 * i)) & 0xFF));
    }
    out.push_back(static_cast<uint8_t>(sel_len));
    if (select_response) {
        out.insert(out.end(), select_response->begin(), select_response->end());
    }
    return out;
}

OpenChannelResponse decode_open_response(BytesView payload) {
    if (payload.empty()) {
        throw CodecError(CodecErrorKind::kTruncatedFrame,
                         "empty open-channel response");
    }
    const size_t id_len = payload[0];
    if (id_len == 0) {
        throw CodecError(CodecErrorKind::kZeroChannelId,
                         "zero-length channel id");
    }
    if (id_len > 4) {
        throw_length_mismatch("channel id length " + std::to_string(id_len) +
                              " exceeds 4 bytes");
    }
    if (payload.size() < id_len + 2) {
        throw CodecError(CodecErrorKind::kTruncatedFrame,
                         "open-channel response truncated before id");
    }

    // The id field is little-endian: byte 1 is the least significant.
    uint32_t channel_id = 0;
    for (size_t i = id_len; i >= 1; --i) {
        channel_id <<= 8;
        channel_id |= payload[i];
    }
    if (channel_id == 0) {
        throw CodecError(CodecErrorKind::kZeroChannelId, "channel id is zero");
    }

    const size_t sel_len = payload[id_len + 1];
    if (payload.size() < id_len + 2 + sel_len) {
        throw CodecError(CodecErrorKind::kTruncatedFrame,
                         "open-channel response truncated in select response");
    }

    OpenChannelResponse resp;
    resp.channel_id = channel_id;
    if (sel_len > 0) {
        resp.select_response = Bytes(payload.begin() + id_len + 2,
                                     payload.begin() + id_len + 2 + sel_len);
    }
    return resp;
}

RilError map_ril_error(int code) {
    switch (code) {
        case 27:
            return RilError::kInvalidParameter;
        case 29:
            return RilError::kNoSuchElement;
        case 30:
            return RilError::kMissingResource;
        default:
            return RilError::kGenericFailure;
    }
}

std::string_view to_string(RilError error) {
    switch (error) {
        case RilError::kInvalidParameter:
            return "InvalidParameter";
        case RilError::kNoSuchElement:
            return "NoSuchElement";
        case RilError::kMissingResource:
            return "MissingResource";
        case RilError::kGenericFailure:
            return "GenericFailure";
    }
    return "GenericFailure";
}

std::string trace_request_line(BytesView frame) {
    return ">> " + bytes_to_hex(frame);
}

std::string trace_response_line(BytesView payload) {
    return "<< " + bytes_to_hex(payload);
}

std::string trace_error_line(RilError error) {
    return "!! " + std::string(to_string(error));
}

}  // namespace omapi
