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

#ifndef OMAPI_OEMHOOK_HPP
#define OMAPI_OEMHOOK_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "omapi/hex.hpp"

namespace omapi {

// Proprietary RIL_REQUEST_OEM_HOOK_RAW command codes for UICC access. Every
// frame starts with the two-byte command followed by a big-endian uint16
// carrying the total frame length (command and length fields included).
enum class OemCommandCode : uint16_t {
    kExchangeBasic = 0x1508,
    kOpenChannel = 0x1509,
    kCloseChannel = 0x150A,
    kExchangeLogicalWithP3 = 0x150B,
    kExchangeLogicalCase1 = 0x150C,
    kGetAtr = 0x150D,
};

struct GetAtrRequest {
    bool operator==(const GetAtrRequest&) const = default;
};

struct OpenChannelRequest {
    Bytes aid;

    bool operator==(const OpenChannelRequest&) const = default;
};

struct CloseChannelRequest {
    uint32_t channel_id = 0;

    bool operator==(const CloseChannelRequest&) const = default;
};

// channel_id 0 addresses the basic channel (command 0x1508). For logical
// channels the command code depends on the P3 byte: 0x150B when present,
// 0x150C for case-1 APDUs. A request with p3 absent must carry no data.
struct ExchangeRequest {
    uint32_t channel_id = 0;
    uint8_t cla = 0;
    uint8_t ins = 0;
    uint8_t p1 = 0;
    uint8_t p2 = 0;
    std::optional<uint8_t> p3;
    Bytes data;

    bool operator==(const ExchangeRequest&) const = default;
};

using OemHookRequest =
    std::variant<GetAtrRequest, OpenChannelRequest, CloseChannelRequest,
                 ExchangeRequest>;

enum class CodecErrorKind {
    kUnknownCommandCode,
    kLengthMismatch,
    kTruncatedFrame,
    kZeroChannelId,
    kFrameTooLong,
};

class CodecError : public std::runtime_error {
public:
    CodecError(CodecErrorKind kind, const std::string& what_arg)
        : std::runtime_error(what_arg), kind_(kind) {}

    CodecErrorKind kind() const { return kind_; }

private:
    CodecErrorKind kind_;
};

OemCommandCode command_code(const OemHookRequest& req);

Bytes encode_request(const OemHookRequest& req);
OemHookRequest decode_request(BytesView frame);

// ATR response payload: [atr_len][ignored][atr bytes]. A zero length decodes
// to nullopt. The modem-side encoder emits 0x00 for the ignored byte.
Bytes encode_atr_response(BytesView atr);
std::optional<Bytes> decode_atr_response(BytesView payload);

struct OpenChannelResponse {
    uint32_t channel_id = 0;
    std::optional<Bytes> select_response;

    bool operator==(const OpenChannelResponse&) const = default;
};

// Open-channel response payload: [id_len][id bytes, LSB first][sel_len][sel].
// The encoder emits the minimal id length (1 for ids up to 255); the decoder
// accepts id lengths 1..4.
Bytes encode_open_response(uint32_t channel_id,
                           const std::optional<Bytes>& select_response);
OpenChannelResponse decode_open_response(BytesView payload);

// RIL error codes as emitted by the vendor baseband. GenericFailure keeps
// the stock value 2 and is the catch-all for unmapped codes.
enum class RilError : int {
    kGenericFailure = 2,
    kInvalidParameter = 27,
    kNoSuchElement = 29,
    kMissingResource = 30,
};

RilError map_ril_error(int code);
std::string_view to_string(RilError error);

// Wire-trace line formats: ">> <hex>" request, "<< <hex>" response payload,
// "!! <Name>" error.
std::string trace_request_line(BytesView frame);
std::string trace_response_line(BytesView payload);
std::string trace_error_line(RilError error);

}  // namespace omapi

#endif  // OMAPI_OEMHOOK_HPP
