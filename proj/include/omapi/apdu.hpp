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

#ifndef OMAPI_APDU_HPP
#define OMAPI_APDU_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "omapi/hex.hpp"

namespace omapi {

// ISO/IEC 7816-4 interindustry command cases, short form only.
enum class ApduCase {
    kCase1 = 1,  // header only
    kCase2 = 2,  // header + Le
    kCase3 = 3,  // header + Lc + data
    kCase4 = 4,  // header + Lc + data + Le
};

enum class ApduErrorKind {
    kMalformedApdu,
    kExtendedLengthUnsupported,
    kChannelOutOfRange,
};

class ApduError : public std::runtime_error {
public:
    ApduError(ApduErrorKind kind, const std::string& what_arg)
        : std::runtime_error(what_arg), kind_(kind) {}

    ApduErrorKind kind() const { return kind_; }

private:
    ApduErrorKind kind_;
};

// Short command APDU. `le` holds the raw Le byte (0x00 means 256 expected
// bytes); it is never normalized, so serialization is lossless.
struct CommandApdu {
    uint8_t cla = 0;
    uint8_t ins = 0;
    uint8_t p1 = 0;
    uint8_t p2 = 0;
    Bytes data;                  // at most 255 bytes
    std::optional<uint8_t> le;

    ApduCase apdu_case() const;
    Bytes serialize() const;

    bool operator==(const CommandApdu&) const = default;
};

struct ResponseApdu {
    Bytes data;
    uint8_t sw1 = 0;
    uint8_t sw2 = 0;

    uint16_t sw() const { return static_cast<uint16_t>((sw1 << 8) | sw2); }
    Bytes serialize() const;
    static ResponseApdu from_bytes(BytesView raw);  // raw must be >= 2 bytes

    bool operator==(const ResponseApdu&) const = default;
};

// The argument tuple of transmitIccLogicalChannel(): channel bits stripped
// from CLA, length byte and data field split per APDU case.
struct TelephonyArgs {
    uint8_t cla_masked = 0;  // cla & 0xFC
    uint8_t ins = 0;
    int channel_index = 0;   // cla & 0x03
    uint8_t p1 = 0;
    uint8_t p2 = 0;
    int len = -1;            // -1 (case 1) or 0..255
    std::optional<std::string> data_hex;

    bool operator==(const TelephonyArgs&) const = default;
};

// Throws MalformedApdu when the length fits no short case and
// ExtendedLengthUnsupported for frames that can only be extended-length.
CommandApdu parse_command(BytesView raw);

TelephonyArgs to_telephony_args(const CommandApdu& cmd);

// Stamps a logical channel number (0..3) into the low CLA bits.
uint8_t set_cla_channel(uint8_t cla, int channel_number);

inline int cla_channel_index(uint8_t cla) { return cla & 0x03; }

// Success predicate of the telephony stack: true for SW1 0x90, 0x91,
// 0x9E, 0x9F.
bool sw_success(uint8_t sw1);

enum class SwFailureKind {
    kFileTypeMismatch,
    kFileNotFound,
    kGeneric,
};

struct SwFailure {
    SwFailureKind kind;
    uint8_t sw1;
    uint8_t sw2;

    bool operator==(const SwFailure&) const = default;
};

// Precondition: !sw_success(sw1).
SwFailure classify_sw_failure(uint8_t sw1, uint8_t sw2);

// Status words used across the stack.
inline constexpr uint16_t kSwSuccess = 0x9000;
inline constexpr uint16_t kSwFunctionNotSupported = 0x6A81;
inline constexpr uint16_t kSwFileNotFound = 0x6A82;
inline constexpr uint16_t kSwReferencedDataNotFound = 0x6A88;
inline constexpr uint16_t kSwInsNotSupported = 0x6D00;

inline Bytes sw_bytes(uint16_t sw) {
    return Bytes{static_cast<uint8_t>(sw >> 8), static_cast<uint8_t>(sw & 0xFF)};
}

}  // namespace omapi

#endif  // OMAPI_APDU_HPP
