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

#include "omapi/apdu.hpp"

namespace omapi {

ApduCase CommandApdu::apdu_case() const {
    if (data.empty()) {
        return le ? ApduCase::kCase2 : ApduCase::kCase1;
    }
    return le ? ApduCase::kCase4 : ApduCase::kCase3;
}

Bytes CommandApdu::serialize() const {
    Bytes out{cla, ins, p1, p2};
    if (!data.empty()) {
        out.push_back(static_cast<uint8_t>(data.size()));
        out.insert(out.end(), data.begin(), data.end());
    }
    if (le) {
        out.push_back(*le);
    }
    return out;
}

Bytes ResponseApdu::serialize() const {
    Bytes out = data;
    out.push_back(sw1);
    out.push_back(sw2);
    return out;
}

ResponseApdu ResponseApdu::from_bytes(BytesView raw) {
    if (raw.size() < 2) {
        throw ApduError(ApduErrorKind::kMalformedApdu,
                        "response APDU shorter than the status word");
    }
    ResponseApdu resp;
    resp.data.assign(raw.begin(), raw.end() - 2);
    resp.sw1 = raw[raw.size() - 2];
    resp.sw2 = raw[raw.size() - 1];
    return resp;
}

CommandApdu parse_command(BytesView raw) {
    if (raw.size() < 4) {
        throw ApduError(ApduErrorKind::kMalformedApdu,
                        "command APDU shorter than the 4-byte header");
    }

    CommandApdu cmd;
    cmd.cla = raw[0];
    cmd.ins = raw[1];
    cmd.p1 = raw[2];
    cmd.p2 = raw[3];

    if (raw.size() == 4) {
        return cmd;  // case 1
    }
    if (raw.size() == 5) {
        cmd.le = raw[4];  // case 2
        return cmd;
    }

    const size_t lc = raw[4];
    if (lc == 0) {
        // A zero P3 with two or more following bytes is only meaningful as an
        // extended-length APDU, which this stack does not map.
        if (raw.size() >= 7) {
            throw ApduError(ApduErrorKind::kExtendedLengthUnsupported,
                            "extended-length APDUs are not supported");
        }
        throw ApduError(ApduErrorKind::kMalformedApdu,
                        "zero Lc with a dangling trailer byte");
    }
    if (raw.size() == 5 + lc) {
        cmd.data.assign(raw.begin() + 5, raw.end());  // case 3
        return cmd;
    }
    if (raw.size() == 6 + lc) {
        cmd.data.assign(raw.begin() + 5, raw.end() - 1);  // case 4
        cmd.le = raw[raw.size() - 1];
        return cmd;
    }
    throw ApduError(ApduErrorKind::kMalformedApdu,
                    "command length fits no short APDU case");
}

TelephonyArgs to_telephony_args(const CommandApdu& cmd) {
    TelephonyArgs args;
    args.cla_masked = static_cast<uint8_t>(cmd.cla & 0xFC);
    args.channel_index = cla_channel_index(cmd.cla);
    args.ins = cmd.ins;
    args.p1 = cmd.p1;
    args.p2 = cmd.p2;

    switch (cmd.apdu_case()) {
        case ApduCase::kCase1:
            args.len = -1;
            break;
        case ApduCase::kCase2:
            args.len = *cmd.le;
            break;
        case ApduCase::kCase3:
            args.len = static_cast<int>(cmd.data.size());
            args.data_hex = bytes_to_hex(BytesView(cmd.data));
            break;
        case ApduCase::kCase4:
            // The data string carries the raw Le byte appended to the data
            // field; len stays the Lc value.
            args.len = static_cast<int>(cmd.data.size());
            args.data_hex = bytes_to_hex(BytesView(cmd.data)) +
                            bytes_to_hex(BytesView(&*cmd.le, 1));
            break;
    }
    return args;
}

uint8_t set_cla_channel(uint8_t cla, int channel_number) {
    if (channel_number < 0 || channel_number > 3) {
        throw ApduError(ApduErrorKind::kChannelOutOfRange,
                        "channel number " + std::to_string(channel_number) +
                            " exceeds the four-channel limit");
    }
    return static_cast<uint8_t>((cla & 0xFC) | channel_number);
}

bool sw_success(uint8_t sw1) {
    return sw1 == 0x90 || sw1 == 0x91 || sw1 == 0x9E || sw1 == 0x9F;
}

SwFailure classify_sw_failure(uint8_t sw1, uint8_t sw2) {
    if (sw1 == 0x94) {
        if (sw2 == 0x08) {
            return {SwFailureKind::kFileTypeMismatch, sw1, sw2};
        }
        return {SwFailureKind::kFileNotFound, sw1, sw2};
    }
    return {SwFailureKind::kGeneric, sw1, sw2};
}

}  // namespace omapi
