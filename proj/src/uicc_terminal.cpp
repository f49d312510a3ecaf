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

#include "omapi/uicc_terminal.hpp"

#include "omapi/apdu.hpp"

namespace omapi {

namespace {

TerminalErrorKind last_error_to_kind(int last_error) {
    switch (last_error) {
        case kLastErrorNoSuchElement:
            return TerminalErrorKind::kNoSuchElement;
        case kLastErrorMissingResource:
            return TerminalErrorKind::kMissingResource;
        case kLastErrorInvalidParameter:
            return TerminalErrorKind::kInvalidParameter;
        default:
            return TerminalErrorKind::kIoError;
    }
}

}  // namespace

std::string_view to_string(TerminalErrorKind kind) {
    switch (kind) {
        case TerminalErrorKind::kNoSuchElement:
            return "NoSuchElement";
        case TerminalErrorKind::kMissingResource:
            return "MissingResource";
        case TerminalErrorKind::kInvalidParameter:
            return "InvalidParameter";
        case TerminalErrorKind::kIoError:
            return "IoError";
        case TerminalErrorKind::kUnsupportedOperation:
            return "UnsupportedOperation";
    }
    return "IoError";
}

UiccTerminal::UiccTerminal(PhoneService& phone, Baseband& baseband,
                           bool legacy_mode)
    : phone_(phone), baseband_(baseband), legacy_mode_(legacy_mode) {
    baseband_.subscribe_presence(
        [this](bool present) { state_events_.emit(present); });
}

std::string UiccTerminal::get_name() const { return "SIM1"; }

bool UiccTerminal::is_card_present() {
    return baseband_.sim_state() == Modem::kStateReady;
}

std::optional<Bytes> UiccTerminal::get_atr() { return phone_.get_atr(); }

void UiccTerminal::throw_last_error(const std::string& context) const {
    const TerminalErrorKind kind = last_error_to_kind(phone_.get_last_error());
    throw TerminalError(kind, context + " failed (lastError " +
                                  std::to_string(phone_.get_last_error()) +
                                  ")");
}

int UiccTerminal::internal_open_logical_channel(
    const std::optional<Bytes>& aid) {
    if (!aid) {
        throw TerminalError(TerminalErrorKind::kUnsupportedOperation,
                            "opening a channel without an AID is unsupported");
    }

    const int channel_id =
        phone_.open_icc_logical_channel(bytes_to_hex(BytesView(*aid)));
    if (channel_id == 0) {
        throw_last_error("open logical channel");
    }

    int slot = 0;
    for (int i = 1; i < static_cast<int>(channel_ids_.size()); ++i) {
        if (channel_ids_[static_cast<size_t>(i)] == 0) {
            slot = i;
            break;
        }
    }
    if (slot == 0) {
        // The card granted a channel but the local table is full; give the
        // channel back before reporting the exhaustion.
        phone_.close_icc_logical_channel(channel_id);
        throw TerminalError(TerminalErrorKind::kMissingResource,
                            "all local channel slots are in use");
    }
    channel_ids_[static_cast<size_t>(slot)] =
        static_cast<uint32_t>(channel_id);

    select_response_ = phone_.get_select_response();
    if (!select_response_ && legacy_mode_) {
        // The baseband did not return the select response with the open;
        // fetch it with GET RESPONSE on the new channel. The reply is cached
        // verbatim: it is data plus status word, exactly what the open path
        // would have delivered.
        const std::string reply = phone_.transmit_icc_logical_channel(
            0x00, 0xC0, channel_id, 0x00, 0x00, 0x00, std::nullopt);
        if (phone_.get_last_error() == kLastErrorSuccess) {
            select_response_ = hex_to_bytes(std::string_view(reply));
        }
    }
    return slot;
}

std::optional<Bytes> UiccTerminal::get_select_response() {
    return select_response_;
}

Bytes UiccTerminal::internal_transmit(BytesView command) {
    CommandApdu cmd;
    try {
        cmd = parse_command(command);
    } catch (const ApduError& err) {
        throw TerminalError(TerminalErrorKind::kInvalidParameter, err.what());
    }

    const TelephonyArgs args = to_telephony_args(cmd);
    if (args.channel_index != 0 &&
        channel_ids_[static_cast<size_t>(args.channel_index)] == 0) {
        throw TerminalError(TerminalErrorKind::kInvalidParameter,
                            "channel index " +
                                std::to_string(args.channel_index) +
                                " is not mapped to an open channel");
    }
    const uint32_t channel_id =
        channel_ids_[static_cast<size_t>(args.channel_index)];

    const std::string response = phone_.transmit_icc_logical_channel(
        args.cla_masked, args.ins, static_cast<int>(channel_id), args.p1,
        args.p2, args.len, args.data_hex);
    if (phone_.get_last_error() != kLastErrorSuccess) {
        throw_last_error("transmit");
    }
    return hex_to_bytes(std::string_view(response));
}

void UiccTerminal::internal_close_logical_channel(int channel_number) {
    if (channel_number < 1 ||
        channel_number >= static_cast<int>(channel_ids_.size()) ||
        channel_ids_[static_cast<size_t>(channel_number)] == 0) {
        throw TerminalError(TerminalErrorKind::kInvalidParameter,
                            "channel " + std::to_string(channel_number) +
                                " is not open");
    }
    const uint32_t channel_id =
        channel_ids_[static_cast<size_t>(channel_number)];
    // The slot is cleared even when the close fails; the card-side state
    // takes precedence over the local table.
    channel_ids_[static_cast<size_t>(channel_number)] = 0;
    phone_.close_icc_logical_channel(static_cast<int>(channel_id));
}

Bytes UiccTerminal::sim_io_exchange(int file_id, const std::string& path,
                                    BytesView cmd) {
    ModemResponse response = baseband_.submit_sim_io(file_id, path, cmd);
    if (response.ok()) {
        return response.payload();
    }
    if (response.error() == RilError::kInvalidParameter) {
        throw TerminalError(TerminalErrorKind::kInvalidParameter,
                            "SIM IO rejected the command");
    }
    throw TerminalError(TerminalErrorKind::kIoError, "SIM IO failed");
}

StateEventStream& UiccTerminal::state_changed_events() {
    return state_events_;
}

}  // namespace omapi
