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

#include "omapi/modem.hpp"

namespace omapi {

namespace {

RilError card_error_to_ril(const CardError& err) {
    switch (err.kind()) {
        case CardErrorKind::kNoFreeChannel:
            return RilError::kMissingResource;
        case CardErrorKind::kAppletNotFound:
            return RilError::kNoSuchElement;
        case CardErrorKind::kInvalidChannel:
            return RilError::kInvalidParameter;
        case CardErrorKind::kCardAbsent:
            return RilError::kGenericFailure;
    }
    return RilError::kGenericFailure;
}

// Rebuilds the command APDU from the frame fields. The P3/data combination
// determines the case; anything inconsistent is a malformed request.
std::optional<CommandApdu> rebuild_command(const ExchangeRequest& ex) {
    CommandApdu cmd;
    cmd.cla = ex.cla;
    cmd.ins = ex.ins;
    cmd.p1 = ex.p1;
    cmd.p2 = ex.p2;

    if (!ex.p3) {
        if (!ex.data.empty()) {
            return std::nullopt;
        }
        return cmd;  // case 1
    }
    const size_t p3 = *ex.p3;
    if (ex.data.empty()) {
        cmd.le = *ex.p3;  // case 2
        return cmd;
    }
    if (p3 >= 1 && ex.data.size() == p3) {
        cmd.data = ex.data;  // case 3
        return cmd;
    }
    if (p3 >= 1 && ex.data.size() == p3 + 1) {
        cmd.data.assign(ex.data.begin(), ex.data.end() - 1);  // case 4
        cmd.le = ex.data.back();
        return cmd;
    }
    return std::nullopt;
}

}  // namespace

Modem::Modem(VirtualCard card) : card_(std::move(card)) {}

ModemResponse Modem::submit(BytesView frame) {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    return traced(frame, process(frame));
}

ModemResponse Modem::traced(BytesView frame, ModemResponse response) {
    if (trace_) {
        TraceEvent event;
        event.request_frame.assign(frame.begin(), frame.end());
        if (response.ok()) {
            event.response_payload = response.payload();
        } else {
            event.error = response.error();
        }
        trace_(event);
    }
    return response;
}

ModemResponse Modem::process(BytesView frame) {
    OemHookRequest request;
    try {
        request = decode_request(frame);
    } catch (const CodecError&) {
        return ModemResponse::with_error(RilError::kInvalidParameter);
    }

    try {
        if (std::holds_alternative<GetAtrRequest>(request)) {
            return ModemResponse::with_payload(
                encode_atr_response(BytesView(card_.atr())));
        }
        if (const auto* open = std::get_if<OpenChannelRequest>(&request)) {
            OpenChannelResult result =
                card_.open_logical_channel(BytesView(open->aid));
            std::optional<Bytes> select_response;
            if (!legacy_select_response_) {
                select_response = result.select_response;
            }
            return ModemResponse::with_payload(encode_open_response(
                static_cast<uint32_t>(result.channel_number), select_response));
        }
        if (const auto* close = std::get_if<CloseChannelRequest>(&request)) {
            if (close->channel_id > 3) {
                return ModemResponse::with_error(RilError::kInvalidParameter);
            }
            card_.close_logical_channel(static_cast<int>(close->channel_id));
            return ModemResponse::with_payload(Bytes{});
        }
        return process_exchange(std::get<ExchangeRequest>(request));
    } catch (const CardError& err) {
        return ModemResponse::with_error(card_error_to_ril(err));
    } catch (const CodecError&) {
        return ModemResponse::with_error(RilError::kGenericFailure);
    }
}

ModemResponse Modem::process_exchange(const ExchangeRequest& ex) {
    if (ex.channel_id > 3) {
        return ModemResponse::with_error(RilError::kInvalidParameter);
    }
    std::optional<CommandApdu> cmd = rebuild_command(ex);
    if (!cmd) {
        return ModemResponse::with_error(RilError::kInvalidParameter);
    }
    ResponseApdu resp =
        card_.process_apdu(static_cast<int>(ex.channel_id), *cmd);
    return ModemResponse::with_payload(resp.serialize());
}

ModemResponse Modem::submit_sim_io(int file_id, const std::string& path,
                                   BytesView cmd) {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    if (cmd.size() < 4) {
        return ModemResponse::with_error(RilError::kInvalidParameter);
    }
    try {
        return ModemResponse::with_payload(card_.sim_io(file_id, path, cmd));
    } catch (const CardError& err) {
        return ModemResponse::with_error(card_error_to_ril(err));
    }
}

std::string Modem::sim_state() {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    if (sim_state_override_) {
        return *sim_state_override_;
    }
    return card_.present() ? kStateReady : kStateAbsent;
}

void Modem::subscribe_presence(std::function<void(bool)> listener) {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    presence_listeners_.push_back(std::move(listener));
}

void Modem::set_card_present(bool present) {
    std::vector<std::function<void(bool)>> listeners;
    {
        std::lock_guard<std::recursive_mutex> lock(mutex_);
        if (card_.present() == present) {
            return;
        }
        card_.set_present(present);
        listeners = presence_listeners_;
    }
    for (const auto& listener : listeners) {
        listener(present);
    }
}

void Modem::set_sim_state_override(std::optional<std::string> state) {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    sim_state_override_ = std::move(state);
}

void Modem::set_legacy_select_response(bool legacy) {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    legacy_select_response_ = legacy;
}

void Modem::set_trace(std::function<void(const TraceEvent&)> sink) {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    trace_ = std::move(sink);
}

}  // namespace omapi
