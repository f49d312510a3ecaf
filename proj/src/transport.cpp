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

#include "omapi/transport.hpp"

#include <algorithm>
#include <regex>

#include "omapi/apdu.hpp"

namespace omapi {

namespace {

constexpr uint8_t kInsManageChannel = 0x70;
constexpr uint8_t kInsSelect = 0xA4;
constexpr uint8_t kP1SelectByAid = 0x04;

}  // namespace

std::string_view to_string(TransportErrorKind kind) {
    switch (kind) {
        case TransportErrorKind::kAccessDenied:
            return "AccessDenied";
        case TransportErrorKind::kChannelClosed:
            return "ChannelClosed";
        case TransportErrorKind::kSessionClosed:
            return "SessionClosed";
        case TransportErrorKind::kForbiddenApdu:
            return "ForbiddenApdu";
        case TransportErrorKind::kCardAbsent:
            return "CardAbsent";
    }
    return "CardAbsent";
}

bool is_system_terminal_name(const std::string& name) {
    static const std::regex kPattern("(SIM|eSE|SD) ?[0-9]+");
    return std::regex_match(name, kPattern);
}

// ---- Channel ----

Channel::Channel(Session& session, int channel_number,
                 std::optional<Bytes> select_response, std::optional<Bytes> aid)
    : session_(session),
      channel_number_(channel_number),
      select_response_(std::move(select_response)),
      aid_(std::move(aid)) {}

bool Channel::is_open() const { return open_; }

Bytes Channel::transmit(BytesView apdu) {
    Reader& reader = session_.reader_;
    std::lock_guard<std::recursive_mutex> lock(reader.lock_);

    if (!open_) {
        throw TransportError(TransportErrorKind::kChannelClosed,
                             "transmit on a closed channel");
    }

    CommandApdu cmd = parse_command(apdu);
    if (cmd.ins == kInsManageChannel) {
        throw TransportError(TransportErrorKind::kForbiddenApdu,
                             "MANAGE CHANNEL is reserved for the service");
    }
    if (cmd.ins == kInsSelect && cmd.p1 == kP1SelectByAid) {
        throw TransportError(TransportErrorKind::kForbiddenApdu,
                             "SELECT by AID is reserved for the service");
    }

    // The filter sees the header as the client sent it; channel coding is a
    // transport detail.
    const std::array<uint8_t, 4> header{cmd.cla, cmd.ins, cmd.p1, cmd.p2};
    if (decide_apdu(reader.rules(), session_.client_, aid_,
                    std::span<const uint8_t, 4>(header),
                    !reader.service_.closed_world()) == Decision::kDeny) {
        throw TransportError(TransportErrorKind::kAccessDenied,
                             "APDU blocked by access rule");
    }

    Bytes wire(apdu.begin(), apdu.end());
    wire[0] = set_cla_channel(wire[0], channel_number_);
    return reader.terminal_->internal_transmit(BytesView(wire));
}

void Channel::close() {
    Reader& reader = session_.reader_;
    std::lock_guard<std::recursive_mutex> lock(reader.lock_);
    if (!open_) {
        return;
    }
    open_ = false;

    if (is_basic()) {
        reader.basic_channel_in_use_ = false;
    } else {
        try {
            reader.terminal_->internal_close_logical_channel(channel_number_);
        } catch (const TerminalError&) {
            // The channel is gone either way.
        }
    }

    if (--reader.open_channels_ == 0) {
        reader.terminal_->internal_disconnect();
    }
}

// ---- Session ----

Session::Session(Reader& reader, ClientIdentity client)
    : reader_(reader), client_(std::move(client)) {}

std::shared_ptr<Channel> Session::open_logical_channel(BytesView aid) {
    std::lock_guard<std::recursive_mutex> lock(reader_.lock_);
    if (!open_) {
        throw TransportError(TransportErrorKind::kSessionClosed,
                             "session is closed");
    }

    std::optional<Bytes> aid_copy = Bytes(aid.begin(), aid.end());
    if (decide_channel_open(reader_.rules(), client_, aid_copy,
                            !reader_.service_.closed_world()) ==
        Decision::kDeny) {
        throw TransportError(TransportErrorKind::kAccessDenied,
                             "channel open blocked by access rule");
    }

    const int channel_number =
        reader_.terminal_->internal_open_logical_channel(aid_copy);
    std::optional<Bytes> select_response =
        reader_.terminal_->get_select_response();

    auto channel = std::shared_ptr<Channel>(new Channel(
        *this, channel_number, std::move(select_response), std::move(aid_copy)));
    channels_.push_back(channel);
    ++reader_.open_channels_;
    return channel;
}

std::shared_ptr<Channel> Session::open_basic_channel(
    const std::optional<Bytes>& aid) {
    std::lock_guard<std::recursive_mutex> lock(reader_.lock_);
    if (!open_) {
        throw TransportError(TransportErrorKind::kSessionClosed,
                             "session is closed");
    }

    if (decide_channel_open(reader_.rules(), client_, aid,
                            !reader_.service_.closed_world()) ==
        Decision::kDeny) {
        throw TransportError(TransportErrorKind::kAccessDenied,
                             "basic channel blocked by access rule");
    }
    if (reader_.basic_channel_in_use_) {
        throw TerminalError(TerminalErrorKind::kMissingResource,
                            "basic channel already in use");
    }

    std::optional<Bytes> select_response;
    if (aid) {
        if (aid->size() < 5 || aid->size() > 16) {
            throw TerminalError(TerminalErrorKind::kInvalidParameter,
                                "AID must be 5..16 bytes");
        }
        Bytes select{0x00, kInsSelect, kP1SelectByAid, 0x00,
                     static_cast<uint8_t>(aid->size())};
        select.insert(select.end(), aid->begin(), aid->end());
        const Bytes response =
            reader_.terminal_->internal_transmit(BytesView(select));
        if (response.size() < 2) {
            throw TerminalError(TerminalErrorKind::kIoError,
                                "short SELECT response");
        }
        const uint16_t sw = static_cast<uint16_t>(
            (response[response.size() - 2] << 8) | response.back());
        if (sw == kSwFileNotFound) {
            throw TerminalError(TerminalErrorKind::kNoSuchElement,
                                "applet not found on basic channel");
        }
        if (!sw_success(response[response.size() - 2])) {
            throw TerminalError(TerminalErrorKind::kIoError,
                                "SELECT failed on basic channel");
        }
        select_response = response;
    }

    reader_.basic_channel_in_use_ = true;
    auto channel = std::shared_ptr<Channel>(
        new Channel(*this, 0, std::move(select_response), aid));
    channels_.push_back(channel);
    ++reader_.open_channels_;
    return channel;
}

std::optional<Bytes> Session::get_atr() {
    std::lock_guard<std::recursive_mutex> lock(reader_.lock_);
    return reader_.terminal_->get_atr();
}

void Session::close() {
    std::lock_guard<std::recursive_mutex> lock(reader_.lock_);
    if (!open_) {
        return;
    }
    open_ = false;
    for (const auto& channel : channels_) {
        channel->close();
    }
    --reader_.open_sessions_;
}

// ---- Reader ----

Reader::Reader(SeService& service, std::shared_ptr<TerminalContract> terminal,
               bool system, Bytes ara_aid)
    : service_(service),
      terminal_(std::move(terminal)),
      name_(terminal_->get_name()),
      system_(system),
      ara_aid_(std::move(ara_aid)) {}

bool Reader::is_present() { return terminal_->is_card_present(); }

const RuleDatabase& Reader::rules() {
    if (!rule_db_) {
        rule_db_ = load_rules(*terminal_, BytesView(ara_aid_));
    }
    return *rule_db_;
}

std::shared_ptr<Session> Reader::open_session(ClientIdentity client) {
    std::lock_guard<std::recursive_mutex> lock(lock_);
    if (!terminal_->is_card_present()) {
        throw TransportError(TransportErrorKind::kCardAbsent,
                             "no card present in " + name_);
    }
    if (open_sessions_ == 0) {
        terminal_->internal_connect();
    }
    try {
        rules();
    } catch (...) {
        if (open_sessions_ == 0) {
            terminal_->internal_disconnect();
        }
        throw;
    }
    ++open_sessions_;
    return std::shared_ptr<Session>(new Session(*this, std::move(client)));
}

// ---- SeService ----

Reader& SeService::register_terminal(std::shared_ptr<TerminalContract> terminal,
                                     TerminalKind kind,
                                     std::optional<Bytes> ara_aid) {
    std::lock_guard<std::mutex> lock(registry_mutex_);
    const std::string name = terminal->get_name();
    const bool system_name = is_system_terminal_name(name);
    if (kind == TerminalKind::kSystem && !system_name) {
        throw std::invalid_argument("system terminal name '" + name +
                                    "' must match 'SIM n', 'eSE n' or 'SD n'");
    }
    if (kind == TerminalKind::kAddOn && system_name) {
        throw std::invalid_argument("add-on terminal must not claim the "
                                    "system terminal name '" +
                                    name + "'");
    }

    auto reader = std::unique_ptr<Reader>(
        new Reader(*this, std::move(terminal), kind == TerminalKind::kSystem,
                   ara_aid.value_or(kAraAid)));
    Reader& ref = *reader;

    if (kind == TerminalKind::kSystem) {
        auto first_addon = std::find_if(
            readers_.begin(), readers_.end(),
            [](const std::unique_ptr<Reader>& r) { return !r->is_system(); });
        readers_.insert(first_addon, std::move(reader));
    } else {
        readers_.push_back(std::move(reader));
    }
    return ref;
}

std::vector<Reader*> SeService::readers() {
    std::lock_guard<std::mutex> lock(registry_mutex_);
    std::vector<Reader*> out;
    out.reserve(readers_.size());
    for (const auto& reader : readers_) {
        out.push_back(reader.get());
    }
    return out;
}

}  // namespace omapi
