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

#ifndef OMAPI_TRANSPORT_HPP
#define OMAPI_TRANSPORT_HPP

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "omapi/access_control.hpp"
#include "omapi/terminal.hpp"

namespace omapi {

enum class TransportErrorKind {
    kAccessDenied,
    kChannelClosed,
    kSessionClosed,
    kForbiddenApdu,
    kCardAbsent,
};

class TransportError : public std::runtime_error {
public:
    TransportError(TransportErrorKind kind, const std::string& what_arg)
        : std::runtime_error(what_arg), kind_(kind) {}

    TransportErrorKind kind() const { return kind_; }

private:
    TransportErrorKind kind_;
};

std::string_view to_string(TransportErrorKind kind);

enum class TerminalKind {
    kSystem,
    kAddOn,
};

// True for names of the form "SIM n", "eSE n", "SD n" (space optional).
bool is_system_terminal_name(const std::string& name);

class SeService;
class Reader;
class Session;
class Channel;

// APDU channel to an applet. transmit() stamps the channel number into the
// CLA byte and runs the per-APDU access filter before anything reaches the
// terminal.
class Channel {
public:
    Bytes transmit(BytesView apdu);
    void close();  // idempotent

    int channel_number() const { return channel_number_; }
    bool is_basic() const { return channel_number_ == 0; }
    bool is_open() const;
    const std::optional<Bytes>& select_response() const {
        return select_response_;
    }

private:
    friend class Session;
    Channel(Session& session, int channel_number,
            std::optional<Bytes> select_response, std::optional<Bytes> aid);

    Session& session_;
    int channel_number_;
    std::optional<Bytes> select_response_;
    std::optional<Bytes> aid_;
    bool open_ = true;
};

class Session {
public:
    std::shared_ptr<Channel> open_logical_channel(BytesView aid);
    // Minimal basic-channel support: selects by AID over the basic channel
    // when one is given. Experimental.
    std::shared_ptr<Channel> open_basic_channel(
        const std::optional<Bytes>& aid);

    std::optional<Bytes> get_atr();
    void close();  // closes all channels of this session; idempotent
    bool is_open() const { return open_; }
    const ClientIdentity& client() const { return client_; }
    Reader& reader() { return reader_; }

private:
    friend class Reader;
    friend class Channel;
    Session(Reader& reader, ClientIdentity client);

    Reader& reader_;
    ClientIdentity client_;
    std::vector<std::shared_ptr<Channel>> channels_;
    bool open_ = true;
};

// One secure element slot. Wraps a registered terminal and carries the
// per-terminal lock, lifecycle counters and the cached rule database.
class Reader {
public:
    const std::string& name() const { return name_; }
    bool is_system() const { return system_; }
    bool is_present();
    std::shared_ptr<Session> open_session(ClientIdentity client);

    TerminalContract& terminal() { return *terminal_; }

private:
    friend class SeService;
    friend class Session;
    friend class Channel;

    Reader(SeService& service, std::shared_ptr<TerminalContract> terminal,
           bool system, Bytes ara_aid);

    const RuleDatabase& rules();  // loads on first use; caller holds lock_

    SeService& service_;
    std::shared_ptr<TerminalContract> terminal_;
    std::string name_;
    bool system_;
    Bytes ara_aid_;

    std::recursive_mutex lock_;
    int open_sessions_ = 0;
    int open_channels_ = 0;
    bool basic_channel_in_use_ = false;
    std::optional<RuleDatabase> rule_db_;
};

// Entry point of the transport API: manages the secure element slots.
// System terminals are listed before add-on terminals; registration order is
// preserved within each group.
class SeService {
public:
    SeService() = default;

    Reader& register_terminal(std::shared_ptr<TerminalContract> terminal,
                              TerminalKind kind,
                              std::optional<Bytes> ara_aid = std::nullopt);

    std::vector<Reader*> readers();

    // Switches the enforcer default for cards without a rule applet.
    void set_closed_world(bool closed) { closed_world_ = closed; }
    bool closed_world() const { return closed_world_; }

private:
    std::mutex registry_mutex_;
    std::vector<std::unique_ptr<Reader>> readers_;
    bool closed_world_ = false;
};

}  // namespace omapi

#endif  // OMAPI_TRANSPORT_HPP
