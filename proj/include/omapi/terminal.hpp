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

#ifndef OMAPI_TERMINAL_HPP
#define OMAPI_TERMINAL_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "omapi/hex.hpp"

namespace omapi {

enum class TerminalErrorKind {
    kNoSuchElement,
    kMissingResource,
    kInvalidParameter,
    kIoError,
    kUnsupportedOperation,
};

class TerminalError : public std::runtime_error {
public:
    TerminalError(TerminalErrorKind kind, const std::string& what_arg)
        : std::runtime_error(what_arg), kind_(kind) {}

    TerminalErrorKind kind() const { return kind_; }

private:
    TerminalErrorKind kind_;
};

std::string_view to_string(TerminalErrorKind kind);

// Secure-element state change notifications (present/absent transitions).
class StateEventStream {
public:
    using Listener = std::function<void(bool present)>;

    void subscribe(Listener listener) {
        listeners_.push_back(std::move(listener));
    }

    void emit(bool present) {
        for (const auto& listener : listeners_) {
            listener(present);
        }
    }

private:
    std::vector<Listener> listeners_;
};

// Provider interface between the transport layer and a concrete secure
// element. Covers both provider-interface generations: the channel and
// transmit methods of the compiled-in terminal era plus the SIM-IO exchange
// and state-change surface of the service-interface era.
class TerminalContract {
public:
    virtual ~TerminalContract() = default;

    virtual std::string get_name() const = 0;
    virtual bool is_card_present() = 0;

    // Lifecycle notifications; connection setup/teardown hooks.
    virtual void internal_connect() {}
    virtual void internal_disconnect() {}

    virtual std::optional<Bytes> get_atr() = 0;

    // Opens a logical channel selecting the given applet; returns the ISO
    // channel number (1..3). Opening without an AID is unsupported here.
    virtual int internal_open_logical_channel(
        const std::optional<Bytes>& aid) = 0;
    virtual std::optional<Bytes> get_select_response() = 0;
    virtual Bytes internal_transmit(BytesView command) = 0;
    virtual void internal_close_logical_channel(int channel_number) = 0;

    virtual Bytes sim_io_exchange(int file_id, const std::string& path,
                                  BytesView cmd) = 0;
    virtual StateEventStream& state_changed_events() = 0;
};

}  // namespace omapi

#endif  // OMAPI_TERMINAL_HPP
