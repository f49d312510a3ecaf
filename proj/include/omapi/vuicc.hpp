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

#ifndef OMAPI_VUICC_HPP
#define OMAPI_VUICC_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "omapi/apdu.hpp"
#include "omapi/hex.hpp"

namespace omapi {

enum class CardErrorKind {
    kCardAbsent,
    kNoFreeChannel,
    kAppletNotFound,
    kInvalidChannel,
};

class CardError : public std::runtime_error {
public:
    CardError(CardErrorKind kind, const std::string& what_arg)
        : std::runtime_error(what_arg), kind_(kind) {}

    CardErrorKind kind() const { return kind_; }

private:
    CardErrorKind kind_;
};

// A single scripted APDU handler. p1/p2 are wildcards when absent; the reply
// already carries its status word.
struct ApduHandler {
    uint8_t ins = 0;
    std::optional<uint8_t> p1;
    std::optional<uint8_t> p2;
    Bytes reply;

    bool matches(const CommandApdu& cmd) const;

    bool operator==(const ApduHandler&) const = default;
};

// Deterministic stand-in for an on-card applet: a fixed select response and
// an ordered handler list consulted first-match-wins.
class AppletScript {
public:
    AppletScript(Bytes aid, Bytes select_response,
                 std::vector<ApduHandler> handlers, Bytes default_reply);

    const Bytes& aid() const { return aid_; }
    const Bytes& select_response() const { return select_response_; }
    const std::vector<ApduHandler>& handlers() const { return handlers_; }
    const Bytes& default_reply() const { return default_reply_; }

    const Bytes& reply_for(const CommandApdu& cmd) const;

    bool operator==(const AppletScript&) const = default;

private:
    Bytes aid_;
    Bytes select_response_;
    std::vector<ApduHandler> handlers_;
    Bytes default_reply_;
};

struct ChannelSlot {
    bool in_use = false;
    std::optional<Bytes> selected_aid;
    std::optional<Bytes> cached_select_response;
};

struct OpenChannelResult {
    int channel_number = 0;  // 1..3
    Bytes select_response;
};

// Simulated UICC: applet registry, four-slot channel table (slot 0 is the
// basic channel), per-channel select-response cache and a minimal file store.
// Callers must serialize access; the modem provides that serialization.
class VirtualCard {
public:
    VirtualCard() = default;

    void set_atr(Bytes atr);
    void add_applet(AppletScript applet);
    void add_file(uint16_t file_id, const std::string& path, Bytes content);

    const Bytes& atr() const { return atr_; }
    bool present() const { return present_; }
    void set_present(bool present);
    void reset();

    OpenChannelResult open_logical_channel(BytesView aid);
    void close_logical_channel(int channel_number);
    ResponseApdu process_apdu(int channel_number, const CommandApdu& cmd);
    Bytes sim_io(int file_id, const std::string& path, BytesView cmd);

    const ChannelSlot& channel_slot(int channel_number) const;
    int open_logical_channel_count() const;
    const AppletScript* find_applet(BytesView aid) const;

private:
    static constexpr int kChannelCount = 4;

    Bytes atr_{0x3B, 0x00};
    bool present_ = true;
    std::vector<AppletScript> applets_;
    std::array<ChannelSlot, kChannelCount> channels_{
        ChannelSlot{true, std::nullopt, std::nullopt}, ChannelSlot{},
        ChannelSlot{}, ChannelSlot{}};
    std::map<std::pair<uint16_t, std::string>, Bytes> files_;
};

}  // namespace omapi

#endif  // OMAPI_VUICC_HPP
