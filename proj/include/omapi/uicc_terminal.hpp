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

#ifndef OMAPI_UICC_TERMINAL_HPP
#define OMAPI_UICC_TERMINAL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "omapi/phone_service.hpp"
#include "omapi/terminal.hpp"

namespace omapi {

// Terminal provider for the UICC slot. Maps ISO channel numbers to the
// telephony-level channel identifiers, splits APDUs into the telephony
// argument tuple, and recovers the select response with a GET RESPONSE
// fallback when the baseband does not deliver it in the open response
// (legacy mode).
//
// One instance per card; the transport layer serializes calls.
class UiccTerminal : public TerminalContract {
public:
    UiccTerminal(PhoneService& phone, Baseband& baseband,
                 bool legacy_mode = false);

    std::string get_name() const override;
    bool is_card_present() override;
    std::optional<Bytes> get_atr() override;
    int internal_open_logical_channel(
        const std::optional<Bytes>& aid) override;
    std::optional<Bytes> get_select_response() override;
    Bytes internal_transmit(BytesView command) override;
    void internal_close_logical_channel(int channel_number) override;
    Bytes sim_io_exchange(int file_id, const std::string& path,
                          BytesView cmd) override;
    StateEventStream& state_changed_events() override;

    bool legacy_mode() const { return legacy_mode_; }
    uint32_t channel_id(int channel_number) const {
        return channel_ids_.at(static_cast<size_t>(channel_number));
    }

private:
    [[noreturn]] void throw_last_error(const std::string& context) const;

    PhoneService& phone_;
    Baseband& baseband_;
    // Index is the ISO channel number; entry 0 stays 0 (basic channel),
    // a zero entry in 1..3 marks a free slot.
    std::array<uint32_t, 4> channel_ids_{};
    std::optional<Bytes> select_response_;
    bool legacy_mode_;
    StateEventStream state_events_;
};

}  // namespace omapi

#endif  // OMAPI_UICC_TERMINAL_HPP
