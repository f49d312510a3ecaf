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

#ifndef OMAPI_TESTS_SUPPORT_HPP
#define OMAPI_TESTS_SUPPORT_HPP

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "omapi/card_profile.hpp"
#include "omapi/modem.hpp"
#include "omapi/phone_service.hpp"
#include "omapi/transport.hpp"
#include "omapi/uicc_terminal.hpp"

namespace omapi::test {

inline const Bytes kDemoAid{0xA0, 0x00, 0x00, 0x01, 0x51, 0x00, 0x00, 0x00};
inline const Bytes kDemoFci{0x6F, 0x0A, 0x84, 0x08, 0xA0, 0x00, 0x00,
                            0x01, 0x51, 0x00, 0x00, 0x00, 0x90, 0x00};

// Mirrors profiles/demo.json.
inline CardProfile make_demo_profile() {
    CardProfile profile;
    profile.atr = {0x3B, 0x00};
    profile.applets.emplace_back(
        kDemoAid, kDemoFci,
        std::vector<ApduHandler>{
            {0x10, std::nullopt, std::nullopt, hex_to_bytes("9000")},
            {0xB0, std::nullopt, std::nullopt,
             hex_to_bytes("00112233445566778899aabbccddeeff9000")},
            {0xD6, std::nullopt, std::nullopt, hex_to_bytes("9000")},
            {0x20, std::nullopt, std::nullopt, hex_to_bytes("aabbcc9000")},
            {0xCA, uint8_t{0x00}, uint8_t{0x00}, hex_to_bytes("cafe9000")}},
        hex_to_bytes("6d00"));
    profile.files.push_back({0x2F00, "3F00", hex_to_bytes("aabb")});
    return profile;
}

// Full stack wired from a profile, with a trace recorder attached.
struct StackFixture {
    explicit StackFixture(const CardProfile& profile, bool legacy = false)
        : modem(profile.build_card()),
          phone(modem),
          terminal(std::make_shared<UiccTerminal>(phone, modem, legacy)) {
        if (legacy) {
            modem.set_legacy_select_response(true);
        }
        modem.set_trace([this](const TraceEvent& event) {
            trace.push_back(event);
        });
        reader = &service.register_terminal(terminal, TerminalKind::kSystem,
                                            profile.ara_aid);
    }

    std::vector<std::string> trace_lines() const {
        std::vector<std::string> lines;
        for (const TraceEvent& event : trace) {
            lines.push_back(trace_request_line(BytesView(event.request_frame)));
            if (event.response_payload) {
                lines.push_back(
                    trace_response_line(BytesView(*event.response_payload)));
            } else {
                lines.push_back(trace_error_line(*event.error));
            }
        }
        return lines;
    }

    Modem modem;
    PhoneService phone;
    std::shared_ptr<UiccTerminal> terminal;
    SeService service;
    Reader* reader = nullptr;
    std::vector<TraceEvent> trace;
};

// Scriptable in-memory terminal for transport-layer tests. Allocates channel
// numbers 1..3, records transmitted APDUs, and answers them from a fixed
// reply (status word 9000 by default).
class RecordingTerminal : public TerminalContract {
public:
    std::string get_name() const override { return name_; }
    bool is_card_present() override { return present_; }
    void internal_connect() override { ++connect_count_; }
    void internal_disconnect() override { ++disconnect_count_; }
    std::optional<Bytes> get_atr() override { return atr_; }

    int internal_open_logical_channel(
        const std::optional<Bytes>& aid) override {
        if (!aid) {
            throw TerminalError(TerminalErrorKind::kUnsupportedOperation,
                                "no-AID open unsupported");
        }
        open_aids_.push_back(*aid);
        if (!rule_blob_ && std::ranges::equal(*aid, kAraAid)) {
            throw TerminalError(TerminalErrorKind::kNoSuchElement,
                                "no rule applet");
        }
        for (int i = 1; i <= 3; ++i) {
            if (!slots_[i]) {
                slots_[i] = true;
                select_response_ = select_response_for_open_;
                return i;
            }
        }
        throw TerminalError(TerminalErrorKind::kMissingResource,
                            "channels exhausted");
    }

    std::optional<Bytes> get_select_response() override {
        return select_response_;
    }

    Bytes internal_transmit(BytesView command) override {
        transmitted_.emplace_back(command.begin(), command.end());
        // The enforcer's rule fetch gets the configured blob.
        if (rule_blob_ && command.size() >= 4 && command[1] == 0xCA &&
            command[2] == 0xFF && command[3] == 0x40) {
            Bytes out = *rule_blob_;
            out.push_back(0x90);
            out.push_back(0x00);
            return out;
        }
        return reply_;
    }

    void internal_close_logical_channel(int channel_number) override {
        if (channel_number < 1 || channel_number > 3 ||
            !slots_[channel_number]) {
            throw TerminalError(TerminalErrorKind::kInvalidParameter,
                                "channel not open");
        }
        slots_[channel_number] = false;
        closed_.push_back(channel_number);
    }

    Bytes sim_io_exchange(int, const std::string&, BytesView) override {
        return hex_to_bytes("6a82");
    }

    StateEventStream& state_changed_events() override { return events_; }

    // Test knobs and records.
    std::string name_ = "SIM1";
    bool present_ = true;
    std::optional<Bytes> rule_blob_;  // set to expose a rule applet
    std::optional<Bytes> atr_ = Bytes{0x3B, 0x00};
    std::optional<Bytes> select_response_for_open_ = Bytes{0x90, 0x00};
    std::optional<Bytes> select_response_;
    Bytes reply_ = {0x90, 0x00};
    bool slots_[4] = {false, false, false, false};
    std::vector<Bytes> open_aids_;
    std::vector<Bytes> transmitted_;
    std::vector<int> closed_;
    int connect_count_ = 0;
    int disconnect_count_ = 0;
    StateEventStream events_;
};

}  // namespace omapi::test

#endif  // OMAPI_TESTS_SUPPORT_HPP
