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

#ifndef OMAPI_MODEM_HPP
#define OMAPI_MODEM_HPP

#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "omapi/oemhook.hpp"
#include "omapi/vuicc.hpp"

namespace omapi {

// Outcome of one baseband request: a payload byte array or a RIL error code.
class ModemResponse {
public:
    static ModemResponse with_payload(Bytes payload) {
        return ModemResponse(std::move(payload));
    }
    static ModemResponse with_error(RilError error) {
        return ModemResponse(error);
    }

    bool ok() const { return std::holds_alternative<Bytes>(value_); }
    const Bytes& payload() const { return std::get<Bytes>(value_); }
    RilError error() const { return std::get<RilError>(value_); }
    int error_code() const { return static_cast<int>(error()); }

private:
    explicit ModemResponse(Bytes payload) : value_(std::move(payload)) {}
    explicit ModemResponse(RilError error) : value_(error) {}

    std::variant<Bytes, RilError> value_;
};

// One traced request/response pair.
struct TraceEvent {
    Bytes request_frame;
    std::optional<Bytes> response_payload;
    std::optional<RilError> error;
};

// What the telephony layer needs from the baseband. Lets tests substitute a
// scripted endpoint for the full virtual modem.
class Baseband {
public:
    virtual ~Baseband() = default;

    virtual ModemResponse submit(BytesView frame) = 0;
    virtual ModemResponse submit_sim_io(int file_id, const std::string& path,
                                        BytesView cmd) = 0;
    virtual std::string sim_state() = 0;
    virtual void subscribe_presence(std::function<void(bool)> listener) = 0;
};

// Virtual baseband plus RIL daemon. Owns the card, decodes OEM-hook frames,
// and serializes all requests internally (one request at a time). Failures
// never propagate as exceptions; they become RIL error responses.
class Modem : public Baseband {
public:
    explicit Modem(VirtualCard card);

    ModemResponse submit(BytesView frame) override;
    ModemResponse submit_sim_io(int file_id, const std::string& path,
                                BytesView cmd) override;
    std::string sim_state() override;
    void subscribe_presence(std::function<void(bool)> listener) override;

    void set_card_present(bool present);
    // Forces "NOT_READY" (or any state) regardless of card presence.
    void set_sim_state_override(std::optional<std::string> state);
    // When set, open-channel responses omit the select response (selLen 0),
    // mimicking RIL implementations that require a GET RESPONSE round trip.
    void set_legacy_select_response(bool legacy);

    void set_trace(std::function<void(const TraceEvent&)> sink);

    // Direct card access for tests and setup. Not synchronized with submit();
    // do not use concurrently with in-flight requests.
    VirtualCard& card() { return card_; }
    const VirtualCard& card() const { return card_; }

    static constexpr const char* kStateReady = "READY";
    static constexpr const char* kStateAbsent = "ABSENT";
    static constexpr const char* kStateNotReady = "NOT_READY";

private:
    ModemResponse process(BytesView frame);
    ModemResponse process_exchange(const ExchangeRequest& ex);
    ModemResponse traced(BytesView frame, ModemResponse response);

    VirtualCard card_;
    std::recursive_mutex mutex_;
    bool legacy_select_response_ = false;
    std::optional<std::string> sim_state_override_;
    std::function<void(const TraceEvent&)> trace_;
    std::vector<std::function<void(bool)>> presence_listeners_;
};

}  // namespace omapi

#endif  // OMAPI_MODEM_HPP
