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

#ifndef OMAPI_PHONE_SERVICE_HPP
#define OMAPI_PHONE_SERVICE_HPP

#include <atomic>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "omapi/modem.hpp"

namespace omapi {

// lastError values reported by the telephony service.
inline constexpr int kLastErrorSuccess = 0;
inline constexpr int kLastErrorGeneric = 1;
inline constexpr int kLastErrorMissingResource = 2;
inline constexpr int kLastErrorNoSuchElement = 3;
inline constexpr int kLastErrorInvalidParameter = 5;

// Raised when a telephony operation is invoked from within the request
// processing context; the original implementation would deadlock there.
class ReentrancyError : public std::logic_error {
public:
    ReentrancyError()
        : std::logic_error(
              "telephony request issued from the request-processing context") {
    }
};

struct IccIoResult {
    int sw1 = 0;
    int sw2 = 0;
    std::optional<Bytes> payload;

    bool success() const { return sw_success(static_cast<uint8_t>(sw1)); }
};

// Blocking telephony-service facade over the baseband: channel management,
// APDU exchange, the select-response cache and lastError bookkeeping.
// Operations may be called from multiple threads and are served in order;
// failures follow the 0-return/false-return plus lastError protocol instead
// of raising.
class PhoneService {
public:
    explicit PhoneService(Baseband& baseband);

    // Returns the channel id (> 0) on success, 0 on failure.
    int open_icc_logical_channel(const std::string& aid_hex);

    bool close_icc_logical_channel(int channel_id);

    // Returns lowercase hex of payload and status word; "6f00" on failure.
    // len is -1 for case-1 APDUs, otherwise the P3 byte value.
    std::string transmit_icc_logical_channel(
        int cla, int ins, int channel_id, int p1, int p2, int len,
        const std::optional<std::string>& data_hex);

    std::optional<Bytes> get_atr();
    std::optional<Bytes> get_select_response() const;
    int get_last_error() const;

private:
    template <typename F>
    auto with_request_lock(F&& op);

    Baseband& baseband_;
    mutable std::mutex state_mutex_;
    std::mutex request_mutex_;
    std::atomic<std::thread::id> processing_thread_{};
    int last_error_ = kLastErrorSuccess;
    std::optional<Bytes> select_response_;
};

}  // namespace omapi

#endif  // OMAPI_PHONE_SERVICE_HPP
