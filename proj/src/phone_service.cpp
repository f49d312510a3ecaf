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

#include "omapi/phone_service.hpp"

namespace omapi {

namespace {

// lastError mapping for open: ok -> 0, 27 -> 5, 29 -> 3, 30 -> 2, other -> 1.
int open_error_code(RilError error) {
    switch (error) {
        case RilError::kInvalidParameter:
            return kLastErrorInvalidParameter;
        case RilError::kNoSuchElement:
            return kLastErrorNoSuchElement;
        case RilError::kMissingResource:
            return kLastErrorMissingResource;
        default:
            return kLastErrorGeneric;
    }
}

// lastError mapping for close and transmit: ok -> 0, 27 -> 5, other -> 1.
int exchange_error_code(RilError error) {
    return error == RilError::kInvalidParameter ? kLastErrorInvalidParameter
                                                : kLastErrorGeneric;
}

std::string sw_to_hex(int sw1, int sw2) {
    // Four lowercase hex digits, zero padded.
    const uint16_t sw =
        static_cast<uint16_t>(((sw1 & 0xFF) << 8) | (sw2 & 0xFF));
    const Bytes raw{static_cast<uint8_t>(sw >> 8),
                    static_cast<uint8_t>(sw & 0xFF)};
    return bytes_to_hex(BytesView(raw));
}

const std::string kTransmitFailure = "6f00";

}  // namespace

PhoneService::PhoneService(Baseband& baseband) : baseband_(baseband) {}

template <typename F>
auto PhoneService::with_request_lock(F&& op) {
    if (processing_thread_.load() == std::this_thread::get_id()) {
        throw ReentrancyError();
    }
    std::lock_guard<std::mutex> lock(request_mutex_);
    processing_thread_.store(std::this_thread::get_id());
    struct Reset {
        std::atomic<std::thread::id>& flag;
        ~Reset() { flag.store(std::thread::id{}); }
    } reset{processing_thread_};
    return op();
}

int PhoneService::open_icc_logical_channel(const std::string& aid_hex) {
    Bytes aid = hex_to_bytes(std::string_view(aid_hex));
    return with_request_lock([&] {
        ModemResponse response =
            baseband_.submit(BytesView(encode_request(OpenChannelRequest{aid})));

        std::lock_guard<std::mutex> state_lock(state_mutex_);
        if (response.ok()) {
            try {
                OpenChannelResponse open =
                    decode_open_response(BytesView(response.payload()));
                select_response_ = open.select_response;
                last_error_ = kLastErrorSuccess;
                return static_cast<int>(open.channel_id);
            } catch (const CodecError&) {
                select_response_.reset();
                last_error_ = kLastErrorGeneric;
                return 0;
            }
        }
        select_response_.reset();
        last_error_ = open_error_code(response.error());
        return 0;
    });
}

bool PhoneService::close_icc_logical_channel(int channel_id) {
    return with_request_lock([&] {
        ModemResponse response = baseband_.submit(BytesView(encode_request(
            CloseChannelRequest{static_cast<uint32_t>(channel_id)})));

        std::lock_guard<std::mutex> state_lock(state_mutex_);
        if (response.ok()) {
            last_error_ = kLastErrorSuccess;
            return true;
        }
        last_error_ = exchange_error_code(response.error());
        return false;
    });
}

std::string PhoneService::transmit_icc_logical_channel(
    int cla, int ins, int channel_id, int p1, int p2, int len,
    const std::optional<std::string>& data_hex) {
    ExchangeRequest ex;
    ex.channel_id = static_cast<uint32_t>(channel_id);
    ex.cla = static_cast<uint8_t>(cla);
    ex.ins = static_cast<uint8_t>(ins);
    ex.p1 = static_cast<uint8_t>(p1);
    ex.p2 = static_cast<uint8_t>(p2);
    if (len != -1) {
        ex.p3 = static_cast<uint8_t>(len);
    }
    if (data_hex) {
        ex.data = hex_to_bytes(std::string_view(*data_hex));
    }

    return with_request_lock([&] {
        ModemResponse response =
            baseband_.submit(BytesView(encode_request(ex)));

        std::lock_guard<std::mutex> state_lock(state_mutex_);
        if (response.ok() && response.payload().size() >= 2) {
            const Bytes& raw = response.payload();
            IccIoResult result;
            result.sw1 = raw[raw.size() - 2];
            result.sw2 = raw[raw.size() - 1];
            if (raw.size() > 2) {
                result.payload = Bytes(raw.begin(), raw.end() - 2);
            }
            last_error_ = kLastErrorSuccess;

            std::string sw = sw_to_hex(result.sw1, result.sw2);
            if (result.payload) {
                return bytes_to_hex(BytesView(*result.payload)) + sw;
            }
            return sw;
        }
        last_error_ = response.ok() ? kLastErrorGeneric
                                    : exchange_error_code(response.error());
        return kTransmitFailure;
    });
}

std::optional<Bytes> PhoneService::get_atr() {
    return with_request_lock([&]() -> std::optional<Bytes> {
        ModemResponse response =
            baseband_.submit(BytesView(encode_request(GetAtrRequest{})));
        if (!response.ok()) {
            return std::nullopt;
        }
        try {
            return decode_atr_response(BytesView(response.payload()));
        } catch (const CodecError&) {
            return std::nullopt;
        }
    });
}

std::optional<Bytes> PhoneService::get_select_response() const {
    std::lock_guard<std::mutex> lock(state_mutex_);
    return select_response_;
}

int PhoneService::get_last_error() const {
    std::lock_guard<std::mutex> lock(state_mutex_);
    return last_error_;
}

}  // namespace omapi
