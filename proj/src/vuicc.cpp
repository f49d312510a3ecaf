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

#include "omapi/vuicc.hpp"

#include <algorithm>

namespace omapi {

namespace {

constexpr uint8_t kInsSelect = 0xA4;
constexpr uint8_t kInsGetResponse = 0xC0;
constexpr uint8_t kInsManageChannel = 0x70;
constexpr uint8_t kP1SelectByAid = 0x04;

ResponseApdu response_from_reply(const Bytes& reply) {
    return ResponseApdu::from_bytes(BytesView(reply));
}

ResponseApdu status_only(uint16_t sw) {
    ResponseApdu resp;
    resp.sw1 = static_cast<uint8_t>(sw >> 8);
    resp.sw2 = static_cast<uint8_t>(sw & 0xFF);
    return resp;
}

}  // namespace

bool ApduHandler::matches(const CommandApdu& cmd) const {
    if (cmd.ins != ins) {
        return false;
    }
    if (p1 && *p1 != cmd.p1) {
        return false;
    }
    if (p2 && *p2 != cmd.p2) {
        return false;
    }
    return true;
}

AppletScript::AppletScript(Bytes aid, Bytes select_response,
                           std::vector<ApduHandler> handlers,
                           Bytes default_reply)
    : aid_(std::move(aid)),
      select_response_(std::move(select_response)),
      handlers_(std::move(handlers)),
      default_reply_(std::move(default_reply)) {
    if (aid_.size() < 5 || aid_.size() > 16) {
        throw std::invalid_argument("applet AID must be 5..16 bytes");
    }
    if (select_response_.size() < 2 ||
        !sw_success(select_response_[select_response_.size() - 2])) {
        throw std::invalid_argument(
            "applet select response must end in a success status word");
    }
    for (const auto& handler : handlers_) {
        if (handler.reply.size() < 2) {
            throw std::invalid_argument(
                "applet handler reply shorter than a status word");
        }
    }
    if (default_reply_.size() < 2) {
        throw std::invalid_argument(
            "applet default reply shorter than a status word");
    }
}

const Bytes& AppletScript::reply_for(const CommandApdu& cmd) const {
    for (const auto& handler : handlers_) {
        if (handler.matches(cmd)) {
            return handler.reply;
        }
    }
    return default_reply_;
}

void VirtualCard::set_atr(Bytes atr) {
    if (atr.size() > 0xFF) {
        throw std::invalid_argument("ATR longer than 255 bytes");
    }
    atr_ = std::move(atr);
}

void VirtualCard::add_applet(AppletScript applet) {
    if (find_applet(BytesView(applet.aid())) != nullptr) {
        throw std::invalid_argument("duplicate applet AID " +
                                    bytes_to_hex(BytesView(applet.aid())));
    }
    applets_.push_back(std::move(applet));
}

void VirtualCard::add_file(uint16_t file_id, const std::string& path,
                           Bytes content) {
    files_[{file_id, path}] = std::move(content);
}

void VirtualCard::set_present(bool present) {
    if (present_ == present) {
        return;
    }
    if (!present) {
        reset();
    }
    present_ = present;
    channels_[0].in_use = present;
}

void VirtualCard::reset() {
    for (auto& slot : channels_) {
        slot.selected_aid.reset();
        slot.cached_select_response.reset();
    }
    for (int i = 1; i < kChannelCount; ++i) {
        channels_[i].in_use = false;
    }
}

const AppletScript* VirtualCard::find_applet(BytesView aid) const {
    auto it = std::find_if(applets_.begin(), applets_.end(),
                           [&](const AppletScript& a) {
                               return std::ranges::equal(a.aid(), aid);
                           });
    return it == applets_.end() ? nullptr : &*it;
}

OpenChannelResult VirtualCard::open_logical_channel(BytesView aid) {
    if (!present_) {
        throw CardError(CardErrorKind::kCardAbsent, "card is absent");
    }

    int slot_number = 0;
    for (int i = 1; i < kChannelCount; ++i) {
        if (!channels_[i].in_use) {
            slot_number = i;
            break;
        }
    }
    if (slot_number == 0) {
        throw CardError(CardErrorKind::kNoFreeChannel,
                        "all logical channels are in use");
    }

    const AppletScript* applet = find_applet(aid);
    if (applet == nullptr) {
        throw CardError(CardErrorKind::kAppletNotFound,
                        "no applet with AID " + bytes_to_hex(aid));
    }

    ChannelSlot& slot = channels_[slot_number];
    slot.in_use = true;
    slot.selected_aid = Bytes(aid.begin(), aid.end());
    slot.cached_select_response = applet->select_response();
    return {slot_number, applet->select_response()};
}

void VirtualCard::close_logical_channel(int channel_number) {
    if (channel_number < 1 || channel_number >= kChannelCount ||
        !channels_[channel_number].in_use) {
        throw CardError(CardErrorKind::kInvalidChannel,
                        "channel " + std::to_string(channel_number) +
                            " is not an open logical channel");
    }
    channels_[channel_number] = ChannelSlot{};
}

ResponseApdu VirtualCard::process_apdu(int channel_number,
                                       const CommandApdu& cmd) {
    if (!present_) {
        throw CardError(CardErrorKind::kCardAbsent, "card is absent");
    }
    if (channel_number < 0 || channel_number >= kChannelCount ||
        !channels_[channel_number].in_use) {
        throw CardError(CardErrorKind::kInvalidChannel,
                        "channel " + std::to_string(channel_number) +
                            " is not open");
    }
    ChannelSlot& slot = channels_[channel_number];

    if (cmd.cla == 0x00 && cmd.ins == kInsGetResponse && cmd.p1 == 0x00 &&
        cmd.p2 == 0x00) {
        if (slot.cached_select_response) {
            return response_from_reply(*slot.cached_select_response);
        }
        return status_only(kSwReferencedDataNotFound);
    }

    // Channel management happens through the modem-level open/close commands
    // only.
    if (cmd.ins == kInsManageChannel) {
        return status_only(kSwFunctionNotSupported);
    }

    if (cmd.ins == kInsSelect && cmd.p1 == kP1SelectByAid) {
        const AppletScript* applet = find_applet(BytesView(cmd.data));
        if (applet == nullptr) {
            return status_only(kSwFileNotFound);
        }
        slot.selected_aid = cmd.data;
        slot.cached_select_response = applet->select_response();
        return response_from_reply(applet->select_response());
    }

    if (!slot.selected_aid) {
        return status_only(kSwFileNotFound);
    }
    const AppletScript* applet = find_applet(BytesView(*slot.selected_aid));
    if (applet == nullptr) {
        return status_only(kSwFileNotFound);
    }
    return response_from_reply(applet->reply_for(cmd));
}

Bytes VirtualCard::sim_io(int file_id, const std::string& path, BytesView cmd) {
    if (!present_) {
        throw CardError(CardErrorKind::kCardAbsent, "card is absent");
    }
    // Only READ BINARY style access is honored.
    if (cmd.size() < 2 || cmd[1] != 0xB0) {
        return sw_bytes(kSwFunctionNotSupported);
    }
    auto it = files_.find({static_cast<uint16_t>(file_id), path});
    if (it == files_.end()) {
        return sw_bytes(kSwFileNotFound);
    }
    Bytes out = it->second;
    const Bytes sw = sw_bytes(kSwSuccess);
    out.insert(out.end(), sw.begin(), sw.end());
    return out;
}

const ChannelSlot& VirtualCard::channel_slot(int channel_number) const {
    return channels_.at(static_cast<size_t>(channel_number));
}

int VirtualCard::open_logical_channel_count() const {
    int count = 0;
    for (int i = 1; i < kChannelCount; ++i) {
        count += channels_[i].in_use ? 1 : 0;
    }
    return count;
}

}  // namespace omapi
