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

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

#include "support.hpp"

namespace omapi {
namespace {

using test::kDemoAid;
using test::kDemoFci;

VirtualCard make_card() { return test::make_demo_profile().build_card(); }

CommandApdu apdu(const std::string& hex) {
    return parse_command(hex_to_bytes(std::string_view(hex)));
}

void expect_card_error(CardErrorKind kind, const std::function<void()>& fn) {
    try {
        fn();
        FAIL() << "expected CardError";
    } catch (const CardError& err) {
        EXPECT_EQ(err.kind(), kind);
    }
}

TEST(OpenLogicalChannel, AllocatesLowestFreeSlot) {
    VirtualCard card = make_card();
    EXPECT_EQ(card.open_logical_channel(BytesView(kDemoAid)).channel_number, 1);
    EXPECT_EQ(card.open_logical_channel(BytesView(kDemoAid)).channel_number, 2);
    EXPECT_EQ(card.open_logical_channel(BytesView(kDemoAid)).channel_number, 3);

    card.close_logical_channel(2);
    EXPECT_EQ(card.open_logical_channel(BytesView(kDemoAid)).channel_number, 2);
}

TEST(OpenLogicalChannel, FourthOpenExhaustsChannels) {
    VirtualCard card = make_card();
    for (int i = 0; i < 3; ++i) {
        card.open_logical_channel(BytesView(kDemoAid));
    }
    expect_card_error(CardErrorKind::kNoFreeChannel, [&] {
        card.open_logical_channel(BytesView(kDemoAid));
    });
}

TEST(OpenLogicalChannel, UnknownAidAndAbsentCard) {
    VirtualCard card = make_card();
    const Bytes unknown = hex_to_bytes("deadbeef00");
    expect_card_error(CardErrorKind::kAppletNotFound,
                      [&] { card.open_logical_channel(BytesView(unknown)); });

    card.set_present(false);
    expect_card_error(CardErrorKind::kCardAbsent,
                      [&] { card.open_logical_channel(BytesView(kDemoAid)); });
}

TEST(OpenLogicalChannel, ReturnsAndCachesSelectResponse) {
    VirtualCard card = make_card();
    const OpenChannelResult result =
        card.open_logical_channel(BytesView(kDemoAid));
    EXPECT_EQ(result.select_response, kDemoFci);
    EXPECT_EQ(card.channel_slot(1).cached_select_response,
              std::optional<Bytes>(kDemoFci));
    EXPECT_EQ(card.channel_slot(1).selected_aid, std::optional<Bytes>(kDemoAid));
}

TEST(CloseLogicalChannel, Errors) {
    VirtualCard card = make_card();
    expect_card_error(CardErrorKind::kInvalidChannel,
                      [&] { card.close_logical_channel(0); });
    expect_card_error(CardErrorKind::kInvalidChannel,
                      [&] { card.close_logical_channel(2); });
    expect_card_error(CardErrorKind::kInvalidChannel,
                      [&] { card.close_logical_channel(4); });

    card.open_logical_channel(BytesView(kDemoAid));
    card.close_logical_channel(1);
    EXPECT_FALSE(card.channel_slot(1).in_use);
    EXPECT_FALSE(card.channel_slot(1).cached_select_response.has_value());
}

TEST(ChannelTable, MatchesLowestFreeSlotOracle) {
    std::mt19937 rng(41);
    VirtualCard card = make_card();
    std::set<int> model;  // open logical slots

    for (int step = 0; step < 2000; ++step) {
        if (rng() % 2 == 0) {
            int expected = 0;
            for (int i = 1; i <= 3; ++i) {
                if (!model.count(i)) {
                    expected = i;
                    break;
                }
            }
            if (expected == 0) {
                expect_card_error(CardErrorKind::kNoFreeChannel, [&] {
                    card.open_logical_channel(BytesView(kDemoAid));
                });
            } else {
                EXPECT_EQ(
                    card.open_logical_channel(BytesView(kDemoAid)).channel_number,
                    expected);
                model.insert(expected);
            }
        } else {
            const int victim = 1 + static_cast<int>(rng() % 3);
            if (model.count(victim)) {
                card.close_logical_channel(victim);
                model.erase(victim);
            } else {
                expect_card_error(CardErrorKind::kInvalidChannel,
                                  [&] { card.close_logical_channel(victim); });
            }
        }
        ASSERT_LE(card.open_logical_channel_count(), 3);
        for (int i = 1; i <= 3; ++i) {
            EXPECT_EQ(card.channel_slot(i).in_use, model.count(i) == 1);
        }
    }
}

TEST(ProcessApdu, GetResponseServesTheCache) {
    VirtualCard card;
    const Bytes fci = hex_to_bytes("6f07840501020304059000");
    card.add_applet(AppletScript(hex_to_bytes("0102030405"), fci, {},
                                 hex_to_bytes("6d00")));
    const int channel =
        card.open_logical_channel(hex_to_bytes("0102030405")).channel_number;

    const ResponseApdu cached = card.process_apdu(channel, apdu("00c0000000"));
    EXPECT_EQ(cached.serialize(), fci);
}

TEST(ProcessApdu, GetResponseMissAnswers6A88) {
    VirtualCard card = make_card();
    const ResponseApdu miss = card.process_apdu(0, apdu("00c0000000"));
    EXPECT_EQ(miss.sw(), kSwReferencedDataNotFound);
}

TEST(ProcessApdu, ScriptedHandlerDispatch) {
    VirtualCard card = make_card();
    const int channel =
        card.open_logical_channel(BytesView(kDemoAid)).channel_number;

    EXPECT_EQ(card.process_apdu(channel, apdu("00ca000002")).serialize(),
              hex_to_bytes("cafe9000"));
    // p1/p2-sensitive handler does not fire for other parameters; the
    // wildcard-free list falls through to the default reply.
    EXPECT_EQ(card.process_apdu(channel, apdu("00ca010002")).sw(),
              kSwInsNotSupported);
    // Wildcard handler matches any p1/p2.
    EXPECT_EQ(card.process_apdu(channel, apdu("00b0123405")).serialize(),
              hex_to_bytes("00112233445566778899aabbccddeeff9000"));
    // Determinism: the same command yields the same reply.
    EXPECT_EQ(card.process_apdu(channel, apdu("00ca000002")).serialize(),
              card.process_apdu(channel, apdu("00ca000002")).serialize());
}

TEST(ProcessApdu, ManageChannelIsRefused) {
    VirtualCard card = make_card();
    EXPECT_EQ(card.process_apdu(0, apdu("00700000")).sw(),
              kSwFunctionNotSupported);
}

TEST(ProcessApdu, BasicChannelWithoutSelectionAnswers6A82) {
    VirtualCard card = make_card();
    EXPECT_EQ(card.process_apdu(0, apdu("00ca000002")).sw(), kSwFileNotFound);
}

TEST(ProcessApdu, SelectByAidOnAnyChannel) {
    VirtualCard card = make_card();
    const ResponseApdu selected =
        card.process_apdu(0, apdu("00a4040008a000000151000000"));
    EXPECT_EQ(selected.serialize(), kDemoFci);
    EXPECT_EQ(card.channel_slot(0).selected_aid, std::optional<Bytes>(kDemoAid));
    // The applet now answers on the basic channel.
    EXPECT_EQ(card.process_apdu(0, apdu("00ca000002")).serialize(),
              hex_to_bytes("cafe9000"));
    // Unknown AID.
    EXPECT_EQ(card.process_apdu(0, apdu("00a4040005deadbeef00")).sw(),
              kSwFileNotFound);
}

TEST(ProcessApdu, ChannelErrors) {
    VirtualCard card = make_card();
    expect_card_error(CardErrorKind::kInvalidChannel,
                      [&] { card.process_apdu(1, apdu("00ca000002")); });
    expect_card_error(CardErrorKind::kInvalidChannel,
                      [&] { card.process_apdu(4, apdu("00ca000002")); });
    card.set_present(false);
    expect_card_error(CardErrorKind::kCardAbsent,
                      [&] { card.process_apdu(0, apdu("00ca000002")); });
}

TEST(SimIo, FileStore) {
    VirtualCard card = make_card();
    EXPECT_EQ(card.sim_io(0x2F00, "3F00", hex_to_bytes("00b00000")),
              hex_to_bytes("aabb9000"));
    EXPECT_EQ(card.sim_io(0x2F05, "3F00", hex_to_bytes("00b00000")),
              hex_to_bytes("6a82"));
    // Only READ BINARY style access is honored.
    EXPECT_EQ(card.sim_io(0x2F00, "3F00", hex_to_bytes("00a40000")),
              hex_to_bytes("6a81"));
    card.set_present(false);
    expect_card_error(CardErrorKind::kCardAbsent, [&] {
        card.sim_io(0x2F00, "3F00", hex_to_bytes("00b00000"));
    });
}

TEST(CardLifecycle, AtrIsStaticAcrossReset) {
    VirtualCard card = make_card();
    const Bytes before = card.atr();
    EXPECT_EQ(before, hex_to_bytes("3b00"));
    card.open_logical_channel(BytesView(kDemoAid));
    card.reset();
    EXPECT_EQ(card.atr(), before);
    EXPECT_EQ(card.open_logical_channel_count(), 0);
}

TEST(CardLifecycle, RemovalResetsChannels) {
    VirtualCard card = make_card();
    card.open_logical_channel(BytesView(kDemoAid));
    card.set_present(false);
    EXPECT_FALSE(card.present());
    EXPECT_FALSE(card.channel_slot(0).in_use);
    card.set_present(true);
    EXPECT_TRUE(card.channel_slot(0).in_use);
    EXPECT_EQ(card.open_logical_channel_count(), 0);
    // Fresh card accepts opens again, from slot 1.
    EXPECT_EQ(card.open_logical_channel(BytesView(kDemoAid)).channel_number, 1);
}

TEST(AppletScriptValidation, RejectsBadScripts) {
    const Bytes good_fci = hex_to_bytes("9000");
    EXPECT_THROW(AppletScript(hex_to_bytes("0102"), good_fci, {},
                              hex_to_bytes("6d00")),
                 std::invalid_argument);
    EXPECT_THROW(AppletScript(hex_to_bytes("0102030405"),
                              hex_to_bytes("6a82"), {}, hex_to_bytes("6d00")),
                 std::invalid_argument);
    EXPECT_THROW(AppletScript(hex_to_bytes("0102030405"), good_fci,
                              {ApduHandler{0x10, {}, {}, hex_to_bytes("90")}},
                              hex_to_bytes("6d00")),
                 std::invalid_argument);
    EXPECT_THROW(AppletScript(hex_to_bytes("0102030405"), good_fci, {},
                              hex_to_bytes("00")),
                 std::invalid_argument);
}

TEST(CardSetup, RejectsDuplicateAidsAndLongAtr) {
    VirtualCard card;
    card.add_applet(AppletScript(hex_to_bytes("0102030405"),
                                 hex_to_bytes("9000"), {},
                                 hex_to_bytes("6d00")));
    EXPECT_THROW(card.add_applet(AppletScript(hex_to_bytes("0102030405"),
                                              hex_to_bytes("9000"), {},
                                              hex_to_bytes("6d00"))),
                 std::invalid_argument);
    EXPECT_THROW(card.set_atr(Bytes(256, 0x3B)), std::invalid_argument);
}

}  // namespace
}  // namespace omapi
