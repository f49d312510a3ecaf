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

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "omapi/oemhook.hpp"

namespace omapi {
namespace {

#ifndef OMAPI_CLI_PATH
#define OMAPI_CLI_PATH "omapi-cli"
#endif
#ifndef OMAPI_PROFILE_DIR
#define OMAPI_PROFILE_DIR "."
#endif
#ifndef OMAPI_TEST_DATA_DIR
#define OMAPI_TEST_DATA_DIR "."
#endif

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string demo_profile_path() {
    return std::string(OMAPI_PROFILE_DIR) + "/demo.json";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

CliResult run_cli(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    const std::string base =
        ::testing::TempDir() + "cli_run_" + std::to_string(counter++);
    const std::string out_path = base + ".out";
    const std::string err_path = base + ".err";

    const std::string command = env + " " + std::string(OMAPI_CLI_PATH) + " " +
                                args + " >" + out_path + " 2>" + err_path;
    const int status = std::system(command.c_str());

    CliResult result;
    result.exit_code = WEXITSTATUS(status);
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return result;
}

std::string with_profile(const std::string& args) {
    return "--profile " + demo_profile_path() + " " + args;
}

TEST(Cli, ReadersListsTheSystemTerminal) {
    const CliResult result = run_cli(with_profile("readers"));
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_EQ(result.out, "SIM1\tsystem\n");
}

TEST(Cli, AtrPrintsTheProfileAtr) {
    const CliResult result = run_cli(with_profile("atr"));
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_EQ(result.out, "3b00\n");
}

TEST(Cli, OpenPrintsChannelAndSelectResponse) {
    const CliResult result =
        run_cli(with_profile("open --aid a000000151000000"));
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_EQ(result.out,
              "channel: 1\nselect-response: 6f0a8408a0000001510000009000\n");
}

TEST(Cli, UnknownAidFailsWithTheErrorName) {
    const CliResult result = run_cli(with_profile("open --aid deadbeef00"));
    EXPECT_EQ(result.exit_code, 1);
    EXPECT_NE(result.err.find("NoSuchElement"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli(with_profile("open --aid zz")).exit_code, 2);
    EXPECT_EQ(run_cli(with_profile("frobnicate")).exit_code, 2);
    EXPECT_EQ(run_cli(with_profile("")).exit_code, 2);
    EXPECT_EQ(run_cli("readers").exit_code, 2);  // no profile anywhere
    EXPECT_EQ(run_cli("--profile /nonexistent.json readers").exit_code, 2);
    EXPECT_EQ(run_cli(with_profile("transmit --channel 9 --apdu 00a40400"))
                  .exit_code,
              2);
}

TEST(Cli, ProfileComesFromTheEnvironmentWhenUnset) {
    const CliResult result =
        run_cli("readers", "OMAPI_PROFILE=" + demo_profile_path());
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_EQ(result.out, "SIM1\tsystem\n");
}

TEST(Cli, SimStateToggles) {
    EXPECT_EQ(run_cli(with_profile("sim-state")).out, "READY\n");
    EXPECT_EQ(run_cli(with_profile("sim-state --set ABSENT")).out, "ABSENT\n");
    EXPECT_EQ(run_cli(with_profile("sim-state --set BROKEN")).exit_code, 2);
}

TEST(Cli, TransmitOnTheBasicChannel) {
    // Channel 0 needs no prior open; the demo card has no default applet, so
    // the card answers 6a82.
    const CliResult result =
        run_cli(with_profile("transmit --channel 0 --apdu 00ca000002"));
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_EQ(result.out, "6a82\n");
}

TEST(Cli, ScriptReplayIsByteIdentical) {
    const std::string scenario =
        std::string(OMAPI_TEST_DATA_DIR) + "/scenario.txt";
    const std::string args = with_profile("--trace script " + scenario);
    const CliResult first = run_cli(args);
    const CliResult second = run_cli(args);
    EXPECT_EQ(first.exit_code, 0);
    EXPECT_EQ(second.exit_code, 0);
    EXPECT_FALSE(first.out.empty());
    EXPECT_EQ(first.out, second.out);
    EXPECT_EQ(first.err, second.err);
}

TEST(Cli, ScriptStopsOnFirstErrorUnlessKeepGoing) {
    const std::string script_path = ::testing::TempDir() + "failing_script.txt";
    {
        std::ofstream script(script_path);
        script << "open --aid deadbeef00\n";
        script << "sim-state\n";
    }
    const CliResult stopping = run_cli(with_profile("script " + script_path));
    EXPECT_EQ(stopping.exit_code, 1);
    EXPECT_EQ(stopping.out.find("READY"), std::string::npos);

    const CliResult keep_going =
        run_cli(with_profile("script " + script_path + " --keep-going"));
    EXPECT_EQ(keep_going.exit_code, 1);
    EXPECT_NE(keep_going.out.find("READY"), std::string::npos);
    std::remove(script_path.c_str());
}

TEST(Cli, TraceLinesRedecodeWithTheFrameCodec) {
    const std::string scenario =
        std::string(OMAPI_TEST_DATA_DIR) + "/scenario.txt";
    const CliResult result =
        run_cli(with_profile("--trace script " + scenario));
    ASSERT_EQ(result.exit_code, 0);

    std::istringstream lines(result.out);
    std::string line;
    int frames = 0;
    while (std::getline(lines, line)) {
        if (line.rfind(">> ", 0) == 0) {
            const Bytes frame = hex_to_bytes(std::string_view(line).substr(3));
            EXPECT_NO_THROW(decode_request(BytesView(frame)));
            ++frames;
        }
    }
    EXPECT_GT(frames, 10);
}

}  // namespace
}  // namespace omapi
