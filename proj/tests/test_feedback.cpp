#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hexris/control.hpp"
#include "hexris/feedback.hpp"

namespace {

using namespace hexris;

Frame make_frame(std::uint32_t seq, std::uint8_t kind, std::uint8_t flags) {
    return {static_cast<std::uint8_t>(seq >> 24), static_cast<std::uint8_t>(seq >> 16),
            static_cast<std::uint8_t>(seq >> 8),  static_cast<std::uint8_t>(seq),
            kind,                                 flags};
}

TEST(WireFormat, KnownByteSequences) {
    EXPECT_EQ(encode(FeedbackMsg{0, false}), make_frame(0, 0x02, 0x00));
    EXPECT_EQ(encode(FeedbackMsg{1, true}), make_frame(1, 0x02, 0x01));
    EXPECT_EQ(encode(TrialMsg{0x01020304}), make_frame(0x01020304, 0x01, 0x00));

    const DecodedMsg msg = decode(make_frame(0x0000002A, 0x02, 0x01));
    EXPECT_EQ(msg.kind, kKindFeedback);
    EXPECT_EQ(msg.seq, 42u);
    EXPECT_TRUE(msg.degraded);
}

TEST(WireFormat, RoundTripsAMillionFrames) {
    std::mt19937_64 rng(123);
    std::uniform_int_distribution<std::uint32_t> seq_of;
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < 1000000; ++i) {
        const std::uint32_t seq = seq_of(rng);
        if (coin(rng)) {
            const DecodedMsg msg = decode(encode(TrialMsg{seq}));
            ASSERT_EQ(msg.kind, kKindTrialApplied);
            ASSERT_EQ(msg.seq, seq);
        } else {
            const bool degraded = coin(rng);
            const DecodedMsg msg = decode(encode(FeedbackMsg{seq, degraded}));
            ASSERT_EQ(msg.kind, kKindFeedback);
            ASSERT_EQ(msg.seq, seq);
            ASSERT_EQ(msg.degraded, degraded);
        }
    }
}

TEST(WireFormat, TotalOverKindAndFlagBytes) {
    for (int kind = 0; kind <= 255; ++kind) {
        for (int flags = 0; flags <= 255; ++flags) {
            const Frame frame = make_frame(7, static_cast<std::uint8_t>(kind),
                                           static_cast<std::uint8_t>(flags));
            const bool valid_trial = kind == 0x01 && flags == 0x00;
            const bool valid_feedback = kind == 0x02 && flags <= 0x01;
            if (valid_trial || valid_feedback) {
                const DecodedMsg msg = decode(frame);
                EXPECT_EQ(msg.seq, 7u);
                EXPECT_EQ(msg.kind, kind);
                if (valid_feedback) EXPECT_EQ(msg.degraded, flags == 0x01);
            } else {
                EXPECT_THROW(decode(frame), protocol_error);
            }
        }
    }
}

TEST(WireFormat, RejectsWrongLengths) {
    const Frame frame = encode(TrialMsg{1});
    EXPECT_THROW(decode(frame.data(), 0), protocol_error);
    EXPECT_THROW(decode(frame.data(), 5), protocol_error);
    EXPECT_THROW(decode(frame.data(), 7), protocol_error);
    EXPECT_NO_THROW(decode(frame.data(), 6));
}

TEST(InProcessLink, FifoBothDirections) {
    InProcessLink link;
    link.ctrl_send(encode(TrialMsg{1}));
    link.ctrl_send(encode(TrialMsg{2}));
    link.ue_send(encode(FeedbackMsg{1, false}));

    Frame frame;
    ASSERT_TRUE(link.ue_recv(frame, 0));
    EXPECT_EQ(decode(frame).seq, 1u);
    ASSERT_TRUE(link.ue_recv(frame, 0));
    EXPECT_EQ(decode(frame).seq, 2u);
    EXPECT_FALSE(link.ue_recv(frame, 1000));

    ASSERT_TRUE(link.ctrl_recv(frame, 0));
    EXPECT_EQ(decode(frame).kind, kKindFeedback);
    EXPECT_FALSE(link.ctrl_recv(frame, 0));
}

TEST(InProcessLink, TranscriptRecordsDeliveredFramesOnly) {
    InProcessLink link;
    std::vector<TranscriptEntry> log;
    link.transcript = &log;
    link.drop_ctrl_to_ue = 1.0;
    link.ctrl_send(encode(TrialMsg{1}));
    EXPECT_TRUE(log.empty());

    link.drop_ctrl_to_ue = 0.0;
    link.ctrl_send(encode(TrialMsg{2}));
    link.ue_send(encode(FeedbackMsg{2, true}));
    ASSERT_EQ(log.size(), 2u);
    EXPECT_EQ(log[0].direction, TranscriptEntry::Direction::ctrl_to_ue);
    EXPECT_EQ(log[1].direction, TranscriptEntry::Direction::ue_to_ctrl);

    Frame frame;
    ASSERT_TRUE(link.ue_recv(frame, 0));
    EXPECT_EQ(decode(frame).seq, 2u);
    EXPECT_FALSE(link.ue_recv(frame, 0));
}

TEST(InProcessLink, SeededLossIsReproducible) {
    const auto run = [](std::uint64_t seed) {
        InProcessLink link;
        link.drop_ctrl_to_ue = 0.5;
        link.seed_injection(seed);
        for (std::uint32_t i = 1; i <= 100; ++i) link.ctrl_send(encode(TrialMsg{i}));
        std::vector<std::uint32_t> got;
        Frame frame;
        while (link.ue_recv(frame, 0)) got.push_back(decode(frame).seq);
        return got;
    };
    const auto a = run(42);
    const auto b = run(42);
    const auto c = run(43);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    EXPECT_GT(a.size(), 20u);
    EXPECT_LT(a.size(), 80u);
}

TEST(UdpLink, DeliversBothDirections) {
    UdpLink link;
    EXPECT_NE(link.ue_port(), 0);

    Frame frame;
    link.ctrl_send(encode(TrialMsg{9}));
    ASSERT_TRUE(link.ue_recv(frame, 1000));
    EXPECT_EQ(decode(frame).seq, 9u);
    EXPECT_EQ(decode(frame).kind, kKindTrialApplied);

    link.ue_send(encode(FeedbackMsg{9, true}));
    ASSERT_TRUE(link.ctrl_recv(frame, 1000));
    EXPECT_TRUE(decode(frame).degraded);

    link.delay_ms = 2;
    link.ctrl_send(encode(TrialMsg{10}));
    ASSERT_TRUE(link.ue_recv(frame, 1000));
    EXPECT_EQ(decode(frame).seq, 10u);
}

TEST(UdpLink, RecvTimesOutWhenNothingArrives) {
    UdpLink link;
    Frame frame;
    const auto t0 = std::chrono::steady_clock::now();
    EXPECT_FALSE(link.ue_recv(frame, 50));
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    EXPECT_GE(elapsed, 40);
    EXPECT_FALSE(link.ctrl_recv(frame, 0));
}

TEST(UdpLink, DiscardsForeignDatagrams) {
    UdpLink link;
    const int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
    ASSERT_GE(fd, 0);
    sockaddr_in to{};
    to.sin_family = AF_INET;
    to.sin_port = htons(link.ue_port());
    ASSERT_EQ(::inet_pton(AF_INET, "127.0.0.1", &to.sin_addr), 1);

    const char small[3] = {1, 2, 3};
    const char big[10] = {};
    ASSERT_EQ(::sendto(fd, small, sizeof(small), 0, reinterpret_cast<sockaddr*>(&to), sizeof(to)),
              static_cast<ssize_t>(sizeof(small)));
    ASSERT_EQ(::sendto(fd, big, sizeof(big), 0, reinterpret_cast<sockaddr*>(&to), sizeof(to)),
              static_cast<ssize_t>(sizeof(big)));
    link.ctrl_send(encode(TrialMsg{77}));

    Frame frame;
    ASSERT_TRUE(link.ue_recv(frame, 1000));
    EXPECT_EQ(decode(frame).seq, 77u);
    ::close(fd);
}

struct SessionWorld {
    Scenario scenario;
    RisLayout layout = build_hex_layout(1, 8.7e-3, 6.6e-3, 6.6e-3);
    ReflectionAlphabet alphabet = active_alphabet();

    SessionWorld() {
        scenario.frequency_hz = 23.8e9;
        scenario.bs_position_a = {1.5, -1.09, 0.0};
        scenario.ue_position_b = {1.0, 0.5, 0.0};
        scenario.bs_power_dbm = 10.0;
        scenario.noise_power_dbm = -90.0;
        scenario.bs_gain_db = 19.0;
        scenario.ue_gain_db = 3.2;
    }

    PowerFn oracle() const {
        return [this](const ReflectionConfig& c) {
            return received_power_dbm(
                scenario, channel_coefficient(scenario, layout, c, alphabet, isotropic_pattern()));
        };
    }
};

TEST(Transports, InProcessAndUdpSessionsAgree) {
    const SessionWorld world;
    const GroupSchedule schedule = single_element_schedule(7);
    ControllerParams params;
    params.pts_dbm = kPosInfDbm;
    params.max_iterations = 30;
    params.mode = TerminationMode::fixed_budget;
    params.timeout_ms = 2000;

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        std::mt19937_64 rng(seed);
        const ReflectionConfig initial = random_config(7, world.alphabet, rng);

        InProcessLink inproc;
        const AdaptationReport a =
            iterative_adapt(initial, world.oracle(), schedule, 2, params, inproc);

        UdpLink udp;
        const AdaptationReport b =
            iterative_adapt(initial, world.oracle(), schedule, 2, params, udp);

        ASSERT_EQ(a.trials.size(), b.trials.size());
        for (std::size_t i = 0; i < a.trials.size(); ++i) {
            EXPECT_EQ(a.trials[i].iteration, b.trials[i].iteration);
            EXPECT_EQ(a.trials[i].group_set, b.trials[i].group_set);
            EXPECT_EQ(a.trials[i].subgroup, b.trials[i].subgroup);
            EXPECT_EQ(a.trials[i].trial_power_dbm, b.trials[i].trial_power_dbm);
            EXPECT_EQ(a.trials[i].accepted, b.trials[i].accepted);
        }
        EXPECT_TRUE(a.final_config == b.final_config);
        EXPECT_EQ(a.final_power_dbm, b.final_power_dbm);
        EXPECT_EQ(a.iterations_used, b.iterations_used);
    }
}

TEST(Transports, TotalLossAbortsWithStateIntact) {
    const SessionWorld world;
    const GroupSchedule schedule = single_element_schedule(7);
    const ReflectionConfig initial = uniform_config(7, 2);

    for (const bool lose_feedback : {true, false}) {
        InProcessLink link;
        if (lose_feedback)
            link.drop_ue_to_ctrl = 1.0;
        else
            link.drop_ctrl_to_ue = 1.0;

        ControllerEndpoint ctrl(initial, &schedule, 2);
        UeEndpoint ue(world.oracle(), world.oracle()(initial));
        AirInterface air{initial};
        ControllerParams params;
        params.pts_dbm = kPosInfDbm;
        params.max_iterations = 5;
        params.timeout_ms = 10;

        EXPECT_THROW(run_session(link, ctrl, ue, air, params), transport_error);
        EXPECT_TRUE(ctrl.accepted_config() == initial);
        EXPECT_TRUE(air.applied == initial);
    }
}

TEST(Transports, ControllerSkipsStaleAndMalformedFrames) {
    const SessionWorld world;
    const GroupSchedule schedule = single_element_schedule(7);
    const ReflectionConfig initial = uniform_config(7, 2);
    const PowerFn oracle = world.oracle();

    InProcessLink link;
    ControllerEndpoint ctrl(initial, &schedule, 2);
    UeEndpoint ue(oracle, oracle(initial));
    AirInterface air{initial};

    ctrl.apply_next_trial(air, link);
    // Stale, malformed, and wrong-kind frames queued ahead of the real reply.
    link.ue_send(encode(FeedbackMsg{0, true}));
    link.ue_send(Frame{0, 0, 0, 1, 0x02, 0xFF});
    link.ue_send(encode(TrialMsg{1}));
    ASSERT_TRUE(ue.pump(link, air, 0));

    // Turning on element 1 beats the all-off noise floor: not degraded.
    EXPECT_FALSE(ctrl.await_feedback(link, 10));
}

TEST(Transports, UeIgnoresDuplicateTrialAnnouncements) {
    const SessionWorld world;
    const GroupSchedule schedule = single_element_schedule(7);
    const ReflectionConfig initial = uniform_config(7, 2);
    const PowerFn oracle = world.oracle();

    InProcessLink link;
    ControllerEndpoint ctrl(initial, &schedule, 2);
    UeEndpoint ue(oracle, oracle(initial));
    AirInterface air{initial};

    ctrl.apply_next_trial(air, link);
    link.ctrl_send(encode(TrialMsg{1}));  // duplicate of the same announcement

    EXPECT_TRUE(ue.pump(link, air, 0));
    EXPECT_FALSE(ue.pump(link, air, 0));  // duplicate consumed, no second reply

    Frame frame;
    ASSERT_TRUE(link.ctrl_recv(frame, 0));
    EXPECT_EQ(decode(frame).seq, 1u);
    EXPECT_FALSE(link.ctrl_recv(frame, 0));
}

TEST(Transports, FeedbackTimeoutMessageNamesTrial) {
    const SessionWorld world;
    const GroupSchedule schedule = single_element_schedule(7);
    const ReflectionConfig initial = uniform_config(7, 2);

    InProcessLink link;
    link.drop_ue_to_ctrl = 1.0;
    ControllerEndpoint ctrl(initial, &schedule, 2);
    UeEndpoint ue(world.oracle(), world.oracle()(initial));
    AirInterface air{initial};
    ControllerParams params;
    params.pts_dbm = kPosInfDbm;
    params.max_iterations = 3;
    params.timeout_ms = 10;

    try {
        run_session(link, ctrl, ue, air, params);
        FAIL() << "expected transport_error";
    } catch (const transport_error& e) {
        EXPECT_NE(std::string(e.what()).find("trial 1"), std::string::npos);
    }
}

}  // namespace
