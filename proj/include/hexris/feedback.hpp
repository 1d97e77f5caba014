#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <deque>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hexris {

struct protocol_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct transport_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Wire format, both directions: 6 bytes, big-endian 32-bit sequence number,
// kind byte, flags byte. Only feedback frames carry a payload bit (flags
// bit 0, the "degraded" comparison); all other flag bits are reserved zero.
using Frame = std::array<std::uint8_t, 6>;

inline constexpr std::uint8_t kKindTrialApplied = 0x01;
inline constexpr std::uint8_t kKindFeedback = 0x02;

struct TrialMsg {
    std::uint32_t seq = 0;
};

struct FeedbackMsg {
    std::uint32_t seq = 0;
    bool degraded = false;
};

inline Frame encode(const TrialMsg& msg) {
    return {static_cast<std::uint8_t>(msg.seq >> 24), static_cast<std::uint8_t>(msg.seq >> 16),
            static_cast<std::uint8_t>(msg.seq >> 8),  static_cast<std::uint8_t>(msg.seq),
            kKindTrialApplied,                        0x00};
}

inline Frame encode(const FeedbackMsg& msg) {
    return {static_cast<std::uint8_t>(msg.seq >> 24), static_cast<std::uint8_t>(msg.seq >> 16),
            static_cast<std::uint8_t>(msg.seq >> 8),  static_cast<std::uint8_t>(msg.seq),
            kKindFeedback,                            static_cast<std::uint8_t>(msg.degraded ? 0x01 : 0x00)};
}

struct DecodedMsg {
    std::uint8_t kind = 0;
    std::uint32_t seq = 0;
    bool degraded = false;  // meaningful for feedback frames only
};

inline DecodedMsg decode(const std::uint8_t* data, std::size_t len) {
    if (len != 6) throw protocol_error("frame length must be 6");
    DecodedMsg msg;
    msg.seq = (static_cast<std::uint32_t>(data[0]) << 24) | (static_cast<std::uint32_t>(data[1]) << 16) |
              (static_cast<std::uint32_t>(data[2]) << 8) | static_cast<std::uint32_t>(data[3]);
    msg.kind = data[4];
    const std::uint8_t flags = data[5];
    if (msg.kind == kKindTrialApplied) {
        if (flags != 0) throw protocol_error("trial frame has nonzero flags");
    } else if (msg.kind == kKindFeedback) {
        if (flags & 0xFE) throw protocol_error("feedback frame has nonzero reserved bits");
        msg.degraded = (flags & 0x01) != 0;
    } else {
        throw protocol_error("unknown frame kind");
    }
    return msg;
}

inline DecodedMsg decode(const Frame& frame) { return decode(frame.data(), frame.size()); }

struct TranscriptEntry {
    enum class Direction { ctrl_to_ue, ue_to_ctrl };

    Direction direction;
    Frame frame;
};

/// Datagram-style transport between the controller and UE endpoints. recv
/// calls return false on timeout; sends never block.
class LinkTransport {
public:
    virtual ~LinkTransport() = default;

    virtual void ctrl_send(const Frame& frame) = 0;
    virtual bool ctrl_recv(Frame& frame, int timeout_ms) = 0;
    virtual void ue_send(const Frame& frame) = 0;
    virtual bool ue_recv(Frame& frame, int timeout_ms) = 0;

    /// Optional frame log for protocol inspection; not consulted by the
    /// control logic.
    std::vector<TranscriptEntry>* transcript = nullptr;

    /// Loss injection, applied at send time, per direction.
    double drop_ctrl_to_ue = 0.0;
    double drop_ue_to_ctrl = 0.0;

    void seed_injection(std::uint64_t seed) { injection_rng_.seed(seed); }

protected:
    bool dropped(double prob) {
        if (prob <= 0.0) return false;
        if (prob >= 1.0) return true;
        return std::uniform_real_distribution<double>(0.0, 1.0)(injection_rng_) < prob;
    }

    void record(TranscriptEntry::Direction dir, const Frame& frame) {
        if (transcript) transcript->push_back({dir, frame});
    }

private:
    std::mt19937_64 injection_rng_{0x9e3779b97f4a7c15ull};
};

/// Queue-backed transport for single-threaded sessions. An empty queue is a
/// timeout: nothing can arrive while the caller holds the thread.
class InProcessLink : public LinkTransport {
public:
    void ctrl_send(const Frame& frame) override {
        if (dropped(drop_ctrl_to_ue)) return;
        record(TranscriptEntry::Direction::ctrl_to_ue, frame);
        to_ue_.push_back(frame);
    }

    bool ctrl_recv(Frame& frame, int) override {
        if (to_ctrl_.empty()) return false;
        frame = to_ctrl_.front();
        to_ctrl_.pop_front();
        return true;
    }

    void ue_send(const Frame& frame) override {
        if (dropped(drop_ue_to_ctrl)) return;
        record(TranscriptEntry::Direction::ue_to_ctrl, frame);
        to_ctrl_.push_back(frame);
    }

    bool ue_recv(Frame& frame, int) override {
        if (to_ue_.empty()) return false;
        frame = to_ue_.front();
        to_ue_.pop_front();
        return true;
    }

private:
    std::deque<Frame> to_ue_;
    std::deque<Frame> to_ctrl_;
};

/// UDP loopback transport: both endpoints' sockets live in this object, so a
/// single-threaded session can pump them alternately. The UE side binds the
/// given address (port 0 picks an ephemeral port), the controller side binds
/// an ephemeral port on the same host.
class UdpLink : public LinkTransport {
public:
    explicit UdpLink(const std::string& host = "127.0.0.1", std::uint16_t ue_port = 0) {
        ctrl_fd_ = open_socket(host, 0, ctrl_addr_);
        ue_fd_ = open_socket(host, ue_port, ue_addr_);
    }

    UdpLink(const UdpLink&) = delete;
    UdpLink& operator=(const UdpLink&) = delete;

    ~UdpLink() override {
        if (ctrl_fd_ >= 0) ::close(ctrl_fd_);
        if (ue_fd_ >= 0) ::close(ue_fd_);
    }

    /// Fixed extra latency applied before each send; off by default.
    int delay_ms = 0;

    void ctrl_send(const Frame& frame) override {
        send_from(ctrl_fd_, ue_addr_, frame, drop_ctrl_to_ue, TranscriptEntry::Direction::ctrl_to_ue);
    }

    bool ctrl_recv(Frame& frame, int timeout_ms) override { return recv_on(ctrl_fd_, frame, timeout_ms); }

    void ue_send(const Frame& frame) override {
        send_from(ue_fd_, ctrl_addr_, frame, drop_ue_to_ctrl, TranscriptEntry::Direction::ue_to_ctrl);
    }

    bool ue_recv(Frame& frame, int timeout_ms) override { return recv_on(ue_fd_, frame, timeout_ms); }

    std::uint16_t ue_port() const { return ntohs(ue_addr_.sin_port); }

private:
    static int open_socket(const std::string& host, std::uint16_t port, sockaddr_in& bound) {
        const int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
        if (fd < 0) throw transport_error("socket() failed");
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
            ::close(fd);
            throw transport_error("bad transport host: " + host);
        }
        if (::bind(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
            ::close(fd);
            throw transport_error("bind() failed on " + host + ":" + std::to_string(port));
        }
        socklen_t len = sizeof(bound);
        if (::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len) != 0) {
            ::close(fd);
            throw transport_error("getsockname() failed");
        }
        return fd;
    }

    void send_from(int fd, const sockaddr_in& to, const Frame& frame, double drop_prob,
                   TranscriptEntry::Direction dir) {
        if (dropped(drop_prob)) return;
        if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
        record(dir, frame);
        const auto sent = ::sendto(fd, frame.data(), frame.size(), 0,
                                   reinterpret_cast<const sockaddr*>(&to), sizeof(to));
        if (sent != static_cast<ssize_t>(frame.size())) throw transport_error("sendto() failed");
    }

    static bool recv_on(int fd, Frame& frame, int timeout_ms) {
        using Clock = std::chrono::steady_clock;
        const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms < 0 ? 0 : timeout_ms);
        for (;;) {
            const auto remaining =
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
            pollfd pfd{fd, POLLIN, 0};
            const int ready = ::poll(&pfd, 1, remaining > 0 ? static_cast<int>(remaining) : 0);
            if (ready < 0) throw transport_error("poll() failed");
            if (ready == 0) return false;
            std::uint8_t buf[64];
            const auto got = ::recv(fd, buf, sizeof(buf), 0);
            if (got < 0) throw transport_error("recv() failed");
            if (got == static_cast<ssize_t>(frame.size())) {
                std::memcpy(frame.data(), buf, frame.size());
                return true;
            }
            // Undersized or oversized datagrams are not protocol frames; drop
            // them and keep waiting.
        }
    }

    int ctrl_fd_ = -1;
    int ue_fd_ = -1;
    sockaddr_in ctrl_addr_{};
    sockaddr_in ue_addr_{};
};

}  // namespace hexris
