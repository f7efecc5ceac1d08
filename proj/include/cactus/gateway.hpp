#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cactus/errors.hpp"

namespace cactus::llm {

enum class Role { System, User, Assistant };

std::string_view to_string(Role r);

struct Message {
    Role role = Role::User;
    std::string content;
};

struct ChatRequest {
    std::string model_id;
    std::vector<Message> messages;      // non-empty; first role System or User
    double temperature = 0.0;           // [0, 2]
    int max_tokens = 1024;
    // Mock keying tag: fixtures match on (scenario, per-scenario call ordinal).
    // Ignored by HTTP backends.
    std::string scenario;

    void validate() const;
};

class GatewayError : public Error {
public:
    enum class Kind {
        Timeout,
        RateLimited,
        ServerError,
        MalformedResponse,
        FixtureMiss,
        Config,
        Http,
    };

    GatewayError(Kind kind, const std::string& message);

    Kind kind() const noexcept { return kind_; }
    bool retryable() const noexcept {
        return kind_ == Kind::Timeout || kind_ == Kind::RateLimited ||
               kind_ == Kind::ServerError;
    }

private:
    Kind kind_;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_delay{1000};
    double factor = 2.0;
    bool full_jitter = true;

    std::chrono::milliseconds delay_for_attempt(int attempt) const;  // 1-based
};

enum class BackendKind { Http, Mock };

struct BackendSpec {
    BackendKind kind = BackendKind::Mock;
    std::string base_url;               // Http: scheme://host[:port][/path]
    std::string api_key_env = "CACTUS_API_KEY";
    std::string fixture_path;           // Mock
    std::string model_id;
    double timeout_s = 60.0;

    static BackendSpec http(std::string base_url, std::string model_id,
                            std::string api_key_env = "CACTUS_API_KEY");
    static BackendSpec mock(std::string fixture_path, std::string model_id = "mock");

    // Throws GatewayError(Config): Http without base_url or with the key
    // variable unset; Mock without fixture_path.
    void validate() const;
};

// One completion attempt; retry handling lives in complete() below.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete_once(const ChatRequest& req) = 0;
    virtual std::string label() const = 0;
};

struct MockFixture {
    std::string scenario;
    int index = 0;
    std::optional<std::string> expect_substring;
    std::string response;
};

// Deterministic scripted backend. Each call consumes the next ordinal of its
// request's scenario; an unscripted (scenario, ordinal) raises FixtureMiss.
class MockBackend : public ChatBackend {
public:
    MockBackend() = default;
    explicit MockBackend(const std::string& fixture_path);

    void add_fixture(MockFixture fixture);
    void load_fixtures(const std::string& path);

    // Simulated per-call latency; used by concurrency tests.
    void set_latency(std::chrono::milliseconds latency) { latency_ = latency; }

    void reset_counters();

    std::string complete_once(const ChatRequest& req) override;
    std::string label() const override { return "mock"; }

    int max_in_flight() const { return max_in_flight_.load(); }
    int total_calls() const { return total_calls_.load(); }

private:
    std::map<std::pair<std::string, int>, MockFixture> fixtures_;
    std::map<std::string, int> next_index_;
    std::chrono::milliseconds latency_{0};
    std::mutex mutex_;
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_{0};
    std::atomic<int> total_calls_{0};
};

// Chat-completions HTTP backend (request shape: model, messages[],
// temperature, max_tokens; answer at choices[0].message.content).
class HttpBackend : public ChatBackend {
public:
    explicit HttpBackend(const BackendSpec& spec);

    std::string complete_once(const ChatRequest& req) override;
    std::string label() const override { return host_; }

private:
    std::string host_;          // scheme://authority
    std::string endpoint_;      // path for POST
    std::string api_key_;
    double timeout_s_;
};

std::shared_ptr<ChatBackend> make_backend(const BackendSpec& spec);

// Completion with retries: RateLimited / Timeout / ServerError retry with
// exponential backoff and full jitter; other errors surface immediately.
std::string complete(ChatBackend& backend, const ChatRequest& req,
                     const RetryPolicy& policy = {});

struct BatchResult {
    size_t index = 0;
    bool ok = false;
    std::string text;
    std::string error_code;
    std::string error_message;
};

// Runs `fn(i)` for i in [0, n) on at most `concurrency` worker threads.
void run_tasks(size_t n, int concurrency, const std::function<void(size_t)>& fn);

// Executes all requests with at most `concurrency` in flight. Results come
// back in input order; per-request failures are carried as values.
std::vector<BatchResult> run_batch(ChatBackend& backend,
                                   const std::vector<ChatRequest>& requests,
                                   int concurrency, const RetryPolicy& policy = {});

} // namespace cactus::llm
