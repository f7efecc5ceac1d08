#include "cactus/gateway.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace cactus::llm {

using nlohmann::json;

std::string_view to_string(Role r) {
    switch (r) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

void ChatRequest::validate() const {
    if (messages.empty())
        throw GatewayError(GatewayError::Kind::Config, "request has no messages");
    if (messages.front().role == Role::Assistant)
        throw GatewayError(GatewayError::Kind::Config,
                           "first message must be system or user");
    if (temperature < 0.0 || temperature > 2.0)
        throw GatewayError(GatewayError::Kind::Config, "temperature outside [0,2]");
    if (max_tokens <= 0)
        throw GatewayError(GatewayError::Kind::Config, "max_tokens must be positive");
}

namespace {

std::string kind_code(GatewayError::Kind k) {
    switch (k) {
        case GatewayError::Kind::Timeout: return "timeout";
        case GatewayError::Kind::RateLimited: return "rate_limited";
        case GatewayError::Kind::ServerError: return "server_error";
        case GatewayError::Kind::MalformedResponse: return "malformed_response";
        case GatewayError::Kind::FixtureMiss: return "fixture_miss";
        case GatewayError::Kind::Config: return "config";
        case GatewayError::Kind::Http: return "http";
    }
    return "gateway_error";
}

} // namespace

GatewayError::GatewayError(Kind kind, const std::string& message)
    : Error(kind_code(kind), message), kind_(kind) {}

std::chrono::milliseconds RetryPolicy::delay_for_attempt(int attempt) const {
    double scale = 1.0;
    for (int i = 1; i < attempt; ++i) scale *= factor;
    auto cap = std::chrono::duration<double, std::milli>(
        static_cast<double>(base_delay.count()) * scale);
    if (!full_jitter)
        return std::chrono::duration_cast<std::chrono::milliseconds>(cap);
    thread_local std::mt19937_64 rng{std::random_device{}()};
    std::uniform_real_distribution<double> dist(0.0, cap.count());
    return std::chrono::milliseconds(static_cast<long>(dist(rng)));
}

// ---------------------------------------------------------------------------
// BackendSpec
// ---------------------------------------------------------------------------

BackendSpec BackendSpec::http(std::string base_url, std::string model_id,
                              std::string api_key_env) {
    BackendSpec spec;
    spec.kind = BackendKind::Http;
    spec.base_url = std::move(base_url);
    spec.model_id = std::move(model_id);
    spec.api_key_env = std::move(api_key_env);
    return spec;
}

BackendSpec BackendSpec::mock(std::string fixture_path, std::string model_id) {
    BackendSpec spec;
    spec.kind = BackendKind::Mock;
    spec.fixture_path = std::move(fixture_path);
    spec.model_id = std::move(model_id);
    return spec;
}

void BackendSpec::validate() const {
    if (kind == BackendKind::Http) {
        if (base_url.empty())
            throw GatewayError(GatewayError::Kind::Config,
                               "http backend requires base_url");
        const char* key = std::getenv(api_key_env.c_str());
        if (key == nullptr || *key == '\0')
            throw GatewayError(GatewayError::Kind::Config,
                               "environment variable " + api_key_env +
                                   " is not set (required for http backend)");
    } else {
        if (fixture_path.empty())
            throw GatewayError(GatewayError::Kind::Config,
                               "mock backend requires fixture_path");
    }
}

// ---------------------------------------------------------------------------
// MockBackend
// ---------------------------------------------------------------------------

MockBackend::MockBackend(const std::string& fixture_path) {
    load_fixtures(fixture_path);
}

void MockBackend::add_fixture(MockFixture fixture) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(fixture.scenario, fixture.index);
    fixtures_[key] = std::move(fixture);
}

void MockBackend::load_fixtures(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw GatewayError(GatewayError::Kind::Config,
                           "cannot open fixture file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw GatewayError(GatewayError::Kind::Config,
                               path + ":" + std::to_string(line_no) +
                                   ": invalid fixture line");
        MockFixture f;
        f.scenario = j.value("scenario", "");
        f.index = j.value("index", 0);
        if (j.contains("expect_substring"))
            f.expect_substring = j.at("expect_substring").get<std::string>();
        f.response = j.at("response").get<std::string>();
        add_fixture(std::move(f));
    }
}

void MockBackend::reset_counters() {
    std::lock_guard<std::mutex> lock(mutex_);
    next_index_.clear();
}

std::string MockBackend::complete_once(const ChatRequest& req) {
    req.validate();
    total_calls_.fetch_add(1);
    int now_in_flight = in_flight_.fetch_add(1) + 1;
    int seen = max_in_flight_.load();
    while (now_in_flight > seen &&
           !max_in_flight_.compare_exchange_weak(seen, now_in_flight)) {
    }

    struct Guard {
        std::atomic<int>& counter;
        ~Guard() { counter.fetch_sub(1); }
    } guard{in_flight_};

    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);

    MockFixture fixture;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        int ordinal = next_index_[req.scenario]++;
        auto it = fixtures_.find(std::make_pair(req.scenario, ordinal));
        if (it == fixtures_.end())
            throw GatewayError(GatewayError::Kind::FixtureMiss,
                               "no fixture for scenario '" + req.scenario +
                                   "' call " + std::to_string(ordinal));
        fixture = it->second;
    }

    if (fixture.expect_substring) {
        std::string prompt;
        for (const auto& m : req.messages) {
            prompt += m.content;
            prompt += '\n';
        }
        if (prompt.find(*fixture.expect_substring) == std::string::npos)
            throw GatewayError(GatewayError::Kind::FixtureMiss,
                               "prompt for scenario '" + req.scenario +
                                   "' does not contain expected substring \"" +
                                   *fixture.expect_substring + "\"");
    }
    return fixture.response;
}

// ---------------------------------------------------------------------------
// HttpBackend
// ---------------------------------------------------------------------------

HttpBackend::HttpBackend(const BackendSpec& spec) : timeout_s_(spec.timeout_s) {
    spec.validate();
    const std::string& url = spec.base_url;
    auto scheme_end = url.find("://");
    size_t path_start = url.find('/', scheme_end == std::string::npos
                                          ? 0
                                          : scheme_end + 3);
    if (path_start == std::string::npos) {
        host_ = url;
        endpoint_ = "/chat/completions";
    } else {
        host_ = url.substr(0, path_start);
        std::string prefix = url.substr(path_start);
        while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
        endpoint_ = prefix + "/chat/completions";
    }
    api_key_ = std::getenv(spec.api_key_env.c_str());
}

std::string HttpBackend::complete_once(const ChatRequest& req) {
    req.validate();

    json messages = json::array();
    for (const auto& m : req.messages)
        messages.push_back({{"role", std::string(to_string(m.role))},
                            {"content", m.content}});
    json body = {{"model", req.model_id},
                 {"messages", std::move(messages)},
                 {"temperature", req.temperature},
                 {"max_tokens", req.max_tokens}};

    httplib::Client client(host_);
    client.set_connection_timeout(std::chrono::duration<double>(timeout_s_));
    client.set_read_timeout(std::chrono::duration<double>(timeout_s_));
    client.set_write_timeout(std::chrono::duration<double>(timeout_s_));

    httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
    auto res = client.Post(endpoint_, headers, body.dump(), "application/json");

    if (!res) {
        auto err = res.error();
        auto kind = (err == httplib::Error::ConnectionTimeout ||
                     err == httplib::Error::Read || err == httplib::Error::Write)
                        ? GatewayError::Kind::Timeout
                        : GatewayError::Kind::ServerError;
        throw GatewayError(kind, "transport failure: " + httplib::to_string(err));
    }
    if (res->status == 429)
        throw GatewayError(GatewayError::Kind::RateLimited, "status 429");
    if (res->status == 408)
        throw GatewayError(GatewayError::Kind::Timeout, "status 408");
    if (res->status >= 500)
        throw GatewayError(GatewayError::Kind::ServerError,
                           "status " + std::to_string(res->status));
    if (res->status != 200)
        throw GatewayError(GatewayError::Kind::Http,
                           "status " + std::to_string(res->status) + ": " + res->body);

    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded())
        throw GatewayError(GatewayError::Kind::MalformedResponse,
                           "response body is not JSON");
    try {
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw GatewayError(GatewayError::Kind::MalformedResponse,
                           std::string("missing completion field: ") + e.what());
    }
}

std::shared_ptr<ChatBackend> make_backend(const BackendSpec& spec) {
    spec.validate();
    if (spec.kind == BackendKind::Mock)
        return std::make_shared<MockBackend>(spec.fixture_path);
    return std::make_shared<HttpBackend>(spec);
}

// ---------------------------------------------------------------------------
// Retry + batch execution
// ---------------------------------------------------------------------------

std::string complete(ChatBackend& backend, const ChatRequest& req,
                     const RetryPolicy& policy) {
    int attempt = 1;
    for (;;) {
        try {
            return backend.complete_once(req);
        } catch (const GatewayError& e) {
            if (!e.retryable() || attempt >= policy.max_attempts) throw;
            std::this_thread::sleep_for(policy.delay_for_attempt(attempt));
            ++attempt;
        }
    }
}

void run_tasks(size_t n, int concurrency, const std::function<void(size_t)>& fn) {
    if (concurrency < 1)
        throw GatewayError(GatewayError::Kind::Config, "concurrency must be >= 1");
    const size_t workers = std::min<size_t>(static_cast<size_t>(concurrency), n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

std::vector<BatchResult> run_batch(ChatBackend& backend,
                                   const std::vector<ChatRequest>& requests,
                                   int concurrency, const RetryPolicy& policy) {
    std::vector<BatchResult> results(requests.size());
    run_tasks(requests.size(), concurrency, [&](size_t i) {
        results[i].index = i;
        try {
            results[i].text = complete(backend, requests[i], policy);
            results[i].ok = true;
        } catch (const Error& e) {
            results[i].ok = false;
            results[i].error_code = e.code();
            results[i].error_message = e.what();
        } catch (const std::exception& e) {
            results[i].ok = false;
            results[i].error_code = "unexpected";
            results[i].error_message = e.what();
        }
    });
    return results;
}

} // namespace cactus::llm
