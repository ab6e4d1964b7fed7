#include "awareauto/llm.hpp"

#include "test_support.hpp"

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

using namespace awareauto;
using namespace awareauto::llm;
using awareauto::testing::TempDir;

namespace {

// Chat-completions stub on a random local port.
class StubServer {
public:
    explicit StubServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server_.Post("/v1/chat/completions", [this, handler](const httplib::Request& req, httplib::Response& res) {
            ++hits;
            last_body = req.body;
            last_auth = req.get_header_value("Authorization");
            handler(req, res);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }
    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

    std::atomic<int> hits{0};
    std::string last_body;
    std::string last_auth;

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

void reply_with(httplib::Response& res, const std::string& content) {
    nlohmann::json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
    res.set_content(body.dump(), "application/json");
}

RemoteConfig remote_for(const StubServer& s) {
    RemoteConfig c;
    c.endpoint = s.endpoint();
    c.api_key = "test-key";
    c.initial_backoff = std::chrono::milliseconds(1);
    c.timeout = std::chrono::milliseconds(5000);
    return c;
}

} // namespace

TEST_CASE("fixture key is the SHA-256 of system NUL user") {
    CHECK(fixture_key({"You are helpful.", "Turn on the TV."}) ==
          "f339d052bc9172fe46616b71f4d7668f007b6e93a8e1f60cb8fa5b86b3b9e5a5");
    CHECK(fixture_key({"", ""}) == "6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa01d");
    // Sampling settings are not part of the key.
    CompletionRequest hot{"You are helpful.", "Turn on the TV.", 0.9, 12};
    CHECK(fixture_key(hot) == fixture_key({"You are helpful.", "Turn on the TV."}));
    // The separator keeps ("ab","c") and ("a","bc") apart.
    CHECK(fixture_key({"ab", "c"}) != fixture_key({"a", "bc"}));
    CHECK(fixture_path("/fx", hot) == std::filesystem::path("/fx") / (fixture_key(hot) + ".txt"));
}

TEST_CASE("scripted backend replays fixture bytes and names missing ones") {
    TempDir dir;
    CompletionRequest req{"sys", "user"};
    {
        std::ofstream out(fixture_path(dir.path(), req), std::ios::binary);
        out << "line one\r\nline two\n\n";
    }
    ScriptedBackend backend(dir.path());
    CHECK(backend.complete(req) == "line one\r\nline two\n\n");
    CHECK(backend.complete(req) == backend.complete(req));

    CompletionRequest other{"sys", "something else"};
    try {
        backend.complete(other);
        FAIL("expected MissingFixtureError");
    } catch (const MissingFixtureError& e) {
        CHECK(e.key() == fixture_key(other));
        CHECK(e.path() == fixture_path(dir.path(), other));
        CHECK(std::string(e.what()).find(fixture_key(other)) != std::string::npos);
    }
}

TEST_CASE("remote backend speaks chat completions") {
    StubServer stub([](const httplib::Request&, httplib::Response& res) { reply_with(res, "OK"); });
    RemoteBackend backend(remote_for(stub));
    CHECK(backend.complete({"system text", "user text", 0.0, 64}) == "OK");
    auto body = nlohmann::json::parse(stub.last_body);
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][0]["content"] == "system text");
    CHECK(body["messages"][1]["content"] == "user text");
    CHECK(body["temperature"] == 0.0);
    CHECK(body["max_tokens"] == 64);
    CHECK(stub.last_auth == "Bearer test-key");
}

TEST_CASE("recording then replaying gives identical text") {
    StubServer stub([](const httplib::Request&, httplib::Response& res) { reply_with(res, "OK"); });
    TempDir dir;
    auto remote = std::make_shared<RemoteBackend>(remote_for(stub));
    RecordingBackend recorder(remote, dir.path());
    CompletionRequest req{"sys", "record me"};
    CHECK(recorder.complete(req) == "OK");
    CHECK(std::filesystem::exists(fixture_path(dir.path(), req)));
    ScriptedBackend replay(dir.path());
    CHECK(replay.complete(req) == "OK");
    CHECK(stub.hits == 1);
}

TEST_CASE("transient failures are retried, three attempts at most") {
    SUBCASE("recovers") {
        std::atomic<int> calls{0};
        StubServer stub([&](const httplib::Request&, httplib::Response& res) {
            if (++calls < 3) {
                res.status = 503;
                return;
            }
            reply_with(res, "third time");
        });
        RemoteBackend backend(remote_for(stub));
        CHECK(backend.complete({"s", "u"}) == "third time");
        CHECK(stub.hits == 3);
    }
    SUBCASE("gives up") {
        StubServer stub([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
        RemoteBackend backend(remote_for(stub));
        CHECK_THROWS_AS(backend.complete({"s", "u"}), TransportError);
        CHECK(stub.hits == 3);
    }
    SUBCASE("client errors are not retried") {
        StubServer stub([](const httplib::Request&, httplib::Response& res) { res.status = 401; });
        RemoteBackend backend(remote_for(stub));
        CHECK_THROWS_AS(backend.complete({"s", "u"}), TransportError);
        CHECK(stub.hits == 1);
    }
    SUBCASE("malformed body") {
        StubServer stub([](const httplib::Request&, httplib::Response& res) { res.set_content("{}", "application/json"); });
        RemoteBackend backend(remote_for(stub));
        CHECK_THROWS_AS(backend.complete({"s", "u"}), TransportError);
    }
}

TEST_CASE("unreachable endpoint is a transport error") {
    RemoteConfig c;
    c.endpoint = "http://127.0.0.1:1/v1/chat/completions";
    c.api_key = "k";
    c.initial_backoff = std::chrono::milliseconds(1);
    CHECK_THROWS_AS(RemoteBackend(c).complete({"s", "u"}), TransportError);
}

TEST_CASE("configuration errors") {
    ::unsetenv(kApiKeyVariable);
    RemoteConfig no_key;
    no_key.endpoint = "http://127.0.0.1:9/x";
    CHECK_THROWS_AS(RemoteBackend{no_key}, CredentialError);
    ::setenv(kApiKeyVariable, "from-env", 1);
    CHECK_NOTHROW(RemoteBackend{no_key});
    ::unsetenv(kApiKeyVariable);

    RemoteConfig no_endpoint;
    no_endpoint.api_key = "k";
    CHECK_THROWS_AS(RemoteBackend{no_endpoint}, CredentialError);

    BackendConfig scripted;
    scripted.kind = BackendKind::scripted;
    CHECK_THROWS_AS(make_backend(scripted), InvalidArgument);

    CHECK(parse_backend_kind("remote") == BackendKind::remote_http);
    CHECK(parse_backend_kind("Scripted") == BackendKind::scripted);
    CHECK(parse_backend_kind("recording") == BackendKind::recording);
    CHECK_THROWS_AS(parse_backend_kind("magic"), InvalidArgument);
}
