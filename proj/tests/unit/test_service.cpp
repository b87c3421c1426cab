#include <doctest.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "datasets.hpp"
#include "guidepost/engine.hpp"
#include "guidepost/json_io.hpp"
#include "guidepost/service.hpp"
#include "guidepost/session.hpp"

using namespace guidepost;
using nlohmann::json;

namespace {

struct Harness {
  testdata::TempDir dir;
  std::unique_ptr<Service> service;

  explicit Harness(bool build_bundles = true, std::uint64_t cap = kDefaultMaxUploadBytes) {
    ServiceConfig config;
    config.registry = dir.path();
    config.build_bundles = build_bundles;
    config.max_upload_bytes = cap;
    service = std::make_unique<Service>(config);
  }

  HttpResponse call(std::string method, std::string path, Params params = {}, std::string body = {}) {
    return service->handle({std::move(method), std::move(path), std::move(params), std::move(body)});
  }

  std::string upload(const std::string& csv) {
    auto r = call("POST", "/datasets", {}, csv);
    REQUIRE(r.status == 201);
    return json::parse(r.body)["dataset_id"].get<std::string>();
  }
};

std::string error_code(const HttpResponse& r) { return json::parse(r.body)["error"]["code"].get<std::string>(); }

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("status mapping") {
    CHECK(http_status(ErrorCode::invalid_argument) == 400);
    CHECK(http_status(ErrorCode::parse_error) == 400);
    CHECK(http_status(ErrorCode::corrupt) == 400);
    CHECK(http_status(ErrorCode::not_found) == 404);
    CHECK(http_status(ErrorCode::stale_bundle) == 409);
    CHECK(http_status(ErrorCode::bundle_not_ready) == 409);
    CHECK(http_status(ErrorCode::too_large) == 413);
    CHECK(http_status(ErrorCode::incomparable) == 500);
    CHECK(http_status(ErrorCode::internal) == 500);
  }

  TEST_CASE("ingest and guideposts") {
    Harness h;
    const auto id = h.upload(testdata::read_fixture_file("abc.csv"));
    auto cols = json::parse(h.call("GET", "/datasets/" + id + "/columns").body);
    CHECK(cols["rows"] == 200);
    CHECK(cols["columns"].size() == 6);
    CHECK(cols["columns"][5]["kind"] == "categorical");

    auto exact = h.call("GET", "/datasets/" + id + "/guideposts",
                        {{"descriptor", "linear_relationship"}, {"k", "3"}, {"mode", "exact"}});
    REQUIRE(exact.status == 200);
    auto doc = json::parse(exact.body);
    REQUIRE(doc["guideposts"].size() == 3);
    CHECK(doc["guideposts"][0]["tuple"][0]["name"] == "a");
    CHECK(doc["guideposts"][0]["tuple"][1]["name"] == "b");
    CHECK(doc["guideposts"][0]["value"]["strength"].get<double>() == doctest::Approx(1.0));
    CHECK(doc["guideposts"][0]["payload"]["type"] == "scatter");

    h.service->wait_for_bundles();
    CHECK(h.service->bundle_status(id) == BundleStatus::ready);
    auto approx = h.call("GET", "/datasets/" + id + "/guideposts", {{"descriptor", "linear_relationship"}, {"k", "3"}});
    REQUIRE(approx.status == 200);
    CHECK(json::parse(approx.body)["guideposts"][0]["approximate"] == true);
    // GETs are repeatable.
    CHECK(h.call("GET", "/datasets/" + id + "/guideposts", {{"descriptor", "linear_relationship"}, {"k", "3"}}).body ==
          approx.body);

    auto ov = h.call("GET", "/datasets/" + id + "/overview", {{"descriptor", "skew"}, {"mode", "exact"}});
    CHECK(ov.status == 200);
    CHECK(json::parse(ov.body)["values"].size() == 5);

    auto rows = h.call("GET", "/datasets/" + id + "/rows", {{"col", "group"}, {"value", "south"}, {"limit", "5"}});
    REQUIRE(rows.status == 200);
    auto rd = json::parse(rows.body);
    CHECK(rd["rows"].size() <= 5);
    for (const auto& r : rd["rows"]) CHECK(r["cells"][5] == "south");
  }

  TEST_CASE("bundle not ready answers 409 while exact mode works") {
    Harness h(false);
    const auto id = h.upload(testdata::read_fixture_file("abc.csv"));
    auto r = h.call("GET", "/datasets/" + id + "/guideposts", {{"descriptor", "skew"}});
    CHECK(r.status == 409);
    CHECK(json::parse(r.body)["error"]["message"] == "bundle building");
    CHECK(h.call("GET", "/datasets/" + id + "/guideposts", {{"descriptor", "skew"}, {"mode", "exact"}}).status == 200);
  }

  TEST_CASE("client errors") {
    Harness h(true, 64);
    CHECK(h.call("POST", "/datasets", {}, std::string(100, 'x')).status == 413);
    const auto id = h.upload("a,b,c\n1,2,3\n2,1,4\n3,3,3\n");
    auto bad = [&](Params p) { return h.call("GET", "/datasets/" + id + "/guideposts", std::move(p)); };
    CHECK(bad({{"descriptor", "nope"}}).status == 400);
    CHECK(bad({{"descriptor", "skew"}, {"bogus", "1"}}).status == 400);
    CHECK(bad({{"descriptor", "skew"}, {"k", "0"}}).status == 400);
    auto range = bad({{"descriptor", "skew"}, {"min", "0.5"}, {"max", "0.4"}});
    CHECK(range.status == 400);
    CHECK(json::parse(range.body)["error"]["message"] == "invalid filter range");
    CHECK(bad({{"descriptor", "skew"}, {"alpha", "0.1"}}).status == 400);
    CHECK(h.call("GET", "/datasets/0123456789abcdef/columns").status == 404);
    CHECK(h.call("GET", "/datasets/../../etc/columns").status == 404);
    CHECK(h.call("GET", "/datasets/" + id + "/guideposts/ffffffffffffffff/related").status == 404);
    CHECK(h.call("GET", "/nowhere").status == 404);
    CHECK(h.call("DELETE", "/datasets").status == 405);
    CHECK(h.call("POST", "/datasets", {}, "").status == 400);
    CHECK(error_code(h.call("POST", "/datasets", {}, "")) == "parse_error");
    CHECK(h.call("GET", "/datasets/" + id + "/rows", {{"col", "zz"}, {"value", "1"}}).status == 400);
  }

  TEST_CASE("related on a two-column dataset") {
    Harness h;
    const auto id = h.upload("x,y\n1,2\n2,1\n3,3\n4,6\n");
    const auto gid = guidepost_id(id, DescriptorKind::linear_relationship, std::vector<std::size_t>{0, 1});
    auto r = h.call("GET", "/datasets/" + id + "/guideposts/" + gid + "/related", {{"mode", "exact"}});
    REQUIRE(r.status == 200);
    auto doc = json::parse(r.body);
    CHECK(doc["x_bar"].empty());
    CHECK(doc["y_bar"].empty());
    CHECK(doc["xy_bar"].empty());
  }

  TEST_CASE("sessions") {
    Harness h;
    const auto id = h.upload(testdata::read_fixture_file("abc.csv"));
    auto created = h.call("POST", "/sessions", {}, json{{"dataset_id", id}}.dump());
    REQUIRE(created.status == 201);
    const auto sid = json::parse(created.body)["session_id"].get<std::string>();

    SessionState s;
    s.dataset_id = id;
    const auto gid = guidepost_id(id, DescriptorKind::linear_relationship, std::vector<std::size_t>{0, 1});
    s.bookmarks.push_back({gid, "2026-05-01T10:00:00Z"});
    s.focus = gid;
    s.focus_history = {gid};
    QuerySettings q;
    q.metric = Metric::significance_adjusted_pearson;
    q.alpha = 0.01;
    s.settings[DescriptorKind::linear_relationship] = q;
    const auto body = save_session(s) + "\n";
    auto put = h.call("PUT", "/sessions/" + sid, {}, body);
    REQUIRE(put.status == 200);
    auto get = h.call("GET", "/sessions/" + sid);
    CHECK(get.status == 200);
    CHECK(get.body == body);
    CHECK(put.body == body);

    CHECK(h.call("GET", "/sessions/0123456789abcdef").status == 404);
    CHECK(h.call("PUT", "/sessions/" + sid, {}, "{}").status == 400);
    s.bookmarks.push_back({"ffffffffffffffff", "t"});
    CHECK(h.call("PUT", "/sessions/" + sid, {}, save_session(s)).status == 404);
    CHECK(h.call("POST", "/sessions", {}, "{\"dataset_id\":\"0123456789abcdef\"}").status == 404);
    CHECK(h.call("POST", "/sessions", {}, "[]").status == 400);
  }

  TEST_CASE("state survives a restart") {
    testdata::TempDir dir;
    std::string id;
    {
      ServiceConfig config;
      config.registry = dir.path();
      Service s(config);
      auto r = s.handle({"POST", "/datasets", {}, testdata::read_fixture_file("abc.csv")});
      id = json::parse(r.body)["dataset_id"].get<std::string>();
      s.wait_for_bundles();
    }
    ServiceConfig config;
    config.registry = dir.path();
    config.build_bundles = false;
    Service s(config);
    auto r = s.handle({"GET", "/datasets/" + id + "/guideposts", {{"descriptor", "skew"}}, ""});
    CHECK(r.status == 200);
  }

  TEST_CASE("http transport") {
    Harness h;
    const int port = h.service->listen_in_background("127.0.0.1");
    REQUIRE(port > 0);
    httplib::Client client("127.0.0.1", port);
    auto posted = client.Post("/datasets", testdata::read_fixture_file("abc.csv"), "text/csv");
    REQUIRE(posted);
    CHECK(posted->status == 201);
    const auto id = json::parse(posted->body)["dataset_id"].get<std::string>();

    httplib::MultipartFormDataItems items{{"file", testdata::read_fixture_file("outliers.csv"), "outliers.csv", "text/csv"}};
    auto multipart = client.Post("/datasets", items);
    REQUIRE(multipart);
    CHECK(multipart->status == 201);

    auto got = client.Get("/datasets/" + id + "/guideposts?descriptor=linear_relationship&k=3&mode=exact");
    REQUIRE(got);
    CHECK(got->status == 200);
    auto direct = h.call("GET", "/datasets/" + id + "/guideposts",
                         {{"descriptor", "linear_relationship"}, {"k", "3"}, {"mode", "exact"}});
    CHECK(got->body == direct.body);

    auto dup = client.Get("/datasets/" + id + "/guideposts?descriptor=skew&descriptor=outliers");
    REQUIRE(dup);
    CHECK(dup->status == 400);
    auto missing = client.Get("/datasets/" + id + "/nothing");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(json::parse(missing->body).contains("error"));
    h.service->stop();
  }
}
