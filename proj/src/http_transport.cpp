#include "httplib.h"
#include "synthgrid/errors.hpp"
#include "synthgrid/gateway.hpp"

namespace synthgrid {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // /path?query
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("malformed URL '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpResponse HttpTransport::send(const HttpRequest& request) {
  const auto [origin, target] = split_url(request.url);
  httplib::Client client(origin);
  const auto secs = request.timeout.count() / 1000;
  const auto usecs = (request.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(30, 0);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_follow_location(true);

  httplib::Headers headers;
  std::string content_type = "application/json";
  for (const auto& [k, v] : request.headers) {
    if (k == "Content-Type") content_type = v;
    else headers.emplace(k, v);
  }

  httplib::Result res = request.method == "POST"
                            ? client.Post(target, headers, request.body, content_type)
                            : client.Get(target, headers);
  if (!res) {
    throw TransportError(request.method + " " + request.url + " failed: " + httplib::to_string(res.error()));
  }
  return {res->status, res->body};
}

}  // namespace synthgrid
