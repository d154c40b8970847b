// lgpl-serve: interactive ranking sessions over HTTP.

#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "lgpl/server.hpp"

using namespace lgpl;

int main(int argc, char** argv) {
  CLI::App app{"Interactive preference-learning session service"};
  int port = 8080;
  std::string host = "0.0.0.0", mock, snapshot_dir, cors = "*";
  ChatEndpointConfig endpoint;
  std::string base_url;
  app.add_option("--port", port, "Listen port");
  app.add_option("--host", host, "Listen address");
  app.add_option("--mock-llm", mock, "Mock LLM fixture JSON")->check(CLI::ExistingFile);
  app.add_option("--snapshot-dir", snapshot_dir, "Write a JSON snapshot of each session on mutation");
  app.add_option("--cors-origin", cors, "Allowed origin for the ranking UI");
  app.add_option("--llm-base-url", base_url, "Chat-completion endpoint, e.g. https://api.openai.com/v1");
  app.add_option("--llm-model", endpoint.model_name, "Model name");
  app.add_option("--llm-api-key-env", endpoint.api_key_env_var, "Environment variable holding the API key");
  CLI11_PARSE(app, argc, argv);

  ServiceConfig config;
  try {
    if (!mock.empty()) {
      config.provider = std::shared_ptr<ChatProvider>(new MockChatProvider(MockChatProvider::from_file(mock)));
    } else if (!base_url.empty()) {
      endpoint.base_url = base_url;
      config.provider = std::make_shared<HttpChatProvider>(endpoint);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  if (!snapshot_dir.empty()) config.snapshot_dir = snapshot_dir;

  SessionManager sessions(std::move(config));
  httplib::Server server;
  install_routes(server, sessions, cors);
  std::cout << "listening on " << host << ':' << port << std::endl;
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
    return 1;
  }
  return 0;
}
