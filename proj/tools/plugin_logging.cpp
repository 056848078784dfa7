// Copyright 2026 The polyrdl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <sstream>

#include "plugin_main.hpp"
#include "polyrdl/plugins/logging.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Audit-trail plug-in"};
  std::string id = "logging";
  std::uint16_t port = 0;
  std::uint32_t version = 1;
  std::string data_dir;
  std::string log_file;
  app.add_option("--id", id, "plug-in id");
  app.add_option("--listen", port, "loopback port")->required();
  app.add_option("--schema-version", version, "schema version announced in HELLO");
  app.add_option("--data-dir", data_dir, "host data directory");
  app.add_option("--log-file", log_file, "audit file (default <data-dir>/audit.jsonl or ./audit.jsonl)");
  CLI11_PARSE(app, argc, argv);
  if (log_file.empty()) log_file = data_dir.empty() ? "audit.jsonl" : data_dir + "/audit.jsonl";

  polyrdl::plugins::LoggingPlugin p({id, version, port}, log_file);
  // query [replica=<id>] [object=<id>] [from=<ms>] [to=<ms>]
  return polyrdl::tools::serve_plugin(p.endpoint(), [&](const std::string& line) {
    std::istringstream in(line);
    std::string cmd, arg;
    in >> cmd;
    if (cmd != "query") {
      std::cout << "error unknown command " << cmd << std::endl;
      return;
    }
    polyrdl::plugins::AuditFilter f;
    while (in >> arg) {
      const auto eq = arg.find('=');
      const std::string k = arg.substr(0, eq), v = eq == std::string::npos ? "" : arg.substr(eq + 1);
      if (k == "replica") f.replica_id = v;
      else if (k == "object") f.object_id = v;
      else if (k == "from") f.from_ms = std::stoll(v);
      else if (k == "to") f.to_ms = std::stoll(v);
    }
    const auto records = polyrdl::plugins::query_audit(log_file, f);
    for (const auto& r : records) std::cout << polyrdl::plugins::audit_json(r) << '\n';
    std::cout << "ok " << records.size() << std::endl;
  });
}
