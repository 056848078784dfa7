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
#include "polyrdl/plugins/rollback.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Rollback plug-in"};
  std::string id = "rollback";
  std::uint16_t port = 0;
  std::uint32_t version = 1;
  std::string data_dir;
  std::string store;
  app.add_option("--id", id, "plug-in id");
  app.add_option("--listen", port, "loopback port")->required();
  app.add_option("--schema-version", version, "schema version announced in HELLO");
  app.add_option("--data-dir", data_dir, "host data directory");
  app.add_option("--checkpoint-dir", store, "directory holding checkpoints/ (default: --data-dir)");
  CLI11_PARSE(app, argc, argv);
  if (store.empty()) store = data_dir.empty() ? "." : data_dir;

  polyrdl::plugins::RollbackPlugin p({id, version, port}, store);
  // checkpoint <label> | restore <label>
  return polyrdl::tools::serve_plugin(p.endpoint(), [&](const std::string& line) {
    std::istringstream in(line);
    std::string cmd, label;
    in >> cmd >> label;
    polyrdl::plugins::RollbackResult res;
    if (cmd == "checkpoint") {
      res = p.checkpoint(label);
    } else if (cmd == "restore") {
      res = p.restore(label);
    } else {
      std::cout << "error usage: checkpoint <label> | restore <label>" << std::endl;
      return;
    }
    std::cout << polyrdl::plugins::to_string(res.code);
    if (res.reset) std::cout << ' ' << polyrdl::to_string(res.reset->id) << " epoch " << res.reset->epoch;
    if (!res.message.empty()) std::cout << ' ' << res.message;
    std::cout << std::endl;
  });
}
