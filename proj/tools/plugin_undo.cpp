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
#include "polyrdl/plugins/undo.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Undo plug-in"};
  std::string id = "undo";
  std::uint16_t port = 0;
  std::uint32_t version = 1;
  std::string data_dir;
  app.add_option("--id", id, "plug-in id");
  app.add_option("--listen", port, "loopback port")->required();
  app.add_option("--schema-version", version, "schema version announced in HELLO");
  app.add_option("--data-dir", data_dir, "host data directory (unused)");
  CLI11_PARSE(app, argc, argv);

  polyrdl::plugins::UndoPlugin p({id, version, port});
  // undo <replica>:<seq>
  return polyrdl::tools::serve_plugin(p.endpoint(), [&](const std::string& line) {
    std::istringstream in(line);
    std::string cmd, target;
    in >> cmd >> target;
    const auto uid = polyrdl::plugins::parse_update_id(target);
    if (cmd != "undo" || !uid) {
      std::cout << "error usage: undo <replica>:<seq>" << std::endl;
      return;
    }
    const auto res = p.undo(*uid);
    std::cout << polyrdl::plugins::to_string(res.code);
    for (const auto& u : res.issued) std::cout << ' ' << polyrdl::to_string(u.id);
    if (!res.message.empty()) std::cout << ' ' << res.message;
    std::cout << std::endl;
  });
}
