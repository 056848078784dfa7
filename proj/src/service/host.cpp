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

#include "polyrdl/service/host.hpp"

namespace polyrdl::service {

Host::Host(NodeOptions opt, std::chrono::milliseconds connect_timeout, std::size_t queue_cap) {
  node_ = std::make_unique<Node>(std::move(opt));
  plugin::ManagerOptions mo;
  mo.host_replica = node_->id();
  mo.data_dir = node_->options().data_dir;
  mo.connect_timeout = connect_timeout;
  mo.queue_cap = queue_cap;
  plugins_ = std::make_unique<plugin::PluginManager>(*node_, std::move(mo));
  node_->set_event_sink([m = plugins_.get()](std::string_view fn, const Update* u, Bytes view) {
    m->dispatch(fn, u, view);
  });
}

Host::~Host() {
  node_->set_event_sink({});
  plugins_->shutdown();
}

}  // namespace polyrdl::service
