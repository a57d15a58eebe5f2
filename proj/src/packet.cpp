// Copyright 2026 The SRPIC Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "srpic/packet.hpp"

namespace srpic {

bool is_suitable(const Packet& p) {
  if (p.is_fragment || p.has_disallowed_options) return false;
  for (TcpFlag f : {TcpFlag::kEce, TcpFlag::kCwr, TcpFlag::kUrg, TcpFlag::kRst,
                    TcpFlag::kSyn, TcpFlag::kFin}) {
    if (p.flags.has(f)) return false;
  }
  return true;
}

}  // namespace srpic
