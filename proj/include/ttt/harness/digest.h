/* Copyright 2026 The ttt-serve Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <span>
#include <string>
#include <vector>

#include "ttt/types.h"

namespace ttt::harness {

// Hex SHA-256 of the concatenated little-endian IEEE-754 bytes.
std::string digest_values(std::span<const double> values);
std::string digest_stream(const std::vector<Vec>& vectors);

}  // namespace ttt::harness
