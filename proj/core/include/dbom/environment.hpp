/*
 * Copyright 2026 The DBOM Toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DBOM_ENVIRONMENT_HPP_
#define DBOM_ENVIRONMENT_HPP_

#include <string>
#include <string_view>

#include "dbom/bom.hpp"

namespace dbom {

std::string_view toolkit_version();

/// OS, CPU architecture, toolkit version and linked component versions of
/// the current process. Stable across runs on one machine.
EnvironmentRecord capture_environment();

RuntimeEnvironment capture_runtime_environment(std::string_view serving_system);

}  // namespace dbom

#endif  // DBOM_ENVIRONMENT_HPP_
