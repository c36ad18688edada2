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

#include "dbom/environment.hpp"

#include <sys/utsname.h>

#include <nlohmann/json.hpp>
#include <sodium.h>

#ifndef DBOM_VERSION
#define DBOM_VERSION "0.0.0"
#endif

namespace dbom {

namespace {

std::string os_string() {
  utsname u{};
  if (uname(&u) != 0) return "unknown";
  return std::string(u.sysname) + " " + u.release;
}

std::string cpu_string() {
  utsname u{};
  if (uname(&u) != 0) return "unknown";
  return u.machine;
}

std::string compiler_string() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

}  // namespace

std::string_view toolkit_version() { return DBOM_VERSION; }

EnvironmentRecord capture_environment() {
  EnvironmentRecord env;
  env.os = os_string();
  env.cpu = cpu_string();
  env.toolkit_version = std::string(toolkit_version());
  env.component_versions["compiler"] = compiler_string();
  env.component_versions["libsodium"] = sodium_version_string();
  env.component_versions["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                            std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  env.component_versions["cxx_standard"] = std::to_string(__cplusplus);
  return env;
}

RuntimeEnvironment capture_runtime_environment(std::string_view serving_system) {
  return {os_string(), cpu_string(), std::string(toolkit_version()), std::string(serving_system)};
}

}  // namespace dbom
