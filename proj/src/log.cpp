// Copyright 2026-present the vrsketch-retrieval project
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

#include "vrsketch/log.hpp"

#include <iostream>
#include <mutex>

namespace vrsketch {

namespace {

std::mutex g_log_mutex;

void default_sink(LogLevel level, const std::string& message) {
  switch (level) {
    case LogLevel::kDebug:
      break;  // silent by default
    case LogLevel::kInfo:
      std::cout << "[info] " << message << "\n";
      break;
    case LogLevel::kWarn:
      std::cerr << "[warn] " << message << "\n";
      break;
    case LogLevel::kError:
      std::cerr << "[error] " << message << "\n";
      break;
  }
}

LogSink& sink_ref() {
  static LogSink sink = default_sink;
  return sink;
}

}  // namespace

LogSink set_log_sink(LogSink sink) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  LogSink previous = sink_ref();
  sink_ref() = sink ? std::move(sink) : default_sink;
  return previous;
}

void log_message(LogLevel level, const std::string& message) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  sink_ref()(level, message);
}

WarningCapture::WarningCapture() {
  auto* store = &warnings_;
  previous_ = set_log_sink([store](LogLevel level, const std::string& message) {
    if (level == LogLevel::kWarn) store->push_back(message);
  });
}

WarningCapture::~WarningCapture() { set_log_sink(previous_); }

bool WarningCapture::contains(const std::string& needle) const {
  for (const auto& w : warnings_) {
    if (w.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace vrsketch
