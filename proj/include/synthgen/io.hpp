// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Small file helpers shared by the pipeline, evaluator, and CLI. All
// failures surface as DataError with the offending path in the message.

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "synthgen/errors.hpp"

namespace synthgen {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  if (!in.good() && !in.eof()) throw DataError("read failed: " + path);
  return out.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open file for writing: " + path);
  out << text;
  if (!out.good()) throw DataError("write failed: " + path);
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::string text = read_text_file(path);
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw DataError("invalid JSON: " + path);
  return doc;
}

inline void write_json_file(const std::string& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory: " + dir.string() + " (" + ec.message() + ")");
}

}  // namespace synthgen
