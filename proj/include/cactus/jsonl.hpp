#pragma once

#include <fstream>
#include <functional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "cactus/errors.hpp"

namespace cactus::jsonl {

// Streams one parsed object per non-blank line. The callback gets the
// 1-based line number; malformed lines raise Error("jsonl_parse", ...).
void for_each(const std::string& path,
              const std::function<void(size_t, const nlohmann::json&)>& fn);

// Ids ("id" field) present in a JSONL file; empty set when the file does
// not exist. Used for resume-by-id.
std::set<std::string> existing_ids(const std::string& path);

// Appends one compact object per line, creating the file if needed.
class Writer {
public:
    explicit Writer(const std::string& path);
    void write(const nlohmann::json& record);
    size_t written() const { return written_; }

private:
    std::string path_;
    std::ofstream out_;
    size_t written_ = 0;
};

} // namespace cactus::jsonl
