#include "cactus/jsonl.hpp"

#include <fstream>

namespace cactus::jsonl {

using nlohmann::json;

void for_each(const std::string& path,
              const std::function<void(size_t, const json&)>& fn) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open " + path);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw Error("jsonl_parse",
                        path + ":" + std::to_string(line_no) + ": invalid JSON");
        fn(line_no, j);
    }
}

std::set<std::string> existing_ids(const std::string& path) {
    std::set<std::string> ids;
    std::ifstream probe(path);
    if (!probe) return ids;
    probe.close();
    for_each(path, [&](size_t, const json& j) {
        if (j.contains("id")) ids.insert(j.at("id").get<std::string>());
    });
    return ids;
}

Writer::Writer(const std::string& path) : path_(path), out_(path, std::ios::app) {
    if (!out_) throw Error("io", "cannot open " + path + " for append");
}

void Writer::write(const json& record) {
    out_ << record.dump() << '\n';
    if (!out_) throw Error("io", "cannot write " + path_);
    out_.flush();
    ++written_;
}

} // namespace cactus::jsonl
