#pragma once

#include <map>
#include <string>
#include <vector>

#include "common.hpp"

namespace mfv {

// Flat `key = value` run configuration. Files may contain blank lines and
// `#` comments. CLI flags override file values. Every run writes a resolved
// snapshot next to its outputs, and artifacts embed two hashes:
//   config_hash  — sha256 of the full resolved config
//   lineage_hash — sha256 of the geometry/topology subset that downstream
//                  artifacts must agree on (canvas, codec, model.*)
class Config {
public:
    Config();  // defaults

    static Config from_file(const std::string& path);
    void merge_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_str(const std::string& key) const;
    std::string get_str(const std::string& key, const std::string& fallback) const;
    int get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<int> get_int_list(const std::string& key) const;  // comma separated

    std::string serialize() const;  // canonical: sorted keys, "k = v\n"
    std::string config_hash() const;
    std::string lineage_hash() const;

    void write_snapshot(const std::string& path) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace mfv
