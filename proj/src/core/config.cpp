#include "config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sha256.hpp"

namespace mfv {
namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

Config::Config() {
    // Pinned defaults; every tolerance-bearing quantity lives here.
    kv_ = {
        {"canvas.height", "64"},
        {"canvas.width", "48"},
        {"codec.patch", "4"},
        {"world.n", "512"},
        {"world.test_n", "64"},
        {"world.seed", "1"},
        {"model.stem_ch", "32"},
        {"model.base_ch", "64"},
        {"model.mid_ch", "128"},
        {"model.d_text", "64"},
        {"model.n_semantic", "4"},
        {"model.d_semantic", "64"},
        {"model.time_dim", "64"},
        {"model.time_hidden", "128"},
        {"model.lambda_ip", "1.0"},
        {"model.groups", "8"},
        {"model.init_seed", "42"},
        {"flow.weighting", "uniform"},
        {"flow.t_dist", "uniform01"},
        {"flow.sample_steps", "8"},
        {"train.steps", "3000"},
        {"train.batch", "2"},
        {"train.lr", "0.002"},
        {"train.beta1", "0.9"},
        {"train.beta2", "0.999"},
        {"train.eps", "1e-8"},
        {"train.seed", "7"},
        {"train.smooth_window", "100"},
        {"train.snapshot_every", "500"},
        {"stage2.steps", "1500"},
        {"stage2.lr", "0.001"},
        {"stage2.freeze_garment", "false"},
        {"ofi.corrupt_fraction", "0.5"},
        {"ofi.magnitudes", "2,3,4"},
        {"ofi.clean_mode", "false"},
        {"wild.ratio", "0.2"},
        {"wild.seed", "11"},
        {"eval.steps", "8"},
        {"eval.seed", "99"},
        {"infer.steps", "8"},
        {"infer.seed", "5"},
        {"workers", "1"},
        {"force", "false"},
    };
}

Config Config::from_file(const std::string& path) {
    Config c;
    c.merge_file(path);
    return c;
}

void Config::merge_file(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), ErrCategory::io, "cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        size_t eq = t.find('=');
        require(eq != std::string::npos, ErrCategory::config,
                "config parse error at " + path + ":" + std::to_string(lineno));
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        require(!key.empty(), ErrCategory::config,
                "empty config key at " + path + ":" + std::to_string(lineno));
        kv_[key] = val;
    }
}

void Config::set(const std::string& key, const std::string& value) { kv_[key] = value; }

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_str(const std::string& key) const {
    auto it = kv_.find(key);
    require(it != kv_.end(), ErrCategory::config, "missing config key: " + key);
    return it->second;
}

std::string Config::get_str(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

int Config::get_int(const std::string& key) const {
    const std::string v = get_str(key);
    try {
        size_t used = 0;
        int out = std::stoi(v, &used);
        require(used == v.size(), ErrCategory::config, "bad integer for " + key + ": " + v);
        return out;
    } catch (const Error&) {
        throw;
    } catch (...) {
        fail_config("bad integer for " + key + ": " + v);
    }
}

double Config::get_double(const std::string& key) const {
    const std::string v = get_str(key);
    try {
        size_t used = 0;
        double out = std::stod(v, &used);
        require(used == v.size(), ErrCategory::config, "bad number for " + key + ": " + v);
        return out;
    } catch (const Error&) {
        throw;
    } catch (...) {
        fail_config("bad number for " + key + ": " + v);
    }
}

bool Config::get_bool(const std::string& key) const {
    std::string v = get_str(key);
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail_config("bad boolean for " + key + ": " + v);
}

std::vector<int> Config::get_int_list(const std::string& key) const {
    std::string v = get_str(key);
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stoi(item));
        } catch (...) {
            fail_config("bad integer list for " + key + ": " + v);
        }
    }
    require(!out.empty(), ErrCategory::config, "empty integer list for " + key);
    return out;
}

std::string Config::serialize() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) os << k << " = " << v << "\n";
    return os.str();
}

std::string Config::config_hash() const { return sha256_hex(serialize()); }

std::string Config::lineage_hash() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) {
        if (k.rfind("canvas.", 0) == 0 || k.rfind("codec.", 0) == 0 || k.rfind("model.", 0) == 0)
            os << k << " = " << v << "\n";
    }
    return sha256_hex(os.str());
}

void Config::write_snapshot(const std::string& path) const {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::trunc);
    require(f.good(), ErrCategory::io, "cannot write config snapshot: " + path);
    f << serialize();
    require(f.good(), ErrCategory::io, "failed writing config snapshot: " + path);
}

}  // namespace mfv
