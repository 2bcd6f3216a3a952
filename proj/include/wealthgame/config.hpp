#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace wg {

// Flat key = value configuration with dotted sections (spread.kind = rate).
// '#' starts a comment; later assignments win.
class Config {
public:
    static Config from_file(const std::string& path);

    // Parses a single "key=value" override.
    void set_override(const std::string& assignment);
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const;

    const std::map<std::string, std::string>& items() const { return values_; }

private:
    [[noreturn]] static void bad_value(const std::string& key, const std::string& value);
    std::map<std::string, std::string> values_;
};

}  // namespace wg
