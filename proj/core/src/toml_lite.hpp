#pragma once

// Reader/writer for the TOML subset used by experiment configs: [table] and
// [dotted.table] headers, key = value with strings, integers, floats,
// booleans and single-line arrays of those, and # comments. Internal header.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hawkes::toml {

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<bool, std::int64_t, double, std::string, Array> data;

    bool is_number() const noexcept;
    double as_double(std::string_view key) const;
    std::int64_t as_int(std::string_view key) const;
    bool as_bool(std::string_view key) const;
    const std::string& as_string(std::string_view key) const;
    const Array& as_array(std::string_view key) const;
};

using Table = std::map<std::string, Value>;
// Keys are table names; "" holds top-level keys.
using Document = std::map<std::string, Table>;

Document parse(std::string_view text);

std::string format(double v);
std::string quote(std::string_view s);

}  // namespace hawkes::toml
