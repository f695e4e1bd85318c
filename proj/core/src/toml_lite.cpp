#include "toml_lite.hpp"

#include <charconv>
#include <cmath>

#include "hawkes/errors.hpp"

namespace hawkes::toml {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw ConfigError("TOML line " + std::to_string(line) + ": " + what);
}

bool bare_key_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

class Cursor {
public:
    Cursor(std::string_view s, std::size_t line) : s_(s), line_(line) {}

    void skip_ws() {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
    }
    bool done() {
        skip_ws();
        return i_ >= s_.size() || s_[i_] == '#';
    }
    char peek() {
        skip_ws();
        return i_ < s_.size() ? s_[i_] : '\0';
    }
    void expect(char c) {
        if (peek() != c) fail(line_, std::string("expected '") + c + "'");
        ++i_;
    }

    std::string key() {
        skip_ws();
        std::string out;
        while (true) {
            const std::size_t start = i_;
            while (i_ < s_.size() && bare_key_char(s_[i_])) ++i_;
            if (i_ == start) fail(line_, "expected a key");
            out.append(s_.substr(start, i_ - start));
            if (i_ < s_.size() && s_[i_] == '.') {
                out += '.';
                ++i_;
                continue;
            }
            return out;
        }
    }

    Value value() {
        const char c = peek();
        if (c == '"') return Value{string()};
        if (c == '[') return Value{array()};
        if (s_.substr(i_, 4) == "true") {
            i_ += 4;
            return Value{true};
        }
        if (s_.substr(i_, 5) == "false") {
            i_ += 5;
            return Value{false};
        }
        return number();
    }

private:
    std::string string() {
        expect('"');
        std::string out;
        while (i_ < s_.size() && s_[i_] != '"') {
            char ch = s_[i_++];
            if (ch == '\\') {
                if (i_ >= s_.size()) break;
                const char e = s_[i_++];
                switch (e) {
                    case 'n': ch = '\n'; break;
                    case 't': ch = '\t'; break;
                    case '"': ch = '"'; break;
                    case '\\': ch = '\\'; break;
                    default: fail(line_, "unsupported escape");
                }
            }
            out += ch;
        }
        if (i_ >= s_.size()) fail(line_, "unterminated string");
        ++i_;
        return out;
    }

    Array array() {
        expect('[');
        Array out;
        if (peek() == ']') {
            ++i_;
            return out;
        }
        while (true) {
            out.push_back(value());
            const char c = peek();
            ++i_;
            if (c == ']') return out;
            if (c != ',') fail(line_, "expected ',' or ']' in array");
            if (peek() == ']') {
                ++i_;
                return out;
            }
        }
    }

    Value number() {
        skip_ws();
        const std::size_t start = i_;
        while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != ']' && s_[i_] != ' ' && s_[i_] != '\t' && s_[i_] != '#')
            ++i_;
        std::string tok;
        for (char ch : s_.substr(start, i_ - start))
            if (ch != '_') tok += ch;
        if (tok.empty()) fail(line_, "expected a value");
        const bool is_float = tok.find_first_of(".eE") != std::string::npos || tok == "inf" || tok == "nan";
        if (!is_float) {
            std::int64_t v = 0;
            const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size()) fail(line_, "bad integer '" + tok + "'");
            return Value{v};
        }
        double v = 0.0;
        const char* first = tok.data();
        if (*first == '+') ++first;
        const auto [p, ec] = std::from_chars(first, tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size()) fail(line_, "bad number '" + tok + "'");
        return Value{v};
    }

    std::string_view s_;
    std::size_t line_;
    std::size_t i_ = 0;
};

[[noreturn]] void type_error(std::string_view key, const char* want) {
    throw ConfigError("config key '" + std::string(key) + "' must be " + want);
}

}  // namespace

bool Value::is_number() const noexcept {
    return std::holds_alternative<double>(data) || std::holds_alternative<std::int64_t>(data);
}

double Value::as_double(std::string_view key) const {
    if (const auto* d = std::get_if<double>(&data)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&data)) return static_cast<double>(*i);
    type_error(key, "a number");
}

std::int64_t Value::as_int(std::string_view key) const {
    if (const auto* i = std::get_if<std::int64_t>(&data)) return *i;
    type_error(key, "an integer");
}

bool Value::as_bool(std::string_view key) const {
    if (const auto* b = std::get_if<bool>(&data)) return *b;
    type_error(key, "a boolean");
}

const std::string& Value::as_string(std::string_view key) const {
    if (const auto* s = std::get_if<std::string>(&data)) return *s;
    type_error(key, "a string");
}

const Array& Value::as_array(std::string_view key) const {
    if (const auto* a = std::get_if<Array>(&data)) return *a;
    type_error(key, "an array");
}

Document parse(std::string_view text) {
    Document doc;
    doc[""];
    std::string table;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = end + 1;
        ++lineno;
        Cursor cur(line, lineno);
        if (cur.done()) continue;
        if (cur.peek() == '[') {
            cur.expect('[');
            table = cur.key();
            cur.expect(']');
            if (!cur.done()) fail(lineno, "trailing characters after table header");
            if (doc.count(table) && !doc[table].empty()) fail(lineno, "duplicate table [" + table + "]");
            doc[table];
            continue;
        }
        const auto key = cur.key();
        cur.expect('=');
        auto value = cur.value();
        if (!cur.done()) fail(lineno, "trailing characters after value");
        auto& t = doc[table];
        if (t.count(key)) fail(lineno, "duplicate key '" + key + "'");
        t.emplace(key, std::move(value));
    }
    return doc;
}

std::string format(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eEin") == std::string::npos) s += ".0";
    return s;
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

}  // namespace hawkes::toml
