#include "xraysim/io/toml.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace xraysim::toml {

const std::string& Value::as_string() const {
    if (!is_string())
        throw ConfigError("TOML value is not a string");
    return std::get<std::string>(v);
}

std::int64_t Value::as_int() const {
    if (!is_int())
        throw ConfigError("TOML value is not an integer");
    return std::get<std::int64_t>(v);
}

double Value::as_number() const {
    if (is_int())
        return double(std::get<std::int64_t>(v));
    if (is_float())
        return std::get<double>(v);
    throw ConfigError("TOML value is not a number");
}

bool Value::as_bool() const {
    if (!is_bool())
        throw ConfigError("TOML value is not a boolean");
    return std::get<bool>(v);
}

const Array& Value::as_array() const {
    if (!is_array())
        throw ConfigError("TOML value is not an array");
    return std::get<Array>(v);
}

const Value& Table::get(const std::string& key) const {
    const auto it = entries.find(key);
    if (it == entries.end())
        throw ConfigError("missing TOML key '" + key + "'");
    return it->second;
}

std::string Table::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key).as_string() : fallback;
}

std::int64_t Table::get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get(key).as_int() : fallback;
}

double Table::get_number(const std::string& key, double fallback) const {
    return has(key) ? get(key).as_number() : fallback;
}

bool Table::get_bool(const std::string& key, bool fallback) const {
    return has(key) ? get(key).as_bool() : fallback;
}

const Table& Document::table_or_empty(const std::string& name) const {
    static const Table empty;
    const auto it = tables.find(name);
    return it == tables.end() ? empty : it->second;
}

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("TOML line " + std::to_string(line) + ": " + msg);
    }

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        const char c = text[pos++];
        if (c == '\n')
            ++line;
        return c;
    }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t'))
            ++pos;
    }

    void skip_to_eol() {
        while (!eof() && peek() != '\n')
            ++pos;
        if (!eof())
            take();
    }

    // whitespace + comment + newline; anything else is trailing junk
    void end_line() {
        skip_ws();
        if (eof())
            return;
        if (peek() == '#') {
            skip_to_eol();
            return;
        }
        if (peek() == '\n') {
            take();
            return;
        }
        fail(std::string("unexpected character '") + peek() + "'");
    }
};

std::string parse_basic_string(Cursor& cur) {
    cur.take(); // opening quote
    std::string out;
    while (true) {
        if (cur.eof())
            cur.fail("unterminated string");
        char c = cur.take();
        if (c == '"')
            return out;
        if (c == '\n')
            cur.fail("newline inside string");
        if (c == '\\') {
            if (cur.eof())
                cur.fail("dangling escape");
            const char esc = cur.take();
            switch (esc) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                default: cur.fail(std::string("unsupported escape '\\") + esc + "'");
            }
        } else {
            out.push_back(c);
        }
    }
}

Value parse_value(Cursor& cur);

Array parse_array(Cursor& cur) {
    cur.take(); // '['
    Array arr;
    while (true) {
        cur.skip_ws();
        // tolerate newlines inside arrays
        while (!cur.eof() && cur.peek() == '\n') {
            cur.take();
            cur.skip_ws();
        }
        if (cur.eof())
            cur.fail("unterminated array");
        if (cur.peek() == ']') {
            cur.take();
            return arr;
        }
        arr.push_back(parse_value(cur));
        cur.skip_ws();
        while (!cur.eof() && cur.peek() == '\n') {
            cur.take();
            cur.skip_ws();
        }
        if (cur.eof())
            cur.fail("unterminated array");
        if (cur.peek() == ',') {
            cur.take();
        } else if (cur.peek() != ']') {
            cur.fail("expected ',' or ']' in array");
        }
    }
}

Value parse_scalar_token(Cursor& cur) {
    std::string tok;
    while (!cur.eof()) {
        const char c = cur.peek();
        if (c == ',' || c == ']' || c == '#' || c == '\n' || c == ' ' || c == '\t')
            break;
        tok.push_back(cur.take());
    }
    if (tok.empty())
        cur.fail("expected a value");
    if (tok == "true")
        return Value{true};
    if (tok == "false")
        return Value{false};

    const bool looks_float = tok.find_first_of(".eE") != std::string::npos &&
                             tok.find("0x") == std::string::npos;
    if (!looks_float) {
        std::int64_t iv = 0;
        const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), iv);
        if (ec == std::errc() && p == tok.data() + tok.size())
            return Value{iv};
    }
    try {
        std::size_t used = 0;
        const double dv = std::stod(tok, &used);
        if (used == tok.size())
            return Value{dv};
    } catch (...) {
    }
    cur.fail("cannot parse value '" + tok + "'");
}

Value parse_value(Cursor& cur) {
    cur.skip_ws();
    if (cur.eof())
        cur.fail("expected a value");
    const char c = cur.peek();
    if (c == '"')
        return Value{parse_basic_string(cur)};
    if (c == '[')
        return Value{parse_array(cur)};
    if (c == '{')
        cur.fail("inline tables are not supported");
    return parse_scalar_token(cur);
}

std::string parse_key(Cursor& cur) {
    cur.skip_ws();
    if (!cur.eof() && cur.peek() == '"')
        return parse_basic_string(cur);
    std::string key;
    while (!cur.eof()) {
        const char c = cur.peek();
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
            key.push_back(cur.take());
        } else {
            break;
        }
    }
    if (key.empty())
        cur.fail("expected a key");
    if (!cur.eof() && cur.peek() == '.')
        cur.fail("dotted keys are not supported");
    return key;
}

} // namespace

Document parse(const std::string& text) {
    Document doc;
    Cursor cur{text};
    Table* current = &doc.root;

    while (!cur.eof()) {
        cur.skip_ws();
        if (cur.eof())
            break;
        const char c = cur.peek();
        if (c == '\n') {
            cur.take();
            continue;
        }
        if (c == '#') {
            cur.skip_to_eol();
            continue;
        }
        if (c == '[') {
            cur.take();
            const bool is_array = !cur.eof() && cur.peek() == '[';
            if (is_array)
                cur.take();
            const std::string name = parse_key(cur);
            cur.skip_ws();
            if (cur.eof() || cur.take() != ']')
                cur.fail("expected ']' after table name");
            if (is_array) {
                if (cur.eof() || cur.take() != ']')
                    cur.fail("expected ']]' after array-of-tables name");
                doc.table_arrays[name].emplace_back();
                current = &doc.table_arrays[name].back();
            } else {
                if (doc.tables.count(name))
                    cur.fail("duplicate table [" + name + "]");
                current = &doc.tables[name];
            }
            cur.end_line();
            continue;
        }

        const std::string key = parse_key(cur);
        cur.skip_ws();
        if (cur.eof() || cur.take() != '=')
            cur.fail("expected '=' after key '" + key + "'");
        Value value = parse_value(cur);
        if (!current->entries.emplace(key, std::move(value)).second)
            cur.fail("duplicate key '" + key + "'");
        cur.end_line();
    }
    return doc;
}

} // namespace xraysim::toml
