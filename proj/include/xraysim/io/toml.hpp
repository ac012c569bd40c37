// Small TOML subset parser, enough for dataset configs: [table] and
// [[array-of-table]] headers, and key = value lines with strings, integers,
// floats, booleans and flat arrays. Dotted keys, inline tables, multi-line
// strings and dates are out of scope and rejected loudly.
#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "xraysim/types.hpp"

namespace xraysim::toml {

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<std::string, std::int64_t, double, bool, Array> v;

    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
    bool is_float() const { return std::holds_alternative<double>(v); }
    bool is_bool() const { return std::holds_alternative<bool>(v); }
    bool is_array() const { return std::holds_alternative<Array>(v); }

    const std::string& as_string() const;
    std::int64_t as_int() const;
    double as_number() const; // int or float
    bool as_bool() const;
    const Array& as_array() const;
};

struct Table {
    std::map<std::string, Value> entries;

    bool has(const std::string& key) const { return entries.count(key) != 0; }
    const Value& get(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_number(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
};

struct Document {
    Table root;
    std::map<std::string, Table> tables;            // [name]
    std::map<std::string, std::vector<Table>> table_arrays; // [[name]]

    const Table& table_or_empty(const std::string& name) const;
};

/// Throws ConfigError with a line number on anything outside the subset.
Document parse(const std::string& text);

} // namespace xraysim::toml
