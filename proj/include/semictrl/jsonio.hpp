#pragma once

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

// Deterministic JSON emission: insertion-ordered objects, doubles printed
// with 17 significant digits, so identical records serialize to identical
// bytes. Parsing is done elsewhere (nlohmann); this is output only.

namespace semictrl::jsonio {

class Value {
public:
    Value() : kind_(Kind::null) {}

    static Value null() { return Value(); }
    static Value boolean(bool b) {
        Value v;
        v.kind_ = Kind::boolean;
        v.bool_ = b;
        return v;
    }
    static Value integer(std::int64_t i) {
        Value v;
        v.kind_ = Kind::integer;
        v.int_ = i;
        return v;
    }
    static Value real(double d) {
        Value v;
        v.kind_ = Kind::real;
        v.real_ = d;
        return v;
    }
    static Value str(std::string s) {
        Value v;
        v.kind_ = Kind::string;
        v.str_ = std::move(s);
        return v;
    }
    static Value array() {
        Value v;
        v.kind_ = Kind::array;
        return v;
    }
    static Value object() {
        Value v;
        v.kind_ = Kind::object;
        return v;
    }

    template <typename It>
    static Value real_array(It begin, It end) {
        Value v = array();
        for (It it = begin; it != end; ++it) v.push(real(static_cast<double>(*it)));
        return v;
    }
    template <typename Container>
    static Value real_array(const Container& c) {
        return real_array(c.begin(), c.end());
    }

    Value& push(Value v) {
        items_.push_back(std::move(v));
        return items_.back();
    }
    Value& set(std::string key, Value v) {
        keys_.push_back(std::move(key));
        items_.push_back(std::move(v));
        return items_.back();
    }

    bool is_null() const { return kind_ == Kind::null; }

    std::string dump(int indent = 2) const {
        std::string out;
        write(out, indent, 0);
        return out;
    }

private:
    enum class Kind { null, boolean, integer, real, string, array, object };

    static void write_escaped(std::string& out, const std::string& s) {
        out += '"';
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        out += buf;
                    } else {
                        out += c;
                    }
            }
        }
        out += '"';
    }

    static void write_real(std::string& out, double d) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", d);
        out += buf;
    }

    void write(std::string& out, int indent, int depth) const {
        const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
        const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
        switch (kind_) {
            case Kind::null: out += "null"; return;
            case Kind::boolean: out += bool_ ? "true" : "false"; return;
            case Kind::integer: out += std::to_string(int_); return;
            case Kind::real: write_real(out, real_); return;
            case Kind::string: write_escaped(out, str_); return;
            case Kind::array: {
                if (items_.empty()) {
                    out += "[]";
                    return;
                }
                out += "[\n";
                for (std::size_t i = 0; i < items_.size(); ++i) {
                    out += pad;
                    items_[i].write(out, indent, depth + 1);
                    if (i + 1 < items_.size()) out += ',';
                    out += '\n';
                }
                out += close_pad + "]";
                return;
            }
            case Kind::object: {
                if (items_.empty()) {
                    out += "{}";
                    return;
                }
                out += "{\n";
                for (std::size_t i = 0; i < items_.size(); ++i) {
                    out += pad;
                    write_escaped(out, keys_[i]);
                    out += ": ";
                    items_[i].write(out, indent, depth + 1);
                    if (i + 1 < items_.size()) out += ',';
                    out += '\n';
                }
                out += close_pad + "}";
                return;
            }
        }
    }

    Kind kind_;
    bool bool_ = false;
    std::int64_t int_ = 0;
    double real_ = 0.0;
    std::string str_;
    std::vector<std::string> keys_;
    std::vector<Value> items_;
};

}  // namespace semictrl::jsonio
