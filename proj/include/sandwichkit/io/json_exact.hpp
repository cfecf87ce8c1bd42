#pragma once

#include <json.hpp>

#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

namespace sandwichkit::io {

using json = nlohmann::ordered_json;

/// Malformed input file; the CLI maps it to exit code 3.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// SAX handler that keeps the source lexeme of every non-integer number (as a
/// string) so no value passes through binary floating point.
class ExactSax {
public:
    explicit ExactSax(const std::string& text) : text_(text) {}

    json& result() { return root_; }
    const std::string& error() const { return error_; }

    bool null() { return put(json(nullptr)); }
    bool boolean(bool b) { return put(json(b)); }
    bool number_integer(json::number_integer_t v) { return put(json(v)); }
    bool number_unsigned(json::number_unsigned_t v) { return put(json(v)); }
    bool number_float(json::number_float_t, const json::string_t& raw) { return put(json(raw)); }
    bool string(json::string_t& s) { return put(json(s)); }
    bool binary(json::binary_t&) { return put(json(nullptr)); }

    bool start_object(std::size_t)
    {
        if (!put(json::object()))
            return false;
        stack_.push_back(last_);
        return true;
    }
    bool key(json::string_t& k)
    {
        if (stack_.back()->contains(k)) {
            error_ = "duplicate key '" + k + "'";
            return false;
        }
        key_ = k;
        return true;
    }
    bool end_object()
    {
        stack_.pop_back();
        return true;
    }
    bool start_array(std::size_t)
    {
        if (!put(json::array()))
            return false;
        stack_.push_back(last_);
        return true;
    }
    bool end_array()
    {
        stack_.pop_back();
        return true;
    }

    bool parse_error(std::size_t position, const std::string&, const nlohmann::detail::exception& ex)
    {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < position && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string what = ex.what();
        if (auto p = what.find("parse error"); p != std::string::npos)
            what = what.substr(p);
        error_ = "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what;
        return false;
    }

private:
    bool put(json v)
    {
        if (stack_.empty()) {
            root_ = std::move(v);
            last_ = &root_;
        } else if (stack_.back()->is_array()) {
            stack_.back()->push_back(std::move(v));
            last_ = &stack_.back()->back();
        } else {
            (*stack_.back())[key_] = std::move(v);
            last_ = &(*stack_.back())[key_];
        }
        return true;
    }

    const std::string& text_;
    json root_;
    std::vector<json*> stack_;
    json* last_ = nullptr;
    std::string key_;
    std::string error_;
};

}  // namespace detail

/// Parses JSON text; syntax errors cite line and column.
inline json parse_exact_json(const std::string& text)
{
    detail::ExactSax sax(text);
    bool ok = json::sax_parse(text, &sax);
    if (!ok) {
        std::string msg = sax.error().empty() ? "malformed JSON" : sax.error();
        throw InputError(msg);
    }
    return std::move(sax.result());
}

}  // namespace sandwichkit::io
