#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "caresim/error.hpp"

namespace caresim::csv {

/// Shortest decimal string that parses back to the same double.
/// NaN is written as an empty field (absent value).
inline std::string format_double(double v)
{
    if (std::isnan(v)) {
        return {};
    }
    if (v == 0.0) {
        return "0"; // folds -0
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct Row {
    std::size_t line = 0; // 1-based line number in the source file
    std::vector<std::string> cells;
};

/// A parsed CSV file: a mandatory header row plus data rows. Fields are
/// comma separated, unquoted, UTF-8 with a decimal point.
class Table {
public:
    Table() = default;

    static Table parse(std::string_view text, std::string source)
    {
        Table t;
        t.source_ = std::move(source);
        std::size_t line_no = 0;
        std::size_t pos = 0;
        bool have_header = false;
        while (pos <= text.size()) {
            auto end = text.find('\n', pos);
            if (end == std::string_view::npos) {
                end = text.size();
            }
            auto line = text.substr(pos, end - pos);
            pos = end + 1;
            ++line_no;
            if (!line.empty() && line.back() == '\r') {
                line.remove_suffix(1);
            }
            if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") {
                line.remove_prefix(3);
            }
            if (line.empty()) {
                if (end == text.size()) {
                    break;
                }
                continue;
            }
            auto cells = split(line);
            if (!have_header) {
                t.header_ = std::move(cells);
                for (std::size_t i = 0; i < t.header_.size(); ++i) {
                    t.index_[t.header_[i]] = i;
                }
                have_header = true;
            }
            else {
                if (cells.size() != t.header_.size()) {
                    throw Error(ErrorCode::InvalidInput, t.source_ + ":" + std::to_string(line_no) + ": expected " +
                                                             std::to_string(t.header_.size()) + " fields, got " +
                                                             std::to_string(cells.size()));
                }
                t.rows_.push_back({line_no, std::move(cells)});
            }
            if (end == text.size()) {
                break;
            }
        }
        if (!have_header) {
            throw Error(ErrorCode::InvalidInput, t.source_ + ": missing header row");
        }
        return t;
    }

    static Table read_file(const std::string& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw Error(ErrorCode::InvalidInput, path + ": cannot open file");
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::string& source() const { return source_; }

    bool has_column(const std::string& name) const { return index_.count(name) != 0; }

    std::size_t column(const std::string& name) const
    {
        auto it = index_.find(name);
        if (it == index_.end()) {
            throw Error(ErrorCode::InvalidInput, source_ + ":1: missing column '" + name + "'");
        }
        return it->second;
    }

    void require_columns(std::initializer_list<const char*> names) const
    {
        for (auto n : names) {
            column(n);
        }
    }

    std::string where(const Row& row) const { return source_ + ":" + std::to_string(row.line); }

    const std::string& cell(const Row& row, const std::string& name) const { return row.cells[column(name)]; }

    double number(const Row& row, const std::string& name) const
    {
        const auto& s = cell(row, name);
        double v = 0.0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            throw Error(ErrorCode::InvalidInput, where(row) + ": column '" + name + "': not a number: '" + s + "'");
        }
        return v;
    }

    /// Empty cell reads as NaN.
    double optional_number(const Row& row, const std::string& name) const
    {
        if (cell(row, name).empty()) {
            return std::nan("");
        }
        return number(row, name);
    }

    std::int64_t integer(const Row& row, const std::string& name) const
    {
        const auto& s = cell(row, name);
        std::int64_t v = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            throw Error(ErrorCode::InvalidInput, where(row) + ": column '" + name + "': not an integer: '" + s + "'");
        }
        return v;
    }

    std::uint64_t unsigned_integer(const Row& row, const std::string& name) const
    {
        const auto& s = cell(row, name);
        std::uint64_t v = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            throw Error(ErrorCode::InvalidInput, where(row) + ": column '" + name + "': not an integer: '" + s + "'");
        }
        return v;
    }

    /// Accepts 1/0, true/false, Y/N (any case).
    bool boolean(const Row& row, const std::string& name) const
    {
        auto s = cell(row, name);
        for (auto& c : s) {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        if (s == "1" || s == "true" || s == "y" || s == "yes") {
            return true;
        }
        if (s == "0" || s == "false" || s == "n" || s == "no") {
            return false;
        }
        throw Error(ErrorCode::InvalidInput, where(row) + ": column '" + name + "': not a boolean: '" + s + "'");
    }

private:
    static std::vector<std::string> split(std::string_view line)
    {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (true) {
            auto comma = line.find(',', start);
            auto field = line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start);
            while (!field.empty() && field.front() == ' ') {
                field.remove_prefix(1);
            }
            while (!field.empty() && field.back() == ' ') {
                field.remove_suffix(1);
            }
            out.emplace_back(field);
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        return out;
    }

    std::string source_;
    std::vector<std::string> header_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<Row> rows_;
};

/// Row-at-a-time writer producing '\n'-terminated lines.
class Writer {
public:
    explicit Writer(std::ostream& out)
        : out_(out)
    {
    }

    Writer& field(const std::string& s)
    {
        sep();
        out_ << s;
        return *this;
    }
    Writer& field(const char* s) { return field(std::string(s)); }
    Writer& field(double v)
    {
        sep();
        out_ << format_double(v);
        return *this;
    }
    Writer& field(std::int64_t v)
    {
        sep();
        out_ << v;
        return *this;
    }
    Writer& field(int v) { return field(static_cast<std::int64_t>(v)); }
    Writer& field(std::size_t v)
    {
        sep();
        out_ << v;
        return *this;
    }
    Writer& field(bool v)
    {
        sep();
        out_ << (v ? "1" : "0");
        return *this;
    }

    void end_row()
    {
        out_ << '\n';
        first_ = true;
    }

    template <class Range>
    void header(const Range& names)
    {
        for (const auto& n : names) {
            field(std::string(n));
        }
        end_row();
    }

private:
    void sep()
    {
        if (!first_) {
            out_ << ',';
        }
        first_ = false;
    }

    std::ostream& out_;
    bool first_ = true;
};

} // namespace caresim::csv
