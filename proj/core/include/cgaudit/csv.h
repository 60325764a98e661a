#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cgaudit::csv {

/// Minimal RFC 4180 reader: quoted fields may contain commas, doubled quotes
/// and line breaks. Both CRLF and LF record terminators are accepted.
class Reader {
public:
    explicit Reader(std::istream &in) : in_(in) {}

    /// Next record, or nullopt at end of input. Throws std::runtime_error on
    /// an unterminated quoted field.
    std::optional<std::vector<std::string>> next();

    /// 1-based line number where the most recent record started.
    std::size_t record_line() const noexcept { return record_line_; }

private:
    std::istream &in_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
};

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream &out, const std::vector<std::string> &fields);

}  // namespace cgaudit::csv
