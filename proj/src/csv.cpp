#include "pcaret/csv.hpp"

#include "pcaret/errors.hpp"

namespace pcaret {

std::vector<CsvRecord> parse_csv(const std::string& text) {
    std::vector<CsvRecord> records;
    CsvRecord current;
    std::string field;
    bool in_quotes = false;
    bool record_started = false;
    std::size_t line = 1;
    current.line = 1;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(current));
        current = CsvRecord{};
        current.line = line;
        record_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            record_started = true;
            break;
        case ',':
            end_field();
            record_started = true;
            break;
        case '\r':
            // swallow; \r\n handled at \n
            break;
        case '\n':
            ++line;
            if (record_started || !field.empty() || !current.fields.empty()) {
                end_record();
            } else {
                current.line = line; // skip blank line
            }
            break;
        default:
            field.push_back(c);
            record_started = true;
            break;
        }
    }
    if (in_quotes) {
        throw DataError("csv: unterminated quoted field starting near line " +
                        std::to_string(current.line));
    }
    if (record_started || !field.empty() || !current.fields.empty()) {
        end_record();
    }
    return records;
}

std::string csv_escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_escape(fields[i]);
    }
    return out;
}

} // namespace pcaret
