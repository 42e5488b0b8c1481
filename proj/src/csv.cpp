#include "esmda/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "esmda/errors.hpp"

namespace esmda::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return fields;
}

bool try_parse(std::string_view field, double& out) {
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && !field.empty();
}

} // namespace

std::string format_value(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_value(std::string_view field, const std::string& context) {
    double v = 0.0;
    if (!try_parse(field, v))
        throw ConfigError(context + ": not a number: '" + std::string(field) + "'");
    if (!std::isfinite(v))
        throw ConfigError(context + ": non-finite value: '" +
                          std::string(field) + "'");
    return v;
}

void write_row(std::ostream& out, const double* values, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0)
            out << ',';
        out << format_value(values[i]);
    }
    out << '\n';
}

Table read_table(std::istream& in, const std::string& source) {
    Table table;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view trimmed = trim(line);
        if (trimmed.empty())
            continue;
        const auto fields = split_fields(trimmed);
        if (rows.empty() && table.header.empty()) {
            double probe;
            if (!try_parse(fields.front(), probe)) {
                for (const auto f : fields)
                    table.header.emplace_back(f);
                width = fields.size();
                continue;
            }
        }
        if (width == 0)
            width = fields.size();
        if (fields.size() != width)
            throw ConfigError(source + " line " + std::to_string(lineno) +
                              ": expected " + std::to_string(width) +
                              " fields, found " + std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i)
            row[i] = parse_value(fields[i],
                                 source + " line " + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    table.values = la::Matrix(rows.size(), width);
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy(rows[i].begin(), rows[i].end(), table.values.row(i));
    return table;
}

Table read_table_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open CSV file: " + path.string());
    return read_table(in, path.string());
}

la::Vector read_vector_file(const std::filesystem::path& path) {
    const Table t = read_table_file(path);
    la::Vector v(t.values.data(),
                 t.values.data() + t.values.rows() * t.values.cols());
    return v;
}

} // namespace esmda::csv
