#include "polysound/csvio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace polysound {

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string format_csv(const CsvTable& table) {
    if (table.columns.empty()) throw DomainError("csv table has no columns");
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out.push_back(',');
        out += table.columns[i];
    }
    out.push_back('\n');
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw DomainError("csv row length disagrees with header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            out += format_value(row[i]);
        }
        out.push_back('\n');
    }
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os) throw IoError("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot rename " + tmp + " to " + path);
    }
}

void write_csv(const std::string& path, const CsvTable& table) {
    write_file_atomic(path, format_csv(table));
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    if (is.bad()) throw IoError("read failed for " + path);
    return ss.str();
}

CsvTable read_csv(const std::string& path) {
    std::istringstream is(read_file(path));
    std::string line;
    if (!std::getline(is, line)) throw IoError(path + ": empty file");
    strip_cr(line);
    CsvTable table;
    table.columns = split_fields(line);

    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != table.columns.size()) {
            throw IoError(path + ":" + std::to_string(lineno) +
                          ": expected " + std::to_string(table.columns.size()) + " fields, got " +
                          std::to_string(fields.size()));
        }
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const char* begin = fields[i].c_str();
            char* end = nullptr;
            row[i] = std::strtod(begin, &end);
            if (end == begin || *end != '\0') {
                throw IoError(path + ":" + std::to_string(lineno) + ": bad number '" +
                              fields[i] + "'");
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace polysound
