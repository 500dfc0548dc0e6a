// SPDX-License-Identifier: Apache-2.0
#include "btq/csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "btq/error.hpp"

namespace btq {

namespace fs = std::filesystem;

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw Error(ErrorCode::IoError, "cannot format number");
    return {buf.data(), end};
}

double parse_number(const std::string& text) {
    if (text == "nan") return std::nan("");
    if (text == "inf") return INFINITY;
    if (text == "-inf") return -INFINITY;
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto [end, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || end != last) throw Error(ErrorCode::IoError, "not a number: '" + text + "'");
    return value;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw Error(ErrorCode::IoError, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) {
            fs::remove(tmp, ec);
            throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot rename into " + path.string());
    }
}

namespace {

void append_row(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        const std::string& c = cells[i];
        if (c.find_first_of(",\"\n") != std::string::npos) {
            out += '"';
            for (char ch : c) {
                if (ch == '"') out += '"';
                out += ch;
            }
            out += '"';
        } else {
            out += c;
        }
    }
    out += '\n';
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted) throw Error(ErrorCode::IoError, "unterminated quote in CSV row");
    cells.push_back(std::move(cur));
    return cells;
}

}  // namespace

std::string to_csv_text(const CsvTable& table) {
    std::string out;
    for (const auto& c : table.comments) out += "# " + c + "\n";
    append_row(out, table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw Error(ErrorCode::IoError, "CSV row width differs from header");
        append_row(out, row);
    }
    return out;
}

CsvTable parse_csv_text(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            table.comments.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
            continue;
        }
        // A quoted cell may span physical lines; an odd quote count means it is still open.
        while (std::count(line.begin(), line.end(), '"') % 2 != 0) {
            std::string next;
            if (!std::getline(in, next)) break;
            if (!next.empty() && next.back() == '\r') next.pop_back();
            line += '\n' + next;
        }
        if (!have_header) {
            table.header = split_row(line);
            have_header = true;
        } else {
            auto row = split_row(line);
            if (row.size() != table.header.size()) throw Error(ErrorCode::IoError, "CSV row width differs from header");
            table.rows.push_back(std::move(row));
        }
    }
    if (!have_header) throw Error(ErrorCode::IoError, "CSV text has no header row");
    return table;
}

void write_csv(const fs::path& path, const CsvTable& table) { write_text_atomic(path, to_csv_text(table)); }

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv_text(ss.str());
}

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXcd& matrix, const std::vector<std::string>& comments) {
    CsvTable table;
    table.comments = comments;
    table.comments.push_back("rows=" + std::to_string(matrix.rows()) + " cols=" + std::to_string(matrix.cols()));
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
        table.header.push_back("re_" + std::to_string(j));
        table.header.push_back("im_" + std::to_string(j));
    }
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        std::vector<std::string> row;
        for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
            row.push_back(format_number(matrix(i, j).real()));
            row.push_back(format_number(matrix(i, j).imag()));
        }
        table.rows.push_back(std::move(row));
    }
    write_csv(path, table);
}

Eigen::MatrixXcd read_matrix_csv(const fs::path& path) {
    const CsvTable table = read_csv(path);
    if (table.header.size() % 2 != 0) throw Error(ErrorCode::IoError, "matrix CSV needs (re, im) column pairs");
    const auto cols = static_cast<Eigen::Index>(table.header.size() / 2);
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(table.rows.size()), cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = {parse_number(row[2 * j]), parse_number(row[2 * j + 1])};
        }
    }
    return m;
}

std::string utc_timestamp() {
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace btq
