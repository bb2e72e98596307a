#include "fedmf/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>

#include "fedmf/error.hpp"

namespace fedmf {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() ||
        !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<long long> parse_integer(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        return std::nullopt;
    }
    return value;
}

int parse_label(std::string_view text, const std::string& file, std::size_t line) {
    if (auto v = parse_integer(text)) return static_cast<int>(*v);
    // libsvm files frequently write labels as "+1" or "1.0".
    if (auto v = parse_double(text); v && *v == std::floor(*v)) return static_cast<int>(*v);
    throw ParseError(file, line, "label '" + std::string(trim(text)) + "' is not an integer");
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

LabeledTable load_csv(const std::filesystem::path& path, bool has_label_column, char delimiter) {
    const std::string file = path.string();
    std::ifstream in = open_input(path);
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view content = trim(line);
        if (content.empty() || content.front() == '#') continue;
        std::string_view rest = line;
        std::size_t fields = 0;
        bool first = true;
        while (true) {
            const auto pos = rest.find(delimiter);
            const std::string_view cell = rest.substr(0, pos);
            if (first && has_label_column) {
                labels.push_back(parse_label(cell, file, line_no));
            } else {
                const auto v = parse_double(cell);
                if (!v) {
                    throw ParseError(file, line_no,
                                     "non-numeric cell '" + std::string(trim(cell)) + "'");
                }
                values.push_back(*v);
                ++fields;
            }
            first = false;
            if (pos == std::string_view::npos) break;
            rest.remove_prefix(pos + 1);
        }
        if (fields == 0) throw ParseError(file, line_no, "row has no feature columns");
        if (rows == 0) {
            cols = fields;
        } else if (fields != cols) {
            throw ParseError(file, line_no,
                             "expected " + std::to_string(cols) + " columns, found " +
                                 std::to_string(fields));
        }
        ++rows;
    }
    if (rows == 0) throw ParseError(file, line_no, "file contains no data rows");

    LabeledTable table{Matrix(rows, cols, std::move(values)), std::nullopt};
    if (has_label_column) table.labels = std::move(labels);
    return table;
}

LabeledTable load_libsvm(const std::filesystem::path& path, std::size_t dim) {
    if (dim == 0) throw InvalidArgument("load_libsvm: dim must be >= 1");
    const std::string file = path.string();
    std::ifstream in = open_input(path);
    std::vector<double> values;
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view rest = trim(line);
        if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
            rest = trim(rest.substr(0, hash));
        }
        if (rest.empty()) continue;

        auto next_token = [&rest]() {
            const auto start = rest.find_first_not_of(" \t");
            if (start == std::string_view::npos) {
                rest = {};
                return std::string_view{};
            }
            rest.remove_prefix(start);
            const auto end = rest.find_first_of(" \t");
            const std::string_view token = rest.substr(0, end);
            rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
            return token;
        };

        labels.push_back(parse_label(next_token(), file, line_no));
        const std::size_t offset = values.size();
        values.resize(offset + dim, 0.0);
        for (std::string_view token = next_token(); !token.empty(); token = next_token()) {
            const auto colon = token.find(':');
            if (colon == std::string_view::npos) {
                throw ParseError(file, line_no, "malformed pair '" + std::string(token) + "'");
            }
            const auto index = parse_integer(token.substr(0, colon));
            const auto value = parse_double(token.substr(colon + 1));
            if (!index || !value) {
                throw ParseError(file, line_no, "malformed pair '" + std::string(token) + "'");
            }
            if (*index < 1 || static_cast<std::size_t>(*index) > dim) {
                throw ParseError(file, line_no,
                                 "index " + std::to_string(*index) + " outside [1, " +
                                     std::to_string(dim) + "]");
            }
            values[offset + static_cast<std::size_t>(*index) - 1] = *value;
        }
    }
    if (labels.empty()) throw ParseError(file, line_no, "file contains no data rows");
    const std::size_t rows = labels.size();
    return LabeledTable{Matrix(rows, dim, std::move(values)), std::move(labels)};
}

void write_csv(const std::filesystem::path& path, const LabeledTable& table, char delimiter) {
    std::ofstream out = open_output(path);
    const Matrix& m = table.features;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (table.labels) out << (*table.labels)[i] << delimiter;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j > 0) out << delimiter;
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

void write_csv(const std::filesystem::path& path, const Matrix& m, char delimiter) {
    write_csv(path, LabeledTable{m, std::nullopt}, delimiter);
}

void write_libsvm(const std::filesystem::path& path, const LabeledTable& table) {
    if (!table.labels) throw InvalidArgument("write_libsvm: table has no labels");
    std::ofstream out = open_output(path);
    const Matrix& m = table.features;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out << (*table.labels)[i];
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m(i, j) != 0.0) out << ' ' << (j + 1) << ':' << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

Matrix center_columns(const Matrix& m) {
    Matrix out = m;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) mean += m(i, j);
        mean /= static_cast<double>(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) -= mean;
    }
    return out;
}

}  // namespace fedmf
